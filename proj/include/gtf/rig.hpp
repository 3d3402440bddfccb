#ifndef GTF_RIG_HPP
#define GTF_RIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "gtf/geometry.hpp"
#include "gtf/radio.hpp"
#include "gtf/stations.hpp"
#include "gtf/timesync.hpp"
#include "gtf/types.hpp"
#include "gtf/wire.hpp"

namespace gtf {

struct SyncParameters {
  double filter_weight = 0.1;
  int initial_cycles = 50;
  int resync_cycles = 5;
  double resync_period_s = 60.0;
  // A cycle that loses a message is retried; the session aborts with a
  // sync-timeout after this many consecutive failures.
  int cycle_retries = 10;

  void validate() const {
    if (filter_weight <= 0.0 || filter_weight >= 1.0) {
      throw ConfigError("filter weight must be in (0, 1)");
    }
    if (initial_cycles < 1 || resync_cycles < 1) {
      throw ConfigError("sync cycle counts must be positive");
    }
    if (resync_period_s <= 0.0) throw ConfigError("resync period must be positive");
    if (cycle_retries < 0) throw ConfigError("cycle retries must be non-negative");
  }
};

// A measurement as decoded at the master, with its delivery time (master
// clock). The exported log keeps only the client-side fields.
struct DeliveredMeasurement {
  RawMeasurement m;
  std::int64_t delivered_us = 0;
};

// Correction in force from t_us onward (master clock).
struct SkewTimelineEntry {
  std::int64_t t_us = 0;
  double delta_us = 0.0;
};

// Reflective calibration markers placed around the site, as measured by every
// station in its own frame.
std::vector<MarkerObservation> generate_marker_observations(
    const std::array<StationModel, 3>& stations, int count, double radius_m, double sigma_m,
    std::mt19937_64 rng);

// The full field rig: master radio on the robot, three total-station clients,
// one shared half-duplex channel. Drives initial synchronization, the polling
// loop and periodic resynchronizations on a discrete-event clock.
class Rig {
 public:
  Rig(std::array<StationModel, 3> stations, TrajectorySpec trajectory, PrismLayout layout,
      ChannelConfig channel_config, SyncParameters sync_params, std::uint64_t root_seed,
      double duration_s);

  // Synchronizes one client with n four-message cycles and seeds its estimate
  // from the plain mean skew. Throws SyncTimeoutError (state untouched) if any
  // message is lost.
  SkewEstimate run_initial_sync(int client, int n_cycles);

  // Same cycle structure, fewer cycles, filtered through update_correction.
  SkewEstimate run_resync(int client, const SkewEstimate& estimate, int n_cycles);

  // One pass of the polling loop: every station is asked for its newest
  // measurement in turn. Unresponsive stations are skipped for the round.
  std::vector<RawMeasurement> poll_round();

  // Scripted full run: initial syncs, then rounds with periodic resyncs until
  // the configured duration. Populates the product accessors below.
  void run();

  const std::vector<DeliveredMeasurement>& measurements() const { return measurements_; }
  const std::vector<ChannelEvent>& events() const { return channel_.log(); }
  const std::array<SkewEstimate, 3>& skews() const { return skews_; }
  const std::array<std::vector<SkewTimelineEntry>, 3>& skew_timelines() const {
    return skew_timelines_;
  }
  const TrajectorySpec& trajectory() const { return trajectory_; }
  const std::array<StationModel, 3>& stations() const { return station_models_; }

  // Correction active at master time t for a client (for error analyses).
  double correction_at(int client, std::int64_t t_us) const;

  Simulator& simulator() { return sim_; }
  Channel& channel() { return channel_; }

 private:
  struct ClientState {
    std::optional<RawMeasurement> unsent;
    Timestamp last_ping_stamp;            // t_i captured on the latest ping
    double outage_until_s = -1.0;         // tracking-loss window end
    std::int64_t last_sync_us = 0;
    std::mt19937_64 noise_rng;
    std::mt19937_64 schedule_rng;
    std::mt19937_64 loss_rng;
  };

  void schedule_production(int client, std::int64_t t_us);
  void produce_measurement(int client);

  // Sends a frame as soon as the channel frees up; on_deliver fires at
  // delivery unless the frame is dropped.
  void send_when_free(int bytes, const std::string& src, const std::string& dst,
                      std::function<void(std::int64_t)> on_deliver);

  // Request/response exchange against one client. Returns the reply delivery
  // time and payload via out-params; std::nullopt on timeout.
  struct Reply {
    std::int64_t delivered_us;
    std::vector<std::uint8_t> payload;
  };
  std::optional<Reply> exchange(int client, wire::ControlType request);

  std::optional<SyncCycle> sync_cycle(int client);
  std::vector<SyncCycle> run_cycles(int client, int n_cycles, const char* what);

  std::array<StationModel, 3> station_models_;
  TrajectorySpec trajectory_;
  PrismLayout layout_;
  SyncParameters sync_params_;
  double duration_s_;
  std::int64_t duration_us_;

  Simulator sim_;
  Channel channel_;
  std::array<ClientState, 3> clients_;
  std::array<SkewEstimate, 3> skews_;
  std::array<std::vector<SkewTimelineEntry>, 3> skew_timelines_;
  std::vector<DeliveredMeasurement> measurements_;
};

}  // namespace gtf

#endif  // GTF_RIG_HPP

#include "gtf/rig.hpp"

#include <cmath>
#include <memory>

#include "gtf/rng.hpp"
#include "gtf/wire.hpp"

namespace gtf {

namespace {
constexpr const char* kMaster = "master";

std::string client_name(int client) {
  return "station" + std::to_string(client);
}
}  // namespace

std::vector<MarkerObservation> generate_marker_observations(
    const std::array<StationModel, 3>& stations, int count, double radius_m, double sigma_m,
    std::mt19937_64 rng) {
  if (count < 3) throw ConfigError("need at least 3 calibration markers");
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  std::uniform_real_distribution<double> height(0.0, 2.0);
  std::normal_distribution<double> noise(0.0, sigma_m);

  std::vector<MarkerObservation> out;
  for (int i = 0; i < count; ++i) {
    const double phi = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
    const Point3 world(radius_m * (1.0 + jitter(rng)) * std::cos(phi),
                       radius_m * (1.0 + jitter(rng)) * std::sin(phi), height(rng));
    for (const auto& st : stations) {
      Point3 local = st.local_to_common().inverse().apply(world);
      if (sigma_m > 0.0) {
        local += Point3(noise(rng), noise(rng), noise(rng));
      }
      out.push_back({"m" + std::to_string(i + 1), st.index, local});
    }
  }
  return out;
}

Rig::Rig(std::array<StationModel, 3> stations, TrajectorySpec trajectory, PrismLayout layout,
         ChannelConfig channel_config, SyncParameters sync_params, std::uint64_t root_seed,
         double duration_s)
    : station_models_(std::move(stations)),
      trajectory_(trajectory.extended_to(duration_s)),
      layout_(std::move(layout)),
      sync_params_(sync_params),
      duration_s_(duration_s),
      duration_us_(std::llround(duration_s * 1e6)),
      channel_(channel_config, make_rng(root_seed, "radio")) {
  sync_params_.validate();
  trajectory_.validate();
  for (int k = 0; k < 3; ++k) {
    station_models_[k].validate();
    if (station_models_[k].index != k + 1) {
      throw ConfigError("stations must be listed in index order 1..3");
    }
    clients_[k].noise_rng = make_rng(root_seed, "station-noise", k + 1);
    clients_[k].schedule_rng = make_rng(root_seed, "station-schedule", k + 1);
    clients_[k].loss_rng = make_rng(root_seed, "station-loss", k + 1);
    skews_[k].filter_weight = sync_params_.filter_weight;
    // Stagger the first samples so station grids never coincide.
    schedule_production(k + 1, 61000 + 73000 * k);
  }
}

void Rig::schedule_production(int client, std::int64_t t_us) {
  if (t_us > duration_us_) return;
  sim_.schedule_at(t_us, [this, client] { produce_measurement(client); });
}

void Rig::produce_measurement(int client) {
  ClientState& state = clients_[client - 1];
  const StationModel& model = station_models_[client - 1];
  const std::int64_t now = sim_.now();
  const double now_s = static_cast<double>(now) * 1e-6;

  bool lost = now_s < state.outage_until_s;
  if (!lost && model.loss_probability > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(state.loss_rng) < model.loss_probability) {
      state.outage_until_s = now_s + model.reacquisition_s;
      lost = true;
    }
  }

  state.unsent = observe(model, trajectory_, layout_, client, now, state.noise_rng, lost);

  const std::int64_t period = std::llround(1e6 / model.rate_hz);
  std::int64_t next = now + period;
  if (model.rate_jitter_us > 0) {
    std::uniform_int_distribution<std::int64_t> j(-model.rate_jitter_us, model.rate_jitter_us);
    next += j(state.schedule_rng);
  }
  schedule_production(client, next);
}

void Rig::send_when_free(int bytes, const std::string& src, const std::string& dst,
                         std::function<void(std::int64_t)> on_deliver) {
  if (!channel_.busy(sim_.now())) {
    channel_.transmit(sim_, bytes, src, dst, std::move(on_deliver));
    return;
  }
  // Retry once the current transmission clears the air.
  sim_.schedule_in(1, [this, bytes, src, dst, cb = std::move(on_deliver)]() mutable {
    send_when_free(bytes, src, dst, std::move(cb));
  });
}

std::optional<Rig::Reply> Rig::exchange(int client, wire::ControlType request) {
  ClientState& state = clients_[client - 1];
  const StationModel& model = station_models_[client - 1];
  const auto& cfg = channel_.config();

  auto reply = std::make_shared<std::optional<Reply>>();

  send_when_free(
      static_cast<int>(wire::kControlLen), kMaster, client_name(client),
      [this, client, request, reply, &state, &model, &cfg](std::int64_t delivered) {
        // Client-side handling of the request. The reply content is fixed at
        // receipt; the delay models the handler (control frames answer from
        // the radio interrupt, measurement replies wait on the readout).
        std::int64_t delay = cfg.control_reply_delay_us;
        std::vector<std::uint8_t> frame;
        switch (request) {
          case wire::ControlType::Ping:
            state.last_ping_stamp = model.client_clock(delivered);
            frame = wire::encode_control(wire::ControlType::Ack, client);
            break;
          case wire::ControlType::TimeRequest:
            frame = wire::encode_time_reply(client, state.last_ping_stamp);
            break;
          case wire::ControlType::MeasRequest:
            if (state.unsent.has_value()) {
              frame = wire::encode_measurement(client, *state.unsent);
              state.unsent.reset();
              delay = cfg.data_reply_delay_us;
            } else {
              frame = wire::encode_control(wire::ControlType::NoData, client);
            }
            break;
          default:
            throw Error("master sent an unexpected request type");
        }
        sim_.schedule_in(delay, [this, client, reply, frame] {
          send_when_free(static_cast<int>(frame.size()), client_name(client), kMaster,
                         [reply, frame](std::int64_t t) {
                           *reply = Reply{t, frame};
                         });
        });
      });

  const std::int64_t deadline = sim_.now() + cfg.reply_timeout_us;
  sim_.pump_until(deadline, [reply] { return reply->has_value(); });
  return *reply;
}

std::optional<SyncCycle> Rig::sync_cycle(int client) {
  const std::int64_t t_b = sim_.now();
  auto ack = exchange(client, wire::ControlType::Ping);
  if (!ack) return std::nullopt;
  const std::int64_t t_e = ack->delivered_us;

  auto time_reply = exchange(client, wire::ControlType::TimeRequest);
  if (!time_reply) return std::nullopt;
  auto [id, t_i] = wire::decode_time_reply(time_reply->payload);
  if (id != client) throw Error("time reply from the wrong client");

  return SyncCycle{Timestamp(t_b), Timestamp(t_e), t_i};
}

std::vector<SyncCycle> Rig::run_cycles(int client, int n_cycles, const char* what) {
  std::vector<SyncCycle> cycles;
  cycles.reserve(n_cycles);
  int consecutive_failures = 0;
  while (static_cast<int>(cycles.size()) < n_cycles) {
    auto c = sync_cycle(client);
    if (!c) {
      if (++consecutive_failures > sync_params_.cycle_retries) {
        throw SyncTimeoutError(std::string(what) + " with station " + std::to_string(client) +
                               " timed out on cycle " + std::to_string(cycles.size() + 1));
      }
      continue;  // lost a message; retry the cycle
    }
    consecutive_failures = 0;
    cycles.push_back(*c);
  }
  return cycles;
}

SkewEstimate Rig::run_initial_sync(int client, int n_cycles) {
  const std::vector<SyncCycle> cycles = run_cycles(client, n_cycles, "initial sync");
  SkewEstimate est = initial_estimate(cycles, sync_params_.filter_weight);
  skews_[client - 1] = est;
  clients_[client - 1].last_sync_us = sim_.now();
  skew_timelines_[client - 1].push_back({sim_.now(), est.delta_us});
  return est;
}

SkewEstimate Rig::run_resync(int client, const SkewEstimate& estimate, int n_cycles) {
  if (!estimate.initialized) {
    throw UninitializedError("resync requested before initial synchronization");
  }
  const std::vector<SyncCycle> cycles = run_cycles(client, n_cycles, "resync");
  SkewEstimate est = update_correction(mean_skew(cycles), estimate);
  skews_[client - 1] = est;
  clients_[client - 1].last_sync_us = sim_.now();
  skew_timelines_[client - 1].push_back({sim_.now(), est.delta_us});
  return est;
}

std::vector<RawMeasurement> Rig::poll_round() {
  std::vector<RawMeasurement> delivered;
  for (int client = 1; client <= 3; ++client) {
    auto reply = exchange(client, wire::ControlType::MeasRequest);
    if (!reply) continue;  // unresponsive this round; move on
    if (reply->payload.size() == wire::kMeasurementLen) {
      auto [id, m] = wire::decode_measurement(reply->payload);
      if (id != client) throw Error("measurement reply from the wrong client");
      delivered.push_back(m);
      measurements_.push_back({m, reply->delivered_us});
    }
  }
  return delivered;
}

void Rig::run() {
  for (int client = 1; client <= 3; ++client) {
    run_initial_sync(client, sync_params_.initial_cycles);
  }
  const std::int64_t resync_period_us = std::llround(sync_params_.resync_period_s * 1e6);
  while (sim_.now() < duration_us_) {
    for (int client = 1; client <= 3; ++client) {
      if (sim_.now() - clients_[client - 1].last_sync_us >= resync_period_us) {
        try {
          run_resync(client, skews_[client - 1], sync_params_.resync_cycles);
        } catch (const SyncTimeoutError&) {
          // Estimate unchanged; try again next period.
          clients_[client - 1].last_sync_us = sim_.now();
        }
      }
    }
    poll_round();
  }
}

double Rig::correction_at(int client, std::int64_t t_us) const {
  const auto& timeline = skew_timelines_[client - 1];
  if (timeline.empty()) {
    throw UninitializedError("no synchronization has run for station " + std::to_string(client));
  }
  double delta = timeline.front().delta_us;
  for (const auto& entry : timeline) {
    if (entry.t_us <= t_us) delta = entry.delta_us;
  }
  return delta;
}

}  // namespace gtf

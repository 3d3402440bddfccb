#ifndef GTF_RADIO_HPP
#define GTF_RADIO_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "gtf/errors.hpp"

namespace gtf {

// Single-channel long-range radio parameters. Byte rate and message length
// follow the field radio setup; the reply delays model client-side handling:
// control frames are answered from the radio handler almost immediately,
// measurement replies wait for the instrument readout. The data reply delay
// default is what paces the polling loop to its real-world throughput.
struct ChannelConfig {
  double byte_rate_bps = 366.0;
  int measurement_msg_len = 34;
  std::int64_t jitter_us = 5000;  // per-message latency jitter, uniform in [-j, +j]
  double drop_probability = 0.0;
  // Per-link loss, keyed by peer name; overrides drop_probability on frames
  // to or from that peer (link quality differs station to station).
  std::map<std::string, double> link_drop_probability;
  std::int64_t control_reply_delay_us = 200;
  std::int64_t data_reply_delay_us = 616000;
  std::int64_t reply_timeout_us = 2000000;

  void validate() const {
    if (byte_rate_bps <= 0) throw ConfigError("byte_rate must be positive");
    if (drop_probability < 0.0 || drop_probability > 1.0) {
      throw ConfigError("drop_probability must be in [0, 1]");
    }
    if (measurement_msg_len <= 0) throw ConfigError("measurement_msg_len must be positive");
  }
};

// One row of the exported event log.
struct ChannelEvent {
  std::int64_t t_us = 0;
  std::string kind;  // "tx" at transmission start, "rx" at delivery
  std::string src;
  std::string dst;
  int bytes = 0;
  bool dropped = false;  // set on the rx row of a lost frame
};

using EventFn = std::function<void()>;

// Time-ordered event set; events at equal times dispatch in insertion order.
class EventQueue {
 public:
  void push(std::int64_t t_us, EventFn fn);
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::int64_t next_time() const;
  // Pops the earliest event (FIFO among equal times).
  std::pair<std::int64_t, EventFn> pop();

 private:
  struct Entry {
    std::int64_t t;
    std::uint64_t seq;
    // Heap entries must be copyable; the callable lives in a shared_ptr.
    std::shared_ptr<EventFn> fn;
    bool operator>(const Entry& other) const {
      return t != other.t ? t > other.t : seq > other.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::uint64_t next_seq_ = 0;
};

// Single-threaded discrete-event loop on a logical microsecond clock.
class Simulator {
 public:
  std::int64_t now() const { return now_us_; }

  void schedule_at(std::int64_t t_us, EventFn fn);
  void schedule_in(std::int64_t dt_us, EventFn fn) { schedule_at(now_us_ + dt_us, fn); }

  bool has_event_before(std::int64_t t_us) const {
    return !queue_.empty() && queue_.next_time() <= t_us;
  }

  // Dispatches the next event; returns false when the queue is empty.
  bool step();

  // Dispatches every event up to and including t_us, then parks the clock at
  // t_us.
  void run_until(std::int64_t t_us);

  // Pumps events until `done` returns true or the clock would pass
  // `deadline_us`. Returns the final value of done().
  bool pump_until(std::int64_t deadline_us, const std::function<bool()>& done);

 private:
  std::int64_t now_us_ = 0;
  EventQueue queue_;
};

// Half-duplex radio channel. At most one frame is in flight; transmitting
// while busy throws ChannelBusyError and the caller retries after the current
// transmission. Frame losses still occupy the air for their nominal duration.
class Channel {
 public:
  Channel(const ChannelConfig& config, std::mt19937_64 rng)
      : config_(config), rng_(std::move(rng)) {
    config_.validate();
  }

  const ChannelConfig& config() const { return config_; }

  // Nominal transmission duration of a frame, microseconds.
  std::int64_t transmission_us(int bytes) const;

  // Schedules delivery of a frame; `on_deliver` runs at delivery time unless
  // the frame is dropped. Returns the nominal busy-until time.
  std::int64_t transmit(Simulator& sim, int bytes, const std::string& src,
                        const std::string& dst, std::function<void(std::int64_t)> on_deliver);

  bool busy(std::int64_t now_us) const { return now_us < busy_until_us_; }

  const std::vector<ChannelEvent>& log() const { return log_; }
  std::vector<ChannelEvent>& log() { return log_; }

 private:
  ChannelConfig config_;
  std::mt19937_64 rng_;
  std::int64_t busy_until_us_ = 0;
  std::vector<ChannelEvent> log_;
};

}  // namespace gtf

#endif  // GTF_RADIO_HPP

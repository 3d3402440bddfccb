#include "gtf/radio.hpp"

#include <cmath>

namespace gtf {

void EventQueue::push(std::int64_t t_us, EventFn fn) {
  heap_.push(Entry{t_us, next_seq_++, std::make_shared<EventFn>(std::move(fn))});
}

std::int64_t EventQueue::next_time() const {
  if (heap_.empty()) throw Error("event queue is empty");
  return heap_.top().t;
}

std::pair<std::int64_t, EventFn> EventQueue::pop() {
  if (heap_.empty()) throw Error("event queue is empty");
  Entry e = heap_.top();
  heap_.pop();
  return {e.t, std::move(*e.fn)};
}

void Simulator::schedule_at(std::int64_t t_us, EventFn fn) {
  if (t_us < now_us_) throw Error("cannot schedule an event in the past");
  queue_.push(t_us, std::move(fn));
}

bool Simulator::step() {
  if (queue_.empty()) return false;
  auto [t, fn] = queue_.pop();
  now_us_ = t;
  fn();
  return true;
}

void Simulator::run_until(std::int64_t t_us) {
  while (!queue_.empty() && queue_.next_time() <= t_us) {
    step();
  }
  if (t_us > now_us_) now_us_ = t_us;
}

bool Simulator::pump_until(std::int64_t deadline_us, const std::function<bool()>& done) {
  while (!done()) {
    if (!has_event_before(deadline_us)) {
      if (deadline_us > now_us_) now_us_ = deadline_us;
      return done();
    }
    step();
  }
  return true;
}

std::int64_t Channel::transmission_us(int bytes) const {
  return std::llround(static_cast<double>(bytes) * 1e6 / config_.byte_rate_bps);
}

std::int64_t Channel::transmit(Simulator& sim, int bytes, const std::string& src,
                               const std::string& dst,
                               std::function<void(std::int64_t)> on_deliver) {
  const std::int64_t now = sim.now();
  if (busy(now)) {
    throw ChannelBusyError("channel busy until " + std::to_string(busy_until_us_));
  }

  const std::int64_t nominal = now + transmission_us(bytes);
  std::int64_t delivery = nominal;
  if (config_.jitter_us > 0) {
    std::uniform_int_distribution<std::int64_t> jitter(-config_.jitter_us, config_.jitter_us);
    delivery = std::max(now, nominal + jitter(rng_));
  }
  double p_drop = config_.drop_probability;
  if (auto it = config_.link_drop_probability.find(src);
      it != config_.link_drop_probability.end()) {
    p_drop = std::max(p_drop, it->second);
  }
  if (auto it = config_.link_drop_probability.find(dst);
      it != config_.link_drop_probability.end()) {
    p_drop = std::max(p_drop, it->second);
  }
  bool dropped = false;
  if (p_drop > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    dropped = u(rng_) < p_drop;
  }

  busy_until_us_ = std::max(nominal, delivery);
  log_.push_back({now, "tx", src, dst, bytes, false});
  log_.push_back({delivery, "rx", src, dst, bytes, dropped});

  if (!dropped) {
    sim.schedule_at(delivery, [cb = std::move(on_deliver), delivery] { cb(delivery); });
  }
  return busy_until_us_;
}

}  // namespace gtf

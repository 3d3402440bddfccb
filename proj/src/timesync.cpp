#include "gtf/timesync.hpp"

#include <cmath>

#include "gtf/errors.hpp"

namespace gtf {

Timestamp midpoint(Timestamp t_b, Timestamp t_e) {
  if (t_b > t_e) {
    throw OrderingError("midpoint: t_b > t_e");
  }
  // Non-negative stamps: integer halving floors, which lands the .5 tie on
  // the t_b side.
  return Timestamp(t_b.micros + (t_e.micros - t_b.micros) / 2);
}

double mean_skew(const std::vector<SyncCycle>& cycles) {
  if (cycles.empty()) {
    throw InsufficientDataError("mean_skew: no cycles");
  }
  double sum = 0.0;
  for (const auto& c : cycles) {
    sum += static_cast<double>(c.t_i - midpoint(c.t_b, c.t_e));
  }
  return sum / static_cast<double>(cycles.size());
}

SkewEstimate update_correction(double d_bar_us, const SkewEstimate& prev) {
  if (!prev.initialized) {
    throw UninitializedError("update_correction before initial synchronization");
  }
  SkewEstimate next = prev;
  next.delta_us = prev.filter_weight * d_bar_us + (1.0 - prev.filter_weight) * prev.delta_us;
  next.resync_count = prev.resync_count + 1;
  next.history.push_back(d_bar_us);
  return next;
}

SkewEstimate initial_estimate(const std::vector<SyncCycle>& cycles, double filter_weight) {
  SkewEstimate est;
  est.delta_us = mean_skew(cycles);
  est.filter_weight = filter_weight;
  est.resync_count = 0;
  est.history.push_back(est.delta_us);
  est.initialized = true;
  return est;
}

Timestamp apply_correction(Timestamp t_client, const SkewEstimate& estimate) {
  if (!estimate.initialized) {
    throw UninitializedError("apply_correction before initial synchronization");
  }
  return Timestamp(t_client.micros - std::llround(estimate.delta_us));
}

}  // namespace gtf

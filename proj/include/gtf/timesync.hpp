#ifndef GTF_TIMESYNC_HPP
#define GTF_TIMESYNC_HPP

#include <cstdint>
#include <vector>

#include "gtf/types.hpp"

namespace gtf {

// One completed four-message synchronization cycle: the master's bracket
// timestamps and the client timestamp captured between them.
struct SyncCycle {
  Timestamp t_b;  // master clock, request sent
  Timestamp t_e;  // master clock, confirmation received
  Timestamp t_i;  // client clock, captured on request receipt
};

// Per-client clock correction state. `delta` is the correction currently
// applied to incoming client timestamps, defined as client minus master,
// hence subtracted. Fractional microseconds are kept so the recursive filter
// converges exactly.
struct SkewEstimate {
  double delta_us = 0.0;
  int resync_count = 0;         // j: number of filtered updates applied
  double filter_weight = 0.1;   // w; new evidence weight, kept << 0.5
  std::vector<double> history;  // per-resync averages (d-bar values)
  bool initialized = false;
};

// Midpoint of the master-side bracket, rounded to the nearest microsecond
// with the half-microsecond tie broken toward t_b. Throws OrderingError when
// t_b > t_e.
Timestamp midpoint(Timestamp t_b, Timestamp t_e);

// Mean of (t_i - midpoint(t_b, t_e)) over the cycles, in microseconds.
// Throws InsufficientDataError on an empty list.
double mean_skew(const std::vector<SyncCycle>& cycles);

// Recursive low-pass update: delta <- w * d_bar + (1 - w) * delta.
// Only legal after an initial synchronization has seeded the estimate.
SkewEstimate update_correction(double d_bar_us, const SkewEstimate& prev);

// Seed an estimate directly from the initial cycles (no filtering).
SkewEstimate initial_estimate(const std::vector<SyncCycle>& cycles, double filter_weight);

// Map a client timestamp onto the master clock: t_client - delta, rounded to
// the nearest microsecond.
Timestamp apply_correction(Timestamp t_client, const SkewEstimate& estimate);

}  // namespace gtf

#endif  // GTF_TIMESYNC_HPP

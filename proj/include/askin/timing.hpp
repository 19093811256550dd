#pragma once

#include <cstdint>

namespace askin {

/// Fixed-rate event source driven by a fixed simulation step.
///
/// Phase is kept in integer units of (microseconds x Hz) so that a timer of
/// rate f stepped N times at dt fires exactly floor((N - 1) * dt * f) + 1
/// times: it fires on the first step, then whenever a full period has
/// accumulated, subtracting the period so there is no long-run drift.
class PeriodicTimer {
 public:
  PeriodicTimer(int rate_hz, double dt);

  /// Advances one step; true when the timer fires on this step.
  bool tick();

  int rate_hz() const { return rate_hz_; }
  std::int64_t firings() const { return firings_; }

 private:
  static constexpr std::int64_t kFullCycle = 1'000'000;

  int rate_hz_;
  std::int64_t step_units_;
  std::int64_t phase_ = kFullCycle;
  std::int64_t firings_ = 0;
};

/// Step size in whole microseconds; rejects steps that are not.
std::int64_t step_in_microseconds(double dt);

inline constexpr int kThresholdRateHz = 25;
inline constexpr double kThresholdPeriod = 1.0 / kThresholdRateHz;

/// 25 Hz threshold-update timer.
inline PeriodicTimer threshold_scheduler(double dt) { return PeriodicTimer(kThresholdRateHz, dt); }

}  // namespace askin

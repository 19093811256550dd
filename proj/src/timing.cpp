#include "askin/timing.hpp"

#include <cmath>

#include "askin/errors.hpp"

namespace askin {

std::int64_t step_in_microseconds(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("simulation step must be positive");
  const double us = dt * 1e6;
  const auto rounded = std::llround(us);
  if (rounded <= 0 || std::abs(us - static_cast<double>(rounded)) > 1e-6) {
    throw InvalidInput("simulation step must be a whole number of microseconds");
  }
  return rounded;
}

PeriodicTimer::PeriodicTimer(int rate_hz, double dt)
    : rate_hz_(rate_hz), step_units_(step_in_microseconds(dt) * rate_hz) {
  if (rate_hz <= 0) throw InvalidInput("timer rate must be positive");
}

bool PeriodicTimer::tick() {
  bool fired = false;
  if (phase_ >= kFullCycle) {
    phase_ -= kFullCycle;
    ++firings_;
    fired = true;
  }
  phase_ += step_units_;
  return fired;
}

}  // namespace askin

#include "stimforge/sync/clock.hpp"

#include <chrono>

#include "stimforge/common/error.hpp"

namespace stimforge::sync {

std::int64_t SystemClock::now_ms() const {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void VirtualClock::set(std::int64_t t_ms) {
  if (t_ms < now_.load()) throw Error(Errc::invalid_argument, "virtual clock cannot move backwards");
  now_.store(t_ms);
}

ClockSample estimate_offset(double t0, double t1, double t2, double t3) {
  const double rtt = (t3 - t0) - (t2 - t1);
  if (rtt < 0) throw Error(Errc::invalid_argument, "clock sample rejected: negative round trip");
  return {((t1 - t0) + (t2 - t3)) / 2, rtt};
}

bool ClockEstimator::add(double t0, double t1, double t2, double t3) {
  ClockSample s;
  try {
    s = estimate_offset(t0, t1, t2, t3);
  } catch (const Error&) {
    return false;
  }
  samples_.push_back(s);
  if (samples_.size() > window_) samples_.pop_front();
  ++total_;
  return true;
}

std::optional<ClockEstimate> ClockEstimator::estimate() const {
  if (samples_.empty()) return std::nullopt;
  const ClockSample* best = &samples_.front();
  for (const auto& s : samples_) {
    if (s.rtt_ms < best->rtt_ms) best = &s;
  }
  return ClockEstimate{best->offset_ms, best->rtt_ms, total_};
}

}  // namespace stimforge::sync

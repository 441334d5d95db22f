#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

namespace stimforge::sync {

/// Millisecond time source for sessions.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

/// UTC epoch milliseconds.
class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() const override;
};

/// Manually driven clock for headless runs and tests.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() const override { return now_.load(); }
  /// Throws invalid_argument when moving backwards.
  void set(std::int64_t t_ms);
  void advance(std::int64_t dt_ms) { set(now_.load() + dt_ms); }

 private:
  std::atomic<std::int64_t> now_;
};

/// One four-timestamp exchange: t0 subscriber send, t1 server receive,
/// t2 server send, t3 subscriber receive.
struct ClockSample {
  /// Server clock minus subscriber clock; add it to a subscriber
  /// timestamp to express it on the server clock.
  double offset_ms = 0;
  double rtt_ms = 0;
};

/// offset = ((t1 - t0) + (t2 - t3)) / 2, rtt = (t3 - t0) - (t2 - t1).
/// Throws invalid_argument when rtt is negative.
ClockSample estimate_offset(double t0, double t1, double t2, double t3);

struct ClockEstimate {
  double offset_ms = 0;
  double rtt_ms = 0;
  std::size_t sample_count = 0;
};

/// Keeps the last `window` samples and reports the one with the smallest
/// round trip, which carries the least queueing asymmetry.
class ClockEstimator {
 public:
  explicit ClockEstimator(std::size_t window = 8) : window_(window == 0 ? 1 : window) {}

  /// Returns false (and ignores the sample) when its rtt is negative.
  bool add(double t0, double t1, double t2, double t3);
  std::optional<ClockEstimate> estimate() const;
  std::size_t total_samples() const { return total_; }

 private:
  std::size_t window_;
  std::deque<ClockSample> samples_;
  std::size_t total_ = 0;
};

}  // namespace stimforge::sync

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "stimforge/trajectory/geometry.hpp"

namespace stimforge::trajectory {

enum class PursuitMode { Constant, Accelerating, Random, Circular, Wandering };

std::string_view to_string(PursuitMode mode);

struct PursuitParams {
  PursuitMode mode = PursuitMode::Constant;
  protocol::PursuitSettings settings;
  double target_diameter_deg = 1.0;
  std::uint64_t seed = 0;
};

PursuitParams pursuit_params(const protocol::SettingsPreset& settings, PursuitMode mode, std::uint64_t seed);

enum class PursuitState { Moving, Paused, Done };

struct PursuitSample {
  PursuitState state = PursuitState::Done;
  double x_px = 0;
  double y_px = 0;
  /// Trip (or revolution) index; for Paused, the trip just finished.
  int trip = 0;
};

/// One traversal. Linear modes move from `from` along `dir` with
/// s(tau) = v tau + a tau^2 / 2; circular trips are one revolution.
struct PursuitTrip {
  double start_ms = 0;
  double duration_ms = 0;
  double from_x = 0, from_y = 0;
  double dir_x = 0, dir_y = 0;
  double v_px_ms = 0;
  double a_px_ms2 = 0;
};

/// Trajectory for one pursuit step, a pure function of time once built.
///
/// Linear modes travel back and forth along the line through the interior
/// centre at `directionDeg`, end points inset by the target radius, with a
/// pause between trips. Speeds in deg/s are converted with deg_to_px of one
/// degree, so a displacement of v * dt degrees maps to deg_to_px-scaled
/// pixels exactly. Circular: theta(t) = +-2 pi t / period, position
/// = centre + (Rx cos theta, Ry sin theta) in viewport axes (y down);
/// ccw means increasing theta. Wandering: a heading random walk evaluated
/// on a 1 ms tick table, steered toward the centre inside the margin and
/// reflected at the bounds; positions between ticks are interpolated.
class PursuitTrajectory {
 public:
  /// Throws invalid_argument for parameters the display cannot realise.
  PursuitTrajectory(const PursuitParams& params, const protocol::SettingsPreset& settings);

  PursuitSample at(double t_ms) const;

  double duration_ms() const { return duration_ms_; }
  const std::vector<PursuitTrip>& trips() const { return trips_; }
  const DisplayGeometry& geometry() const { return geom_; }
  /// Region the target centre stays in: the interior inset by the target radius.
  const markers::Rect& bounds() const { return bounds_; }
  double px_per_deg() const { return px_per_deg_; }

 private:
  void position_in_trip(const PursuitTrip& trip, int index, double tau, double& x, double& y) const;

  PursuitParams params_;
  DisplayGeometry geom_;
  markers::Rect bounds_;
  double px_per_deg_ = 0;
  double duration_ms_ = 0;
  double cx_ = 0, cy_ = 0, rx_ = 0, ry_ = 0;
  std::vector<PursuitTrip> trips_;
  std::vector<double> wander_x_, wander_y_;
};

/// Stateless convenience over PursuitTrajectory.
PursuitSample pursuit_position(const PursuitParams& params, const protocol::SettingsPreset& settings, double t_ms);

struct PursuitLogSample {
  std::int64_t t_ms = 0;
  double x_px = 0;
  double y_px = 0;
  int trip = 0;
};

/// Moving-state samples at t = k * interval_ms over the whole trajectory.
std::vector<PursuitLogSample> pursuit_log_samples(const PursuitTrajectory& trajectory, int interval_ms);

}  // namespace stimforge::trajectory

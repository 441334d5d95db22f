#include "stimforge/trajectory/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stimforge/common/error.hpp"
#include "stimforge/common/rng.hpp"

namespace stimforge::trajectory {
namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::invalid_argument, "pursuit: " + msg); }

double wrap_angle(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a < -kPi) a += 2 * kPi;
  return a;
}

}  // namespace

std::string_view to_string(PursuitMode mode) {
  switch (mode) {
    case PursuitMode::Constant: return "constant";
    case PursuitMode::Accelerating: return "accelerating";
    case PursuitMode::Random: return "random";
    case PursuitMode::Circular: return "circular";
    case PursuitMode::Wandering: return "wandering";
  }
  return "constant";
}

PursuitParams pursuit_params(const protocol::SettingsPreset& s, PursuitMode mode, std::uint64_t seed) {
  PursuitParams p;
  p.mode = mode;
  p.settings = s.pursuit;
  p.target_diameter_deg = s.fixation_dot_size_deg;
  p.seed = seed;
  return p;
}

PursuitTrajectory::PursuitTrajectory(const PursuitParams& params, const protocol::SettingsPreset& settings)
    : params_(params), geom_(display_geometry(settings)) {
  const auto& ps = params.settings;
  px_per_deg_ = geom_.deg_to_px_x(1.0);
  const double radius = geom_.deg_to_px_x(params.target_diameter_deg) / 2;
  bounds_ = {geom_.interior.x0 + radius, geom_.interior.y0 + radius, geom_.interior.x1 - radius,
             geom_.interior.y1 - radius};
  if (!(bounds_.width() > 0) || !(bounds_.height() > 0)) fail("target does not fit the interior");
  cx_ = bounds_.center_x();
  cy_ = bounds_.center_y();
  if (ps.trips < 1 && params.mode != PursuitMode::Wandering) fail("trips must be >= 1");
  if (ps.pause_ms < 0) fail("pauseMs must be >= 0");

  const auto n_trips = static_cast<std::size_t>(std::max(ps.trips, 1));
  double t = 0;
  auto push = [&](PursuitTrip trip) {
    trip.start_ms = t;
    t += trip.duration_ms + ps.pause_ms;
    trips_.push_back(trip);
  };

  switch (params.mode) {
    case PursuitMode::Constant:
    case PursuitMode::Accelerating:
    case PursuitMode::Random: {
      const double dir = ps.direction_deg * kPi / 180.0;
      const double ux = std::cos(dir);
      const double uy = -std::sin(dir);  // counterclockwise on screen, y down
      double half = std::numeric_limits<double>::infinity();
      if (std::abs(ux) > 1e-12) half = std::min(half, bounds_.width() / 2 / std::abs(ux));
      if (std::abs(uy) > 1e-12) half = std::min(half, bounds_.height() / 2 / std::abs(uy));
      const double length = 2 * half;
      Rng rng(Rng::derive(params.seed, 3));
      if (params.mode == PursuitMode::Random) {
        if (!(ps.random_velocity_min_deg_s > 0) || ps.random_velocity_max_deg_s < ps.random_velocity_min_deg_s) {
          fail("random velocity range must satisfy 0 < min <= max");
        }
        if (ps.random_accel_min_deg_s2 < 0 || ps.random_accel_max_deg_s2 < ps.random_accel_min_deg_s2) {
          fail("random acceleration range must satisfy 0 <= min <= max");
        }
      }
      for (std::size_t k = 0; k < n_trips; ++k) {
        double v_deg = ps.velocity_deg_s;
        double a_deg = 0;
        if (params.mode == PursuitMode::Accelerating) v_deg += static_cast<double>(k) * ps.velocity_increment_deg_s;
        if (params.mode == PursuitMode::Random) {
          v_deg = rng.uniform(ps.random_velocity_min_deg_s, ps.random_velocity_max_deg_s);
          a_deg = rng.uniform(ps.random_accel_min_deg_s2, ps.random_accel_max_deg_s2);
        }
        if (!(v_deg > 0)) fail("trip " + std::to_string(k) + " velocity must be positive");
        PursuitTrip trip;
        const bool forward = k % 2 == 0;
        trip.dir_x = forward ? ux : -ux;
        trip.dir_y = forward ? uy : -uy;
        trip.from_x = cx_ - trip.dir_x * half;
        trip.from_y = cy_ - trip.dir_y * half;
        trip.v_px_ms = v_deg * px_per_deg_ / 1000.0;
        trip.a_px_ms2 = a_deg * px_per_deg_ / 1e6;
        if (trip.a_px_ms2 > 0) {
          const double v = trip.v_px_ms, a = trip.a_px_ms2;
          trip.duration_ms = (-v + std::sqrt(v * v + 2 * a * length)) / a;
        } else {
          trip.duration_ms = length / trip.v_px_ms;
        }
        push(trip);
      }
      break;
    }
    case PursuitMode::Circular: {
      if (ps.circular_period_ms <= 0) fail("circular period must be positive");
      if (!(ps.circular_radius_x_deg > 0) || !(ps.circular_radius_y_deg > 0)) fail("circular radii must be positive");
      rx_ = geom_.deg_to_px_x(ps.circular_radius_x_deg);
      ry_ = geom_.deg_to_px_y(ps.circular_radius_y_deg);
      if (rx_ > bounds_.width() / 2 || ry_ > bounds_.height() / 2) fail("circular orbit exceeds the interior");
      for (std::size_t k = 0; k < n_trips; ++k) {
        PursuitTrip trip;
        trip.duration_ms = ps.circular_period_ms;
        push(trip);
      }
      break;
    }
    case PursuitMode::Wandering: {
      if (ps.wander_duration_ms <= 0) fail("wander duration must be positive");
      if (!(ps.velocity_deg_s > 0)) fail("velocity must be positive");
      if (ps.wander_heading_sigma_deg < 0 || ps.wander_margin_deg < 0) fail("wander sigma and margin must be >= 0");
      const double step = ps.velocity_deg_s * px_per_deg_ / 1000.0;
      const double sigma = ps.wander_heading_sigma_deg * kPi / 180.0;
      const double margin = std::min(geom_.deg_to_px_x(ps.wander_margin_deg),
                                     std::min(bounds_.width(), bounds_.height()) / 2);
      Rng rng(Rng::derive(params.seed, 4));
      double heading = rng.uniform(-kPi, kPi);
      double x = cx_, y = cy_;
      const auto ticks = static_cast<std::size_t>(ps.wander_duration_ms);
      wander_x_.reserve(ticks + 1);
      wander_y_.reserve(ticks + 1);
      wander_x_.push_back(x);
      wander_y_.push_back(y);
      for (std::size_t i = 0; i < ticks; ++i) {
        heading += sigma * std::clamp(rng.normal(), -3.0, 3.0);
        const double clearance =
            std::min({x - bounds_.x0, bounds_.x1 - x, y - bounds_.y0, bounds_.y1 - y});
        if (margin > 0 && clearance < margin) {
          // Turn toward the centre, harder the deeper into the margin.
          const double to_center = std::atan2(cy_ - y, cx_ - x);
          const double depth = 1.0 - std::max(clearance, 0.0) / margin;
          heading += 0.05 * depth * wrap_angle(to_center - heading);
        }
        heading = wrap_angle(heading);
        x += step * std::cos(heading);
        y += step * std::sin(heading);
        if (x < bounds_.x0 || x > bounds_.x1) {
          heading = wrap_angle(kPi - heading);
          x = std::clamp(x, bounds_.x0, bounds_.x1);
        }
        if (y < bounds_.y0 || y > bounds_.y1) {
          heading = wrap_angle(-heading);
          y = std::clamp(y, bounds_.y0, bounds_.y1);
        }
        wander_x_.push_back(x);
        wander_y_.push_back(y);
      }
      PursuitTrip trip;
      trip.duration_ms = ps.wander_duration_ms;
      trip.from_x = cx_;
      trip.from_y = cy_;
      trips_.push_back(trip);
      t = trip.duration_ms + ps.pause_ms;
      break;
    }
  }
  duration_ms_ = t - ps.pause_ms;  // no pause after the last trip
}

void PursuitTrajectory::position_in_trip(const PursuitTrip& trip, int index, double tau, double& x,
                                         double& y) const {
  tau = std::clamp(tau, 0.0, trip.duration_ms);
  switch (params_.mode) {
    case PursuitMode::Constant:
    case PursuitMode::Accelerating:
    case PursuitMode::Random: {
      const double s = trip.v_px_ms * tau + 0.5 * trip.a_px_ms2 * tau * tau;
      x = trip.from_x + trip.dir_x * s;
      y = trip.from_y + trip.dir_y * s;
      return;
    }
    case PursuitMode::Circular: {
      const double sign = params_.settings.circular_direction == protocol::Rotation::CounterClockwise ? 1.0 : -1.0;
      const double theta = sign * 2 * kPi * tau / trip.duration_ms;
      x = cx_ + rx_ * std::cos(theta);
      y = cy_ + ry_ * std::sin(theta);
      return;
    }
    case PursuitMode::Wandering: {
      const auto i = static_cast<std::size_t>(std::floor(tau));
      if (i + 1 >= wander_x_.size()) {
        x = wander_x_.back();
        y = wander_y_.back();
        return;
      }
      const double f = tau - static_cast<double>(i);
      x = wander_x_[i] + f * (wander_x_[i + 1] - wander_x_[i]);
      y = wander_y_[i] + f * (wander_y_[i + 1] - wander_y_[i]);
      return;
    }
  }
  (void)index;
}

PursuitSample PursuitTrajectory::at(double t_ms) const {
  if (!(t_ms >= 0)) throw Error(Errc::invalid_argument, "pursuit: t must be >= 0");
  PursuitSample out;
  for (std::size_t k = trips_.size(); k-- > 0;) {
    const auto& trip = trips_[k];
    if (t_ms < trip.start_ms) continue;
    const double tau = t_ms - trip.start_ms;
    out.trip = static_cast<int>(k);
    position_in_trip(trip, out.trip, tau, out.x_px, out.y_px);
    if (tau < trip.duration_ms) {
      out.state = PursuitState::Moving;
    } else {
      out.state = k + 1 == trips_.size() ? PursuitState::Done : PursuitState::Paused;
    }
    return out;
  }
  return out;
}

PursuitSample pursuit_position(const PursuitParams& params, const protocol::SettingsPreset& settings, double t_ms) {
  return PursuitTrajectory(params, settings).at(t_ms);
}

std::vector<PursuitLogSample> pursuit_log_samples(const PursuitTrajectory& trajectory, int interval_ms) {
  if (interval_ms <= 0) throw Error(Errc::invalid_argument, "pursuit: sample interval must be positive");
  std::vector<PursuitLogSample> out;
  for (std::int64_t t = 0; static_cast<double>(t) < trajectory.duration_ms(); t += interval_ms) {
    const auto s = trajectory.at(static_cast<double>(t));
    if (s.state == PursuitState::Moving) out.push_back({t, s.x_px, s.y_px, s.trip});
  }
  return out;
}

}  // namespace stimforge::trajectory

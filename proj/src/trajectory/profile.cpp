#include "stimforge/trajectory/profile.hpp"

#include <cmath>
#include <numbers>

#include "stimforge/common/error.hpp"

namespace stimforge::trajectory {

using protocol::DotType;

TargetProfile profile_from_settings(const protocol::SettingsPreset& s) {
  TargetProfile p;
  p.kind = s.fixation_dot_type;
  p.diameter_deg = s.fixation_dot_size_deg;
  p.point_diameter_deg = s.target.point_diameter_deg;
  p.sigma_deg = s.target.gaussian_sigma_deg;
  p.ccp_outer_deg = s.target.ccp_outer_diameter_deg;
  p.ccp_cross_width_deg = s.target.ccp_cross_width_deg;
  p.ccp_center_dot_deg = s.target.ccp_center_dot_deg;
  p.bessel_cycles_per_deg = s.target.bessel_cycles_per_deg;
  p.polarity = s.polarity;
  p.color_rgba = s.dot_color_rgba;
  p.opacity = s.target.opacity;
  return p;
}

double target_intensity(const TargetProfile& p, double r_deg, double phi_rad) {
  if (!(r_deg >= 0)) throw Error(Errc::invalid_argument, "target_intensity: radius must be >= 0");
  switch (p.kind) {
    case DotType::Point: return r_deg <= p.point_diameter_deg / 2 ? 1.0 : 0.0;
    case DotType::Circle: return r_deg <= p.diameter_deg / 2 ? 1.0 : 0.0;
    case DotType::Gaussian: return std::exp(-r_deg * r_deg / (2 * p.sigma_deg * p.sigma_deg));
    case DotType::CCP: {
      if (r_deg <= p.ccp_center_dot_deg / 2) return 1.0;
      if (r_deg > p.ccp_outer_deg / 2) return 0.0;
      const double half = p.ccp_cross_width_deg / 2;
      const double x = r_deg * std::cos(phi_rad);
      const double y = r_deg * std::sin(phi_rad);
      return std::abs(x) < half || std::abs(y) < half ? 0.0 : 1.0;
    }
    case DotType::Bessel:
      if (r_deg > p.diameter_deg / 2) return 0.0;
      return std::max(0.0, std::cos(2 * std::numbers::pi * p.bessel_cycles_per_deg * r_deg));
  }
  return 0.0;
}

double target_intensity(const TargetProfile& p, double r_deg) {
  return target_intensity(p, r_deg, std::numbers::pi / 4);
}

std::array<double, 2> polarity_levels(protocol::Polarity polarity) {
  return polarity == protocol::Polarity::DarkOnGray ? std::array{0.5, 0.0} : std::array{0.0, 1.0};
}

double luminance(const TargetProfile& p, double r_deg, double phi_rad) {
  const auto [bg, fg] = polarity_levels(p.polarity);
  return bg + target_intensity(p, r_deg, phi_rad) * p.opacity * (fg - bg);
}

double support_radius_deg(const TargetProfile& p) {
  switch (p.kind) {
    case DotType::Point: return p.point_diameter_deg / 2;
    case DotType::Circle:
    case DotType::Bessel: return p.diameter_deg / 2;
    case DotType::Gaussian: return 3 * p.sigma_deg;
    case DotType::CCP: return p.ccp_outer_deg / 2;
  }
  return 0.0;
}

std::vector<double> radial_lut(const TargetProfile& p, int samples) {
  if (samples < 2) throw Error(Errc::invalid_argument, "radial_lut: need at least 2 samples");
  const double rmax = support_radius_deg(p);
  std::vector<double> out(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) out[static_cast<std::size_t>(i)] = target_intensity(p, rmax * i / (samples - 1));
  return out;
}

}  // namespace stimforge::trajectory

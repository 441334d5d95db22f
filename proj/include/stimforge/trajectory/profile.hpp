#pragma once

#include <array>
#include <vector>

#include "stimforge/protocol/settings.hpp"

namespace stimforge::trajectory {

/// Radial appearance of a fixation target. Sizes are diameters in degrees.
struct TargetProfile {
  protocol::DotType kind = protocol::DotType::Circle;
  double diameter_deg = 1.0;  // Circle, Bessel support
  double point_diameter_deg = 0.15;
  double sigma_deg = 0.25;
  double ccp_outer_deg = 0.6;
  double ccp_cross_width_deg = 0.2;
  double ccp_center_dot_deg = 0.2;
  double bessel_cycles_per_deg = 3.0;
  protocol::Polarity polarity = protocol::Polarity::DarkOnGray;
  std::array<double, 4> color_rgba{0, 0, 0, 1};
  double opacity = 1.0;
};

TargetProfile profile_from_settings(const protocol::SettingsPreset& settings);

/// Foreground intensity in [0, 1] at eccentricity r_deg along polar angle
/// phi (radians, 0 = +x). Only CCP depends on phi: the crosshair gap
/// removes points with |x| or |y| below half the cross width outside the
/// centre dot.
///
/// Bessel targets are rectified cosine rings max(0, cos(2 pi f r)) within
/// half the target diameter.
double target_intensity(const TargetProfile& profile, double r_deg, double phi_rad);

/// Radial form; CCP is evaluated on the diagonal, away from the gap.
double target_intensity(const TargetProfile& profile, double r_deg);

/// Grey levels for {background, foreground}: dark-on-gray is {0.5, 0},
/// light-on-dark is {0, 1}.
std::array<double, 2> polarity_levels(protocol::Polarity polarity);

/// Displayed luminance level: background blended towards foreground by
/// intensity times opacity.
double luminance(const TargetProfile& profile, double r_deg, double phi_rad);

/// Radius beyond which intensity is zero (3 sigma for Gaussian).
double support_radius_deg(const TargetProfile& profile);

/// Intensity sampled at `samples` radii evenly spaced over [0, support].
std::vector<double> radial_lut(const TargetProfile& profile, int samples);

}  // namespace stimforge::trajectory

#include "stimforge/markers/pose.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <set>

#include "stimforge/common/error.hpp"

namespace stimforge::markers {
namespace {

/// Similarity transform moving the centroid to the origin and scaling the
/// mean distance to sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 0 ? std::sqrt(2.0) / dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
  return t;
}

Eigen::Vector2d apply(const Eigen::Matrix3d& t, const Eigen::Vector2d& p) {
  const Eigen::Vector3d q = t * p.homogeneous();
  return q.hnormalized();
}

/// Homography mapping `src` to `dst` (both already undistorted).
Eigen::Matrix3d dlt_homography(const std::vector<Eigen::Vector2d>& src, const std::vector<Eigen::Vector2d>& dst) {
  const Eigen::Matrix3d ts = normalizing_transform(src);
  const Eigen::Matrix3d td = normalizing_transform(dst);
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d p = apply(ts, src[i]);
    const Eigen::Vector2d q = apply(td, dst[i]);
    a.row(2 * i) << -p.x(), -p.y(), -1, 0, 0, 0, q.x() * p.x(), q.x() * p.y(), q.x();
    a.row(2 * i + 1) << 0, 0, 0, -p.x(), -p.y(), -1, q.y() * p.x(), q.y() * p.y(), q.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A rank below 8 means the correspondences do not pin down a unique plane mapping.
  if (sv(7) <= 1e-10 * sv(0)) {
    throw Error(Errc::singular_configuration, "pose: degenerate marker configuration (homography not unique)");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return td.inverse() * hn * ts;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

}  // namespace

std::array<std::array<double, 2>, 4> project_marker_corners(const EdgeMarker& marker, const ScreenPose& pose,
                                                            const CameraIntrinsics& intr, Viewport viewport) {
  std::array<std::array<double, 2>, 4> out{};
  const auto corners = marker.corners();
  for (std::size_t i = 0; i < 4; ++i) {
    const Eigen::Vector3d p = pose.rotation * pixel_to_plane(pose, corners[i][0], corners[i][1], viewport) +
                              pose.translation_cm;
    const Eigen::Vector2d uv = project_to_image(intr, p);
    out[i] = {uv.x(), uv.y()};
  }
  return out;
}

ScreenPose estimate_screen_pose(std::span<const DetectionRecord> detections, const MarkerPlan& plan,
                                const CameraIntrinsics& intr, double screen_w_cm, double screen_h_cm,
                                const PoseOptions& options) {
  intr.validate();
  if (!(screen_w_cm > 0) || !(screen_h_cm > 0)) {
    throw Error(Errc::invalid_argument, "pose: screen dimensions must be positive");
  }
  ScreenPose pose;
  pose.px_per_cm_x = plan.viewport_w_px / screen_w_cm;
  pose.px_per_cm_y = plan.viewport_h_px / screen_h_cm;
  const Viewport viewport{plan.viewport_w_px, plan.viewport_h_px};

  std::vector<Eigen::Vector2d> plane_pts;
  std::vector<Eigen::Vector2d> image_pts;
  std::vector<Eigen::Vector2d> pixel_pts;
  std::vector<Eigen::Vector2d> centers;
  std::set<int> used;
  for (const auto& d : detections) {
    const EdgeMarker* m = plan.find_edge(d.marker_id);
    if (m == nullptr || !used.insert(d.marker_id).second) continue;
    const auto corners = m->corners();
    for (std::size_t i = 0; i < 4; ++i) {
      plane_pts.push_back(pixel_to_plane(pose, corners[i][0], corners[i][1], viewport).head<2>());
      pixel_pts.emplace_back(d.corners[i][0], d.corners[i][1]);
      image_pts.push_back(image_to_normalized(intr, pixel_pts.back()));
    }
    centers.push_back(pixel_to_plane(pose, m->center_x, m->center_y, viewport).head<2>());
  }
  if (used.size() < 4) {
    throw Error(Errc::singular_configuration,
                "pose: need at least 4 distinct edge markers, got " + std::to_string(used.size()));
  }

  // Collinear marker centres leave the plane orientation about that line undetermined.
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& c : centers) mean += c;
  mean /= static_cast<double>(centers.size());
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& c : centers) scatter += (c - mean) * (c - mean).transpose();
  const Eigen::Vector2d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter).eigenvalues();
  if (eig(0) <= 1e-9 * eig(1)) {
    throw Error(Errc::singular_configuration, "pose: detected edge markers are collinear");
  }

  const Eigen::Matrix3d h = dlt_homography(plane_pts, image_pts);
  double lambda = 2.0 / (h.col(0).norm() + h.col(1).norm());
  if (h(2, 2) * lambda < 0) lambda = -lambda;  // plane must lie in front of the camera
  Eigen::Matrix3d r;
  r.col(0) = lambda * h.col(0);
  r.col(1) = lambda * h.col(1);
  r.col(2) = r.col(0).cross(r.col(1));
  pose.rotation = nearest_rotation(r);
  pose.translation_cm = lambda * h.col(2);

  double sq = 0;
  for (std::size_t i = 0; i < plane_pts.size(); ++i) {
    const Eigen::Vector3d p = pose.rotation * Eigen::Vector3d(plane_pts[i].x(), plane_pts[i].y(), 0) +
                              pose.translation_cm;
    sq += (project_to_image(intr, p) - pixel_pts[i]).squaredNorm();
  }
  pose.reprojection_rms_px = std::sqrt(sq / static_cast<double>(plane_pts.size()));
  if (pose.reprojection_rms_px > options.max_reprojection_rms_px) {
    throw Error(Errc::poor_quality, "pose: reprojection RMS " + std::to_string(pose.reprojection_rms_px) +
                                        " px exceeds " + std::to_string(options.max_reprojection_rms_px) + " px");
  }
  return pose;
}

}  // namespace stimforge::markers

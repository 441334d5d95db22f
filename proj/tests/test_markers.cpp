#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "stimforge/common/rng.hpp"
#include "stimforge/engine/runner.hpp"
#include "stimforge/markers/alignment.hpp"
#include "stimforge/markers/camera.hpp"
#include "stimforge/markers/ids.hpp"
#include "stimforge/markers/layout.hpp"
#include "stimforge/markers/pose.hpp"
#include "stimforge/trajectory/geometry.hpp"
#include "support.hpp"

using namespace stimforge;
using namespace stimforge::markers;
using protocol::TaskType;

namespace {

ScreenPose make_pose(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  ScreenPose p;
  p.rotation = r;
  p.translation_cm = t;
  p.px_per_cm_x = 1920 / 60.5;
  p.px_per_cm_y = 1080 / 33.5;
  return p;
}

/// One frame of all 14 edge markers projected with `pose`.
std::vector<DetectionRecord> edge_frame(const MarkerPlan& plan, const ScreenPose& pose, const CameraIntrinsics& intr) {
  std::vector<DetectionRecord> out;
  for (const auto& m : plan.edge_markers) {
    out.push_back({0.0, m.marker_id, project_marker_corners(m, pose, intr, {plan.viewport_w_px, plan.viewport_h_px})});
  }
  return out;
}

double rotation_error(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) { return (a - b).norm(); }

/// A short log with fixation and pursuit steps, for the camera simulator.
std::vector<eventlog::LogEntry> small_log() {
  auto flow = testing::one_step_flow(TaskType::FixationHorizontal);
  protocol::FlowStep s;
  s.step_id = "p";
  s.task_type = TaskType::PursuitConstant;
  flow.steps.push_back(s);
  s.step_id = "f2";
  s.task_type = TaskType::FixationVertical;
  flow.steps.push_back(s);
  return engine::run_headless(flow, {}).entries;
}

}  // namespace

TEST_CASE("marker allocation") {
  SUBCASE("deterministic") {
    CHECK(allocate_task_markers(TaskType::Vergence, 3) == allocate_task_markers(TaskType::Vergence, 3));
  }
  SUBCASE("horizontal fixation block contains 49") {
    const auto p0 = allocate_task_markers(TaskType::FixationHorizontal, 0);
    const int block = p0.start_id / kBlockSize;
    CHECK(49 / kBlockSize == block);
    bool found = false;
    for (int i = 0; i < kInstancesPerTaskType; ++i) {
      if (allocate_task_markers(TaskType::FixationHorizontal, i).start_id == 49) found = true;
    }
    CHECK(found);
    CHECK(describe_marker(49).find("fixation-horizontal") != std::string::npos);
  }
  SUBCASE("exhaustive scan is injective and avoids the edge IDs") {
    std::set<int> seen;
    int count = 0;
    for (const auto t : protocol::all_task_types()) {
      if (!protocol::carries_markers(t)) {
        CHECK_THROWS_AS(allocate_task_markers(t, 0), Error);
        continue;
      }
      for (int i = 0; i < kInstancesPerTaskType; ++i) {
        const auto p = allocate_task_markers(t, i);
        CHECK(p.start_id != p.end_id);
        for (const int id : {p.start_id, p.end_id}) {
          CHECK(id >= kEdgeMarkerCount);
          CHECK(id < kSlippageMarkerBase);
          seen.insert(id);
          ++count;
        }
      }
    }
    for (int k = 1; k <= kSlippageSteps; ++k) {
      seen.insert(slippage_step_marker(k));
      ++count;
    }
    for (int d = 0; d < kMaxVergenceDepths; ++d) {
      seen.insert(vergence_depth_marker(d));
      ++count;
    }
    CHECK(static_cast<int>(seen.size()) == count);
    CHECK(*seen.rbegin() < kDictionarySize);
  }
  SUBCASE("range exhausted") {
    try {
      allocate_task_markers(TaskType::StroopFast, kInstancesPerTaskType);
      FAIL("expected range_exhausted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::range_exhausted);
    }
  }
}

TEST_CASE("edge layout") {
  SUBCASE("1920x1080 has four markers on the top row") {
    const auto l = edge_marker_layout(1920, 1080, 96);
    REQUIRE(l.markers.size() == 14);
    std::map<Edge, int> per_edge;
    for (const auto& m : l.markers) ++per_edge[m.edge];
    CHECK(per_edge[Edge::Top] == 4);
    CHECK(per_edge[Edge::Bottom] == 4);
    CHECK(per_edge[Edge::Left] == 3);
    CHECK(per_edge[Edge::Right] == 3);
    const double top_y = l.markers[0].center_y;
    int on_top_row = 0;
    for (const auto& m : l.markers) on_top_row += m.center_y == top_y;
    CHECK(on_top_row == 4);
    // Documented fractions.
    CHECK(l.markers[0].center_x == doctest::Approx(1920.0 / 8));
    CHECK(l.markers[3].center_x == doctest::Approx(1920.0 * 7 / 8));
    CHECK(l.markers[5].center_y == doctest::Approx(540.0));
  }
  SUBCASE("square viewport is symmetric under a half turn") {
    const auto l = edge_marker_layout(1000, 1000, 80);
    std::set<std::pair<double, double>> centers;
    for (const auto& m : l.markers) centers.insert({m.center_x, m.center_y});
    for (const auto& m : l.markers) CHECK(centers.count({1000 - m.center_x, 1000 - m.center_y}) == 1);
  }
  SUBCASE("random viewports keep the interior free of markers") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
      const int w = 640 + static_cast<int>(rng.below(3200));
      const int h = 480 + static_cast<int>(rng.below(2000));
      const int size = 24 + static_cast<int>(rng.below(100));
      EdgeLayout l;
      try {
        l = edge_marker_layout(w, h, size);
      } catch (const Error&) {
        continue;
      }
      for (const auto& m : l.markers) {
        const Rect sq = m.square();
        CHECK_FALSE(sq.overlaps(l.interior));
        CHECK(sq.x0 >= 0);
        CHECK(sq.y0 >= 0);
        CHECK(sq.x1 <= w);
        CHECK(sq.y1 <= h);
        for (const auto& o : l.markers) {
          if (&o != &m) CHECK_FALSE(sq.overlaps(o.square()));
        }
      }
    }
  }
  SUBCASE("viewport too small") { CHECK_THROWS_AS(edge_marker_layout(200, 100, 96), Error); }
}

TEST_CASE("screen pose recovery") {
  const auto plan = make_marker_plan(1920, 1080, 96);
  CameraIntrinsics intr;

  SUBCASE("fronto-parallel at 60 cm") {
    const auto truth = make_pose(Eigen::Matrix3d::Identity(), {0, 0, 60});
    const auto frame = edge_frame(plan, truth, intr);
    const auto est = estimate_screen_pose(frame, plan, intr, 60.5, 33.5);
    CHECK((est.translation_cm - Eigen::Vector3d(0, 0, 60)).norm() < 1e-6);
    CHECK(rotation_error(est.rotation, Eigen::Matrix3d::Identity()) < 1e-6);
    CHECK(est.px_per_cm_x == doctest::Approx(1920 / 60.5));
    CHECK(est.px_per_cm_x == doctest::Approx(31.74).epsilon(1e-3));
  }

  SUBCASE("known Euler rotation") {
    const auto truth = make_pose(rotation_from_euler_deg(10, -5, 3), {2, -1.5, 65});
    const auto est = estimate_screen_pose(edge_frame(plan, truth, intr), plan, intr, 60.5, 33.5);
    CHECK((est.translation_cm - truth.translation_cm).norm() < 1e-6);
    CHECK(rotation_error(est.rotation, truth.rotation) < 1e-6);
    CHECK((est.rotation.transpose() * est.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-9);
    CHECK(est.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("with lens distortion") {
    intr.distortion = {0.05, -0.01, 0.001, -0.0005, 0.002};
    const auto truth = make_pose(rotation_from_euler_deg(-4, 6, 1), {-3, 2, 55});
    const auto est = estimate_screen_pose(edge_frame(plan, truth, intr), plan, intr, 60.5, 33.5);
    CHECK((est.translation_cm - truth.translation_cm).norm() < 1e-6);
    CHECK(rotation_error(est.rotation, truth.rotation) < 1e-6);
  }

  SUBCASE("too few or collinear markers") {
    const auto truth = make_pose(Eigen::Matrix3d::Identity(), {0, 0, 60});
    auto frame = edge_frame(plan, truth, intr);
    std::vector<DetectionRecord> three(frame.begin(), frame.begin() + 3);
    try {
      estimate_screen_pose(three, plan, intr, 60.5, 33.5);
      FAIL("expected singular_configuration");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::singular_configuration);
    }
    // The four top-edge markers share one line.
    std::vector<DetectionRecord> top(frame.begin(), frame.begin() + 4);
    try {
      estimate_screen_pose(top, plan, intr, 60.5, 33.5);
      FAIL("expected singular_configuration");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::singular_configuration);
    }
  }

  SUBCASE("noisy corners exceed the quality threshold") {
    const auto truth = make_pose(Eigen::Matrix3d::Identity(), {0, 0, 60});
    auto frame = edge_frame(plan, truth, intr);
    Rng rng(3);
    for (auto& d : frame)
      for (auto& c : d.corners) c[0] += 20 * rng.normal();
    try {
      estimate_screen_pose(frame, plan, intr, 60.5, 33.5);
      FAIL("expected poor_quality");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::poor_quality);
    }
  }
}

TEST_CASE("stimulus to camera frame") {
  const Viewport vp{1920, 1080};
  const auto id = make_pose(Eigen::Matrix3d::Identity(), {0, 0, 60});
  SUBCASE("screen centre lies on the optical axis") {
    const auto p = stimulus_to_3d(id, 960, 540, vp);
    CHECK((p - Eigen::Vector3d(0, 0, 60)).norm() < 1e-12);
  }
  SUBCASE("pixel (384, 216) sits at (12.1, 6.7) cm from the top-left corner") {
    const auto plane = pixel_to_plane(id, 384, 216, vp);
    CHECK(plane.x() + 60.5 / 2 == doctest::Approx(12.1).epsilon(1e-12));
    CHECK(plane.y() + 33.5 / 2 == doctest::Approx(6.7).epsilon(1e-12));
  }
  SUBCASE("projection round trip") {
    CameraIntrinsics intr;
    intr.distortion = {0.02, 0.001};
    const auto pose = make_pose(rotation_from_euler_deg(8, -3, 2), {1, 1, 62});
    Rng rng(11);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector2d px(rng.uniform(0, 1920), rng.uniform(0, 1080));
      const Eigen::Vector2d uv = project_to_image(intr, stimulus_to_3d(pose, px.x(), px.y(), vp));
      worst = std::max(worst, (image_to_stimulus(pose, intr, uv, vp) - px).norm());
      CHECK((camera_to_stimulus(pose, stimulus_to_3d(pose, px.x(), px.y(), vp), vp) - px).norm() < 1e-9);
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("pixel outside the viewport") { CHECK_THROWS_AS(stimulus_to_3d(id, 1921, 0, vp), Error); }
}

TEST_CASE("detection stream format") {
  std::vector<DetectionRecord> recs{{10.5, 3, {{{1, 2}, {3, 4}, {5, 6}, {7, 8}}}},
                                    {10.5, 4, {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}},
                                    {42, 33, {{{9, 9}, {8, 8}, {7, 7}, {6, 6}}}}};
  std::stringstream ss;
  write_detections(ss, recs);
  CHECK(read_detections(ss) == recs);

  std::stringstream bad;
  write_detections(bad, std::vector<DetectionRecord>{recs[2], recs[0]});
  CHECK_THROWS_AS(read_detections(bad), Error);

  const auto intr = intrinsics_from_json(parse_json(R"({"fx":800,"fy":810,"cx":320,"cy":240,"distortion":[0.1]})"));
  CHECK(intr.fy == 810);
  CHECK(intr.distortion.size() == 1);
  CHECK_THROWS_AS(intrinsics_from_json(parse_json(R"({"fx":0,"fy":1,"cx":0,"cy":0})")), Error);
}

TEST_CASE("timeline alignment against the camera simulator") {
  const auto log = small_log();
  const auto plan = marker_plan_from_log(log);
  const auto pose = make_pose(Eigen::Matrix3d::Identity(), {0, 0, 60});
  const CameraIntrinsics intr;

  SUBCASE("identical clocks and a 1 kHz camera recover zero exactly") {
    CameraSimulation sim;
    sim.fps = 1000;
    sim.phase_ms = 0;
    const auto det = simulate_camera(log, plan, pose, intr, sim);
    const auto r = align_timelines(det, log);
    REQUIRE(r.tasks.size() == 3);
    for (const auto& t : r.tasks) {
      CHECK(t.offset_ms == 0);
      CHECK(t.residual_ms == 0);
    }
  }

  SUBCASE("offset 137 ms at 60 fps stays within one frame") {
    CameraSimulation sim;
    sim.fps = 60;
    sim.clock_offset_ms = 137;
    sim.seed = 4;
    const auto det = simulate_camera(log, plan, pose, intr, sim);
    const auto r = align_timelines(det, log);
    REQUIRE(r.tasks.size() == 3);
    CHECK(r.unaligned.empty());
    for (const auto& t : r.tasks) {
      CHECK(t.offset_ms - 137 >= 0);
      CHECK(t.offset_ms - 137 < 1000.0 / 60);
      CHECK(t.end_camera_ts_ms > t.start_camera_ts_ms);
    }
  }

  SUBCASE("30 fps error never exceeds 33.4 ms") {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
      CameraSimulation sim;
      sim.fps = 30;
      sim.clock_offset_ms = rng.uniform(-10000, 10000);
      sim.seed = i;
      const auto r = align_timelines(simulate_camera(log, plan, pose, intr, sim), log);
      for (const auto& t : r.tasks) CHECK(std::abs(t.offset_ms - sim.clock_offset_ms) <= 33.4);
    }
  }

  SUBCASE("simulated frames give back the simulation pose") {
    const auto truth = make_pose(rotation_from_euler_deg(5, 4, -2), {1, 0.5, 58});
    CameraSimulation sim;
    sim.fps = 30;
    const auto det = simulate_camera(log, plan, truth, intr, sim);
    std::vector<DetectionRecord> frame;
    for (const auto& d : det) {
      if (d.camera_ts_ms == det.front().camera_ts_ms && d.marker_id < kEdgeMarkerCount) frame.push_back(d);
    }
    REQUIRE(frame.size() == 14);
    const auto est = estimate_screen_pose(frame, plan, intr, 60.5, 33.5);
    CHECK((est.translation_cm - truth.translation_cm).norm() < 1e-6);
    CHECK(rotation_error(est.rotation, truth.rotation) < 1e-6);
  }

  SUBCASE("a missing end marker leaves the task unaligned") {
    CameraSimulation sim;
    sim.fps = 60;
    auto det = simulate_camera(log, plan, pose, intr, sim);
    const int end_id = plan.task_markers.at("p").end_id;
    std::erase_if(det, [&](const DetectionRecord& d) { return d.marker_id == end_id; });
    const auto r = align_timelines(det, log);
    CHECK(r.tasks.size() == 2);
    REQUIRE(r.unaligned.size() == 1);
    CHECK(r.unaligned[0].step_id == "p");
  }

  SUBCASE("no shared markers") {
    std::vector<DetectionRecord> det{{0, 999, {}}};
    try {
      align_timelines(det, log);
      FAIL("expected alignment_impossible");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::alignment_impossible);
    }
  }
}

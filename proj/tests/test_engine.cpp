#include <doctest.h>

#include "stimforge/common/fs.hpp"
#include "stimforge/engine/plan.hpp"
#include "stimforge/engine/runner.hpp"
#include "stimforge/eventlog/session_log.hpp"
#include "stimforge/eventlog/verify.hpp"
#include "stimforge/tasks/questionnaire.hpp"
#include "stimforge/trajectory/pursuit.hpp"
#include "support.hpp"

#include <cmath>

using namespace stimforge;
using protocol::TaskType;

namespace {

engine::HeadlessOptions with_seed(std::uint64_t seed) {
  engine::HeadlessOptions o;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("headless determinism") {
  const auto flow = testing::golden_flow();
  testing::TempDir dir;
  auto oa = with_seed(3), ob = with_seed(3);
  oa.log_path = dir.path() / "a.session.jsonl";
  ob.log_path = dir.path() / "b.session.jsonl";
  const auto a = engine::run_headless(flow, oa);
  const auto b = engine::run_headless(flow, ob);
  CHECK(a.entries == b.entries);
  CHECK(a.seal.entry_count == b.seal.entry_count);
  CHECK(a.session_id == b.session_id);
  CHECK(a.header.clock_basis == "virtual");

  // The files differ only in the header's start time.
  auto la = eventlog::read_session_log(*oa.log_path);
  auto lb = eventlog::read_session_log(*ob.log_path);
  CHECK(la.seal_valid());
  CHECK(lb.seal_valid());
  la.header.start_utc_ms = lb.header.start_utc_ms = 0;
  CHECK(la.header == lb.header);
  CHECK(la.entries == lb.entries);

  // Another participant seed changes responses only.
  const auto c = engine::run_headless(flow, with_seed(4));
  std::size_t stim_a = 0, stim_c = 0;
  for (const auto& e : a.entries) stim_a += eventlog::is_stimulus_event(e.event_type);
  for (const auto& e : c.entries) stim_c += eventlog::is_stimulus_event(e.event_type);
  CHECK(stim_a == stim_c);
  CHECK(a.entries != c.entries);
}

TEST_CASE("virtual clock timeline") {
  const auto flow = testing::golden_flow();
  const auto r = engine::run_headless(flow, with_seed(1));
  const auto plans = engine::plan_session(flow, nullptr);
  REQUIRE(r.entries.front().event_type == "SessionCreated");
  CHECK(r.entries.back().event_type == "SessionFinish");

  // TaskStart of step k+1 sits exactly where step k's tail ends.
  std::int64_t expected_start = -1;
  std::size_t k = 0;
  for (const auto& e : r.entries) {
    if (e.event_type != "TaskStart") continue;
    if (expected_start >= 0) CHECK(e.timestamp == expected_start);
    const auto& p = plans.at(k++);
    CHECK(e.details.at("stepId") == p.step_id);
    if (flow.steps[k - 1].seed) CHECK(e.details.at("seed") == p.seed);
    expected_start = e.timestamp + p.lead_ms + p.content_ms + p.tail_ms;
  }
  CHECK(k == plans.size());
  CHECK(r.entries.back().timestamp == expected_start);
}

TEST_CASE("plans") {
  SUBCASE("marker lead and tail equal the marker display window") {
    const auto flow = testing::one_step_flow(TaskType::FixationHorizontal);
    const auto p = engine::plan_step(flow, 0, nullptr);
    REQUIRE(p.markers.has_value());
    CHECK(p.markers->start_id == 33);
    CHECK(p.lead_ms == p.settings.markers.display_ms);
    CHECK(p.tail_ms == p.settings.markers.display_ms);
    CHECK(p.stimuli.size() == 9);
    for (const auto& e : p.stimuli) CHECK(e.offset_ms < p.content_ms);
  }

  SUBCASE("questionnaires carry no markers") {
    const auto p = engine::plan_step(testing::one_step_flow(TaskType::QuestionnaireBfi10), 0, nullptr);
    CHECK_FALSE(p.markers.has_value());
    CHECK(p.lead_ms == 0);
    REQUIRE(p.instrument.has_value());
    CHECK(p.content_ms == engine::kQuestionnaireItemMs * 10);
  }

  SUBCASE("plan JSON") {
    const auto flow = testing::golden_flow();
    for (std::size_t i = 0; i < flow.steps.size(); ++i) {
      const auto p = engine::plan_step(flow, i, nullptr);
      const auto j = engine::to_json(p);
      CHECK(j.at("stepId") == p.step_id);
      CHECK(j.at("stimuli").size() == p.stimuli.size());
      if (protocol::family_of(p.task_type) == protocol::TaskFamily::Pursuit) CHECK(j.at("trajectory").at("trips").size() > 0);
    }
  }

  SUBCASE("unrealisable settings throw") {
    auto flow = testing::one_step_flow(TaskType::FixationHorizontal);
    flow.steps[0].overrides = Json{{"gridRows", 20}, {"gridCols", 20}, {"fixationDotSize", 5.0}};
    CHECK_THROWS_AS(engine::plan_step(flow, 0, nullptr), Error);
  }
}

TEST_CASE("pursuit test vectors") {
  const auto flow = testing::golden_flow();
  for (std::size_t i = 0; i < flow.steps.size(); ++i) {
    if (protocol::family_of(flow.steps[i].task_type) != protocol::TaskFamily::Pursuit) continue;
    const auto p = engine::plan_step(flow, i, nullptr);
    const auto j = engine::pursuit_vectors(p, 60);
    const trajectory::PursuitTrajectory tr(
        trajectory::pursuit_params(p.settings, engine::pursuit_mode_of(p.task_type), p.seed), p.settings);
    const auto& samples = j.at("samples");
    CHECK(samples.size() == static_cast<std::size_t>(std::floor(tr.duration_ms() * 60 / 1000)) + 1);
    for (std::size_t k = 0; k < samples.size(); k += 37) {
      const auto s = tr.at(samples[k].at("tMs").get<double>());
      CHECK(samples[k].at("xPx").get<double>() == s.x_px);
      CHECK(samples[k].at("yPx").get<double>() == s.y_px);
    }
    CHECK(protocol::settings_from_json(j.at("settings")) == p.settings);
  }
  CHECK_THROWS_AS(engine::pursuit_mode_of(TaskType::Vergence), Error);
}

TEST_CASE("every task family runs and verifies") {
  for (const auto type : protocol::all_task_types()) {
    CAPTURE(protocol::to_string(type));
    auto flow = testing::one_step_flow(type, 11);
    if (type == TaskType::QuestionnaireCustom) {
      auto doc = tasks::to_json(tasks::builtin_instrument("bfi10"));
      doc["instrument_id"] = "custom";
      doc.erase("scoring");
      flow.steps[0].overrides = Json{{"questionnaire", {{"customInstrument", doc}}}};
    }
    const auto r = engine::run_headless(flow, with_seed(2));
    const auto log = eventlog::parse_session_log(eventlog::render_session_log(r.header, r.entries, true));
    const auto rep = eventlog::verify(log, flow);
    for (const auto& i : rep.issues) MESSAGE(i.check << ": " << i.message);
    CHECK(rep.ok());
  }
}

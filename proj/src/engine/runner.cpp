#include "stimforge/engine/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stimforge/common/error.hpp"
#include "stimforge/common/hash.hpp"
#include "stimforge/common/rng.hpp"
#include "stimforge/sync/session.hpp"

namespace stimforge::engine {
namespace {

namespace ev = eventlog::event;

struct TimedEvent {
  std::int64_t t_ms = 0;
  std::string type;
  Json details;
};

Json response_base(const StepPlan& p, std::string_view kind) {
  return {{"taskName", p.task_name}, {"stepId", p.step_id}, {"kind", kind}};
}

/// Answer for one questionnaire item, valid for its kind.
Json simulated_answer(const tasks::InstrumentItem& item, Rng& rng) {
  using tasks::ItemKind;
  switch (item.kind) {
    case ItemKind::Radio: return item.options[rng.below(item.options.size())];
    case ItemKind::Checkbox: {
      Json picked = Json::array();
      for (const auto& o : item.options) {
        if (rng.uniform01() < 0.5) picked.push_back(o);
      }
      if (picked.empty() && !item.options.empty()) picked.push_back(item.options.front());
      return picked;
    }
    case ItemKind::Text: return "response " + item.item_id;
    case ItemKind::Number: {
      const double lo = item.min.value_or(0), hi = item.max.value_or(lo + 100);
      return std::floor(rng.uniform(lo, hi));
    }
    case ItemKind::Likert: {
      const auto& s = *item.scale;
      const auto points = static_cast<std::uint64_t>(std::llround((s.max - s.min) / s.step)) + 1;
      return s.min + static_cast<double>(rng.below(points)) * s.step;
    }
  }
  return nullptr;
}

/// Seeded participant: responses relative to content start.
std::vector<TimedEvent> simulate_responses(const StepPlan& p, std::uint64_t run_seed) {
  std::vector<TimedEvent> out;
  Rng rng(Rng::derive(run_seed, 100 + p.step_index));
  if (p.nback) {
    const int window = p.settings.cognitive.stimulus_ms + p.settings.cognitive.inter_stimulus_ms;
    for (const auto& t : p.nback->trials) {
      const double press_p = t.is_target ? 0.85 : 0.1;
      if (rng.uniform01() >= press_p) continue;
      const auto rt = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::min(600, window - 1)))) + 300;
      Json d = response_base(p, "nback");
      d["trialIndex"] = t.index;
      d["response"] = "match";
      d["rtMs"] = std::min<std::int64_t>(rt, window - 1);
      out.push_back({t.onset_ms + d["rtMs"].get<std::int64_t>(), std::string(ev::kResponse), std::move(d)});
    }
  }
  if (!p.stroop.empty()) {
    const auto colors = tasks::stroop_colors();
    const int window = p.settings.cognitive.stimulus_ms + p.settings.cognitive.inter_stimulus_ms;
    for (const auto& t : p.stroop) {
      if (rng.uniform01() >= 0.95) continue;
      std::string ink = t.ink;
      if (rng.uniform01() >= 0.9) {
        do {
          ink = std::string(colors[rng.below(colors.size())]);
        } while (ink == t.ink);
      }
      const auto rt = std::min<std::int64_t>(400 + static_cast<std::int64_t>(rng.below(600)), window - 1);
      Json d = response_base(p, "stroop");
      d["trialIndex"] = t.index;
      d["ink"] = ink;
      d["rtMs"] = rt;
      out.push_back({t.onset_ms + rt, std::string(ev::kResponse), std::move(d)});
    }
  }
  if (p.instrument) {
    Json answers = Json::object();
    for (const auto* item : tasks::presented_items(*p.instrument, p.weighted)) {
      answers[item->item_id] = simulated_answer(*item, rng);
    }
    tasks::validate_answers(*p.instrument, answers, p.weighted);
    Json d = response_base(p, "questionnaire");
    d["instrumentId"] = p.instrument->instrument_id;
    d["weighted"] = p.weighted;
    d["answers"] = std::move(answers);
    out.push_back({p.content_ms, std::string(ev::kResponse), std::move(d)});
  }
  return out;
}

}  // namespace

Json score_step(const StepPlan& p, const std::vector<eventlog::LogEntry>& responses) {
  if (p.nback) {
    std::vector<int> pressed;
    for (const auto& r : responses) pressed.push_back(r.details.at("trialIndex").get<int>());
    const auto s = tasks::score_nback(*p.nback, pressed);
    return {{"hits", s.hits},
            {"misses", s.misses},
            {"falseAlarms", s.false_alarms},
            {"correctRejections", s.correct_rejections},
            {"earlyResponses", s.early_responses},
            {"accuracy", s.accuracy}};
  }
  if (!p.stroop.empty()) {
    std::vector<tasks::StroopResponse> rs;
    for (const auto& r : responses) {
      rs.push_back({r.details.at("trialIndex").get<int>(), r.details.at("ink").get<std::string>(),
                    r.details.at("rtMs").get<int>()});
    }
    const auto s = tasks::score_stroop(p.stroop, rs);
    return {{"correct", s.correct},
            {"incorrect", s.incorrect},
            {"timeouts", s.timeouts},
            {"accuracy", s.accuracy},
            {"meanRtCorrectMs", s.mean_rt_correct_ms}};
  }
  if (p.instrument) {
    if (responses.size() != 1) {
      throw Error(Errc::validation_error, "questionnaire step " + p.step_id + ": expected exactly one response");
    }
    const Json& answers = responses.front().details.at("answers");
    tasks::validate_answers(*p.instrument, answers, p.weighted);
    return tasks::score_questionnaire(*p.instrument, answers, p.weighted);
  }
  return nullptr;
}

std::string headless_session_id(const protocol::ExperimentFlow& flow, std::uint64_t seed) {
  return "headless-" + sha256_hex(protocol::flow_hash(flow) + ":" + std::to_string(seed)).substr(0, 16);
}

HeadlessResult run_headless(const protocol::ExperimentFlow& flow, const HeadlessOptions& options) {
  const auto plans = plan_session(flow, options.store);
  auto clock = std::make_shared<sync::VirtualClock>(0);
  const std::string token = "headless";
  sync::SessionConfig cfg;
  cfg.session_id = headless_session_id(flow, options.seed);
  cfg.flow = flow;
  cfg.publisher_token = token;
  cfg.clock = clock;
  cfg.log_path = options.log_path;
  sync::Session session(std::move(cfg));
  session.attach_publisher(token);
  session.start(token);

  for (const auto& p : plans) {
    const std::int64_t t0 = clock->now_ms();
    session.publish(token, ev::kTaskStart, p.task_name, Json::object());
    const std::int64_t content0 = t0 + p.lead_ms;

    std::vector<TimedEvent> events;
    for (const auto& s : p.stimuli) events.push_back({content0 + s.offset_ms, s.event_type, s.details});
    const auto responses = simulate_responses(p, options.seed);
    std::vector<eventlog::LogEntry> response_entries;
    for (const auto& r : responses) {
      events.push_back({content0 + r.t_ms, r.type, r.details});
      response_entries.push_back({0, r.type, p.task_name, r.details});
    }
    // Stimuli come first at equal times; stable sort keeps planned order.
    std::stable_sort(events.begin(), events.end(), [](const TimedEvent& a, const TimedEvent& b) {
      if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
      return a.type != ev::kResponse && b.type == ev::kResponse;
    });
    for (auto& e : events) {
      clock->set(e.t_ms);
      session.publish(token, e.type, p.task_name, std::move(e.details));
    }
    clock->set(content0 + p.content_ms);
    Json end = {{"score", score_step(p, response_entries)}};
    session.publish(token, ev::kTaskEnd, p.task_name, std::move(end));
    clock->set(content0 + p.content_ms + p.tail_ms);
  }
  HeadlessResult r;
  r.seal = session.finish(token);
  r.session_id = session.id();
  r.header = session.header();
  r.entries = session.entries();
  return r;
}

}  // namespace stimforge::engine

#include <doctest.h>

#include <thread>

#include "stimforge/common/rng.hpp"
#include "stimforge/eventlog/session_log.hpp"
#include "stimforge/protocol/flow.hpp"
#include "stimforge/sync/clock.hpp"
#include "stimforge/sync/message.hpp"
#include "stimforge/sync/session.hpp"
#include "support.hpp"

using namespace stimforge;
using namespace stimforge::sync;
using namespace std::chrono_literals;

namespace {

std::unique_ptr<Session> make_session(std::size_t queue_limit = kDefaultQueueLimit,
                                      std::shared_ptr<Clock> clock = std::make_shared<VirtualClock>(0)) {
  auto flow = testing::one_step_flow(protocol::TaskType::FixationHorizontal);
  protocol::FlowStep s;
  s.step_id = "s1";
  s.task_type = protocol::TaskType::Calibration5;
  s.overrides = Json{{"fixationDotType", "CCP"}};
  flow.steps.push_back(s);
  SessionConfig cfg;
  cfg.session_id = "sess";
  cfg.flow = flow;
  cfg.publisher_token = "tok";
  cfg.clock = std::move(clock);
  cfg.queue_limit = queue_limit;
  return std::make_unique<Session>(cfg);
}

std::vector<SyncMessage> drain(Subscriber& sub) {
  std::vector<SyncMessage> out;
  while (auto f = sub.try_pop()) out.push_back(decode_message(**f));
  return out;
}

/// Sequence numbers must run k, k+1, ... with nothing skipped.
bool gapless(const std::vector<SyncMessage>& msgs, std::uint64_t first) {
  std::uint64_t want = first;
  for (const auto& m : msgs) {
    if (!m.seq) continue;
    if (*m.seq != want) return false;
    ++want;
  }
  return true;
}

}  // namespace

TEST_CASE("four-timestamp offset estimate") {
  auto s = estimate_offset(7, 7, 7, 7);
  CHECK(s.offset_ms == 0);
  CHECK(s.rtt_ms == 0);
  s = estimate_offset(0, 5, 6, 10);
  CHECK(s.offset_ms == 0.5);
  CHECK(s.rtt_ms == 9);
  CHECK_THROWS_AS(estimate_offset(0, 5, 20, 10), Error);

  SUBCASE("symmetric delay recovers the offset exactly") {
    Rng rng(2);
    for (int i = 0; i < 10000; ++i) {
      // Integer-valued ms keep every intermediate exactly representable.
      const double delta = static_cast<double>(static_cast<std::int64_t>(rng.below(2000000)) - 1000000);
      const double d = static_cast<double>(rng.below(5000));
      const double proc = static_cast<double>(rng.below(50));
      const double t0 = static_cast<double>(rng.below(1u << 30));
      const double t1 = t0 + d + delta;
      const double t2 = t1 + proc;
      const double t3 = t2 - delta + d;
      CHECK(estimate_offset(t0, t1, t2, t3).offset_ms == delta);
    }
  }
  SUBCASE("asymmetric delay errs by half the difference") {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
      const double delta = rng.uniform(-1e5, 1e5);
      const double d1 = rng.uniform(0, 200), d2 = rng.uniform(0, 200);
      const double t0 = rng.uniform(0, 1e6);
      const double t1 = t0 + d1 + delta;
      const double t2 = t1 + rng.uniform(0, 5);
      const double t3 = t2 - delta + d2;
      CHECK(std::abs(estimate_offset(t0, t1, t2, t3).offset_ms - delta - (d1 - d2) / 2) < 1e-9);
    }
  }
}

TEST_CASE("clock estimator keeps the minimum round trip") {
  ClockEstimator est(3);
  CHECK_FALSE(est.estimate().has_value());
  CHECK(est.add(0, 10, 10, 30));  // rtt 30, offset 5
  CHECK(est.add(0, 3, 3, 4));     // rtt 4, offset 1
  CHECK(est.add(0, 50, 50, 60));  // rtt 60
  CHECK_FALSE(est.add(0, 0, 20, 10));
  auto e = est.estimate();
  REQUIRE(e);
  CHECK(e->rtt_ms == 4);
  CHECK(e->offset_ms == 1);
  CHECK(e->sample_count == 3);
  // The best sample ages out of the window.
  est.add(0, 20, 20, 40);
  est.add(0, 20, 20, 40);
  CHECK(est.estimate()->rtt_ms == 40);
}

TEST_CASE("virtual clock") {
  VirtualClock c(5);
  c.advance(10);
  CHECK(c.now_ms() == 15);
  CHECK_THROWS_AS(c.set(14), Error);
}

TEST_CASE("wire messages") {
  SyncMessage m{7, 1234, "VisualDot", Json{{"taskName", "X"}, {"details", {{"xPx", 1.5}}}}};
  CHECK(decode_message(encode_message(m)) == m);
  SyncMessage hb{std::nullopt, 99, std::string(kHeartbeat), Json{{"nextSeq", 3}}};
  const auto hj = parse_json(encode_message(hb));
  CHECK(hj["seq"].is_null());
  CHECK(decode_message(encode_message(hb)) == hb);
  CHECK_THROWS_AS(decode_message(R"({"seq":1})"), Error);

  const auto f = decode_client_frame(R"({"kind":"TimePing","payload":{"t0":12}})");
  CHECK(f.kind == "TimePing");
  CHECK(f.payload["t0"] == 12);
  CHECK_THROWS_AS(decode_client_frame(R"({"kind":"TimePing","payload":3})"), Error);
  CHECK_THROWS_AS(decode_client_frame(R"({"kind":"TimePing","payload":{},"x":1})"), Error);

  eventlog::LogEntry e{42, "Cue", std::string("Blink"), Json{{"index", 1}}};
  CHECK(entry_from_message(message_from_entry(3, e)) == e);
}

TEST_CASE("session lifecycle") {
  auto s = make_session();
  auto sub = s->subscribe(0);
  s->start("tok");
  s->finish("tok");
  std::vector<std::string> lifecycle;
  for (const auto& m : drain(*sub)) {
    if (m.kind.starts_with("Session")) lifecycle.push_back(m.kind);
  }
  CHECK(lifecycle == std::vector<std::string>{"SessionCreated", "SessionStart", "SessionFinish"});
  CHECK(sub->closed());
  CHECK(sub->close_reason() == "finished");
  CHECK(s->seal().has_value());
  CHECK(s->seal()->entry_count == s->entries().size());
}

TEST_CASE("illegal transitions") {
  auto s = make_session();
  CHECK_THROWS_AS(s->pause("tok"), Error);
  s->start("tok");
  s->pause("tok");
  try {
    s->pause("tok");
    FAIL("expected state_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::state_error);
  }
  CHECK_THROWS_AS(s->publish("tok", "VisualDot", std::nullopt, Json::object()), Error);
  s->resume("tok");
  CHECK_THROWS_AS(s->start("tok"), Error);
  s->finish("tok");
  try {
    s->publish("tok", "Cue", std::nullopt, Json::object());
    FAIL("expected state_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::state_error);
  }
}

TEST_CASE("authorization and publisher exclusivity") {
  auto s = make_session();
  try {
    s->start("wrong");
    FAIL("expected unauthorized");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unauthorized);
  }
  CHECK_THROWS_AS(s->attach_publisher("wrong"), Error);
  s->attach_publisher("tok");
  try {
    s->attach_publisher("tok");
    FAIL("expected conflict");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::conflict);
  }
  s->detach_publisher();
  s->attach_publisher("tok");
  bool reattach = false;
  for (const auto& e : s->entries()) reattach |= e.event_type == "PublisherReattach";
  CHECK(reattach);
}

TEST_CASE("snapshots equal the resolved step settings") {
  auto s = make_session();
  s->start("tok");
  s->publish("tok", "TaskStart", std::nullopt, Json::object());
  s->publish("tok", "VisualDot", std::nullopt, Json{{"xPx", 1}});
  s->publish("tok", "TaskEnd", std::nullopt, Json::object());
  s->publish("tok", "TaskStart", std::nullopt, Json::object());
  const auto entries = s->entries();
  std::vector<Json> snapshots;
  std::vector<Json> starts;
  for (const auto& e : entries) {
    if (e.event_type == "ConfigSnapshot") snapshots.push_back(e.details);
    if (e.event_type == "TaskStart") starts.push_back(e.details);
  }
  REQUIRE(snapshots.size() == 2);
  REQUIRE(starts.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto want = protocol::to_json(protocol::resolve_step_settings(s->flow(), i));
    CHECK(snapshots[i]["currentSettings"] == want);
    CHECK(snapshots[i]["stepIndex"] == i);
    CHECK(starts[i]["currentSettings"] == want);
  }
  CHECK(starts[1]["currentSettings"]["fixationDotType"] == "CCP");
  CHECK(starts[0]["markerId"] == 33);
  CHECK(entries[0].event_type == "SessionCreated");

  SUBCASE("details that disagree with the flow are rejected") {
    CHECK_THROWS_AS(s->publish("tok", "TaskEnd", std::nullopt, Json{{"stepId", "nope"}}), Error);
  }
  SUBCASE("task brackets must alternate") {
    CHECK_THROWS_AS(s->publish("tok", "TaskStart", std::nullopt, Json::object()), Error);
  }
}

TEST_CASE("ordered delivery and replay splice") {
  auto s = make_session();
  auto live = s->subscribe();
  s->start("tok");
  s->publish("tok", "TaskStart", std::nullopt, Json::object());
  for (int i = 0; i < 20; ++i) s->publish("tok", "VisualDot", std::nullopt, Json{{"i", i}});
  auto late = s->subscribe(0);
  for (int i = 20; i < 40; ++i) s->publish("tok", "VisualDot", std::nullopt, Json{{"i", i}});

  const auto a = drain(*live);
  const auto b = drain(*late);
  CHECK(gapless(a, 1));  // joined after SessionCreated
  CHECK(gapless(b, 0));
  CHECK(b.size() == s->next_seq());
  CHECK(*a.back().seq == *b.back().seq);

  auto mid = s->subscribe(5);
  CHECK(gapless(drain(*mid), 5));
  CHECK_THROWS_AS(s->subscribe(s->next_seq() + 1), Error);
}

TEST_CASE("slow subscriber is dropped without stalling the publisher") {
  auto s = make_session(50);
  s->start("tok");
  s->publish("tok", "TaskStart", std::nullopt, Json::object());
  auto fast1 = s->subscribe();
  auto fast2 = s->subscribe();
  auto slow = s->subscribe();
  std::vector<SyncMessage> got1, got2;
  const auto first = s->next_seq();
  for (int i = 0; i < 500; ++i) {
    s->publish("tok", "VisualDot", std::nullopt, Json{{"i", i}});
    for (auto& m : drain(*fast1)) got1.push_back(m);
    for (auto& m : drain(*fast2)) got2.push_back(m);
  }
  CHECK(got1.size() == 500);
  CHECK(gapless(got1, first));
  CHECK(gapless(got2, first));
  CHECK(slow->closed());
  CHECK(slow->close_reason() == "overflow");
  CHECK(s->subscriber_count() == 2);
}

TEST_CASE("concurrent readers see a gapless stream") {
  auto clock = std::make_shared<SystemClock>();
  auto s = make_session(kDefaultQueueLimit, clock);
  s->start("tok");
  s->publish("tok", "TaskStart", std::nullopt, Json::object());
  std::vector<std::shared_ptr<Subscriber>> subs;
  for (int i = 0; i < 4; ++i) subs.push_back(s->subscribe(0));
  std::vector<std::vector<SyncMessage>> got(subs.size());
  std::vector<std::thread> readers;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    readers.emplace_back([&, i] {
      while (auto f = subs[i]->pop(2000ms)) got[i].push_back(decode_message(**f));
    });
  }
  std::thread hb([&] {
    for (int i = 0; i < 20; ++i) {
      s->heartbeat();
      std::this_thread::sleep_for(1ms);
    }
  });
  for (int i = 0; i < 2000; ++i) s->publish("tok", "VisualDot", std::nullopt, Json{{"i", i}});
  hb.join();
  s->finish("tok");
  for (auto& t : readers) t.join();
  for (const auto& g : got) {
    CHECK(gapless(g, 0));
    std::uint64_t sequenced = 0;
    for (const auto& m : g) sequenced += m.seq.has_value();
    CHECK(sequenced == s->entries().size());
  }
}

TEST_CASE("session writes a sealed log") {
  testing::TempDir dir;
  auto flow = testing::one_step_flow(protocol::TaskType::FixationHorizontal);
  SessionConfig cfg;
  cfg.session_id = "disk";
  cfg.flow = flow;
  cfg.publisher_token = "tok";
  cfg.clock = std::make_shared<VirtualClock>(0);
  cfg.log_path = dir.path() / "disk.session.jsonl";
  Session s(cfg);
  s.start("tok");
  const auto seal = s.finish("tok");
  const auto log = eventlog::read_session_log(*cfg.log_path);
  CHECK(log.seal_valid());
  CHECK(log.seal == seal);
  CHECK(log.entries == s.entries());
  CHECK(log.header.clock_basis == "virtual");
}

TEST_CASE("time pong") {
  auto s = make_session();
  const auto m = s->time_pong(12.5, 40);
  CHECK(m.kind == kTimePong);
  CHECK_FALSE(m.seq.has_value());
  CHECK(m.payload["t0"] == 12.5);
  CHECK(m.payload["t1"] == 40);
}

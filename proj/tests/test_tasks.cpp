#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "stimforge/common/hash.hpp"
#include "stimforge/common/rng.hpp"
#include "stimforge/tasks/cognitive.hpp"
#include "stimforge/tasks/content.hpp"
#include "stimforge/tasks/questionnaire.hpp"
#include "support.hpp"

using namespace stimforge;
using namespace stimforge::tasks;

namespace {

/// Direction changes counted from scratch: compare successive step vectors.
int recount_turns(const std::vector<GridCell>& cells) {
  int turns = 0;
  for (std::size_t i = 2; i < cells.size(); ++i) {
    const int dr0 = cells[i - 1].row - cells[i - 2].row, dc0 = cells[i - 1].col - cells[i - 2].col;
    const int dr1 = cells[i].row - cells[i - 1].row, dc1 = cells[i].col - cells[i - 1].col;
    if (dr0 != dr1 || dc0 != dc1) ++turns;
  }
  return turns;
}

std::vector<int> indices_where(const NBackSequence& s, bool target) {
  std::vector<int> out;
  for (const auto& t : s.trials)
    if (t.index >= s.n && t.is_target == target) out.push_back(t.index);
  return out;
}

}  // namespace

TEST_CASE("n-back generation") {
  const TrialTiming timing;

  SUBCASE("minimal sequence with a forced target") {
    const auto s = generate_nback(NBackModality::Letter, 1, 2, 1.0, timing, 0);
    REQUIRE(s.trials.size() == 2);
    CHECK(s.trials[1].stimulus == s.trials[0].stimulus);
    CHECK_FALSE(s.trials[0].is_target);
    CHECK(s.trials[1].is_target);
  }

  SUBCASE("22 trials at rate 0.3 give 6 targets among 20 eligible") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto s = generate_nback(NBackModality::Letter, 2, 22, 0.3, timing, seed);
      CHECK(indices_where(s, true).size() == 6);
      CHECK(indices_where(s, false).size() == 14);
    }
  }

  SUBCASE("flags agree with the stimulus sequence") {
    Rng rng(1);
    for (int i = 0; i < 300; ++i) {
      const int n = 1 + static_cast<int>(rng.below(4));
      const int trials = n + 1 + static_cast<int>(rng.below(40));
      const auto modality = static_cast<NBackModality>(rng.below(3));
      const auto s = generate_nback(modality, n, trials, rng.uniform(0.05, 1.0), timing, rng.next_u64());
      for (const auto& t : s.trials) {
        const bool match = t.index >= n && t.stimulus == s.trials[static_cast<std::size_t>(t.index - n)].stimulus;
        CHECK(t.is_target == match);
      }
    }
  }

  SUBCASE("deterministic") {
    CHECK(generate_nback(NBackModality::Sound, 2, 30, 0.3, timing, 9) ==
          generate_nback(NBackModality::Sound, 2, 30, 0.3, timing, 9));
    CHECK_FALSE(generate_nback(NBackModality::Sound, 2, 30, 0.3, timing, 9) ==
                generate_nback(NBackModality::Sound, 2, 30, 0.3, timing, 10));
  }

  SUBCASE("infeasible parameters") {
    CHECK_THROWS_AS(generate_nback(NBackModality::Letter, 3, 3, 0.3, timing, 0), Error);
    CHECK_THROWS_AS(generate_nback(NBackModality::Letter, 0, 10, 0.3, timing, 0), Error);
    CHECK_THROWS_AS(generate_nback(NBackModality::Letter, 2, 10, 0.0, timing, 0), Error);
    CHECK_THROWS_AS(generate_nback(NBackModality::Letter, 2, 10, 1.5, timing, 0), Error);
  }
}

TEST_CASE("n-back scoring") {
  const auto s = generate_nback(NBackModality::Letter, 2, 22, 0.3, {}, 4);
  const auto targets = indices_where(s, true);
  const auto others = indices_where(s, false);
  const int eligible = 20;

  SUBCASE("perfect responder") {
    const auto r = score_nback(s, targets);
    CHECK(r.hits == 6);
    CHECK(r.correct_rejections == 14);
    CHECK(r.accuracy == 1.0);
  }
  SUBCASE("no responses") {
    const auto r = score_nback(s, std::vector<int>{});
    CHECK(r.hits == 0);
    CHECK(r.false_alarms == 0);
    CHECK(r.misses == 6);
    CHECK(r.accuracy == doctest::Approx(static_cast<double>(r.correct_rejections) / eligible));
  }
  SUBCASE("pressing on every trial") {
    std::vector<int> all(22);
    std::iota(all.begin(), all.end(), 0);
    const auto r = score_nback(s, all);
    CHECK(r.false_alarms == static_cast<int>(others.size()));
    CHECK(r.early_responses == 2);
    CHECK(r.correct_rejections == 0);
  }
  SUBCASE("duplicate and unknown responses") {
    CHECK_THROWS_AS(score_nback(s, std::vector<int>{3, 3}), Error);
    CHECK_THROWS_AS(score_nback(s, std::vector<int>{22}), Error);
  }
}

TEST_CASE("stroop") {
  StroopOptions opt;
  SUBCASE("simple is all congruent") {
    for (const auto& t : generate_stroop(StroopVariant::Simple, 24, opt, 3)) {
      CHECK(t.congruent);
      CHECK(t.word == t.ink);
    }
  }
  SUBCASE("complex mix and the congruence invariant") {
    const auto trials = generate_stroop(StroopVariant::Complex, 24, opt, 3);
    int incongruent = 0;
    for (const auto& t : trials) {
      CHECK(t.congruent == (t.word == t.ink));
      incongruent += !t.congruent;
    }
    CHECK(incongruent == 12);
  }
  SUBCASE("fast has the shorter window") {
    const auto c = generate_stroop(StroopVariant::Complex, 10, opt, 3);
    const auto f = generate_stroop(StroopVariant::Fast, 10, opt, 3);
    CHECK(f[0].response_window_ms < c[0].response_window_ms);
  }
  SUBCASE("deterministic") {
    CHECK(generate_stroop(StroopVariant::Fast, 30, opt, 8) == generate_stroop(StroopVariant::Fast, 30, opt, 8));
  }
  SUBCASE("scoring") {
    const auto trials = generate_stroop(StroopVariant::Complex, 4, opt, 1);
    std::vector<StroopResponse> rs{{0, trials[0].ink, 500},
                                   {1, trials[1].ink == "red" ? "blue" : "red", 600},
                                   {2, trials[2].ink, trials[2].response_window_ms + 1}};
    const auto r = score_stroop(trials, rs);
    CHECK(r.correct == 1);
    CHECK(r.incorrect == 1);
    CHECK(r.timeouts == 2);
    CHECK(r.accuracy == 0.25);
    CHECK(r.mean_rt_correct_ms == 500);
  }
}

TEST_CASE("arrow paths") {
  SUBCASE("easy has three turns") {
    const auto p = generate_arrow_path(ArrowLevel::Easy, 1);
    CHECK(p.turn_count == 3);
    CHECK(p.grid_size == 8);
  }
  SUBCASE("1000 seeds per level, recounted independently") {
    for (const auto level : {ArrowLevel::Easy, ArrowLevel::Medium, ArrowLevel::Hard}) {
      for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto p = generate_arrow_path(level, seed);
        CHECK(recount_turns(p.cells) == arrow_turns(level));
        CHECK(p.turn_count == arrow_turns(level));
        for (std::size_t i = 0; i < p.cells.size(); ++i) {
          CHECK(p.cells[i].row >= 0);
          CHECK(p.cells[i].row < 8);
          CHECK(p.cells[i].col >= 0);
          CHECK(p.cells[i].col < 8);
          if (i > 0) {
            CHECK(std::abs(p.cells[i].row - p.cells[i - 1].row) + std::abs(p.cells[i].col - p.cells[i - 1].col) == 1);
          }
          if (i > 1) CHECK_FALSE(p.cells[i] == p.cells[i - 2]);  // no reversal
        }
      }
    }
  }
  SUBCASE("deterministic") { CHECK(generate_arrow_path(ArrowLevel::Hard, 77) == generate_arrow_path(ArrowLevel::Hard, 77)); }
  SUBCASE("too few moves") { CHECK_THROWS_AS(generate_arrow_path(ArrowLevel::Hard, 0, 5), Error); }
}

TEST_CASE("blink schedules") {
  const auto two = blink_schedule(BlinkVariant::Long, 4000, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].kind == CueKind::Close);
  CHECK(two[1].kind == CueKind::Open);
  const auto five = blink_schedule(BlinkVariant::Short, 1000, 5);
  for (int i = 0; i < 5; ++i) CHECK(five[i].onset_ms == i * 1000);
  for (const auto& c : blink_schedule(BlinkVariant::Long, 4000, 6)) {
    CHECK_FALSE(c.text.empty());
    CHECK(c.beep);
  }
  for (const auto& c : five) CHECK(c.text.empty());
  CHECK_THROWS_AS(blink_schedule(BlinkVariant::Short, 1000, 0), Error);
}

TEST_CASE("content steps and the media store") {
  testing::TempDir dir;
  MediaStore store(dir.path());

  SUBCASE("built-in text") {
    const auto d = content_step(ContentKind::Text, "", 20000, nullptr);
    CHECK(d.kind == ContentKind::Text);
    CHECK(d.media_ref == builtin_media_ref(ContentKind::Text));
    CHECK(d.content_hash == sha256_hex(*builtin_media_bytes(d.media_ref)));
  }
  SUBCASE("uploaded image by hash") {
    const std::string png = "\x89PNG\r\n\x1a\nnot really an image";
    const auto info = store.put(png, "image/png");
    CHECK(info.content_hash == sha256_hex(png));
    CHECK(store.get(info.content_hash) == png);
    const auto d = content_step(ContentKind::Image, "sha256:" + info.content_hash, 5000, &store);
    CHECK(d.content_hash == info.content_hash);
    CHECK(d.mime == "image/png");
    CHECK(content_step(ContentKind::Image, info.content_hash, 5000, &store).content_hash == info.content_hash);
    // An image cannot stand in for a video.
    CHECK_THROWS_AS(content_step(ContentKind::Video, info.content_hash, 5000, &store), Error);
  }
  SUBCASE("missing hash") {
    try {
      content_step(ContentKind::Image, std::string(64, 'a'), 5000, &store);
      FAIL("expected unknown_media");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unknown_media);
    }
  }
  SUBCASE("re-putting identical bytes is idempotent") {
    const auto a = store.put("hello", "text/plain");
    const auto b = store.put("hello", "text/plain");
    CHECK(a.content_hash == b.content_hash);
    CHECK(store.info(a.content_hash)->size == 5);
  }
}

TEST_CASE("instruments") {
  CHECK(builtin_instrument("demographics").items.size() == 21);
  const auto& tlx = builtin_instrument("nasa-tlx");
  CHECK(presented_items(tlx, false).size() == 6);
  CHECK(presented_items(tlx, true).size() == 21);
  const auto& bfi = builtin_instrument("bfi10");
  CHECK(bfi.items.size() == 10);
  for (const auto& it : bfi.items) CHECK(it.kind == ItemKind::Likert);
  CHECK(parse_instrument(to_json(tlx)) == tlx);
  CHECK_THROWS_AS(builtin_instrument("mmpi"), Error);

  SUBCASE("duplicate item ids are rejected") {
    auto j = to_json(bfi);
    j["items"][1]["item_id"] = j["items"][0]["item_id"];
    CHECK_THROWS_AS(parse_instrument(j), Error);
  }
  SUBCASE("answer validation") {
    Json answers = Json::object();
    for (std::size_t i = 0; i < 10; ++i) answers[bfi.items[i].item_id] = 3;
    CHECK_NOTHROW(validate_answers(bfi, answers, false));
    answers["bfi4"] = 9;
    CHECK_THROWS_AS(validate_answers(bfi, answers, false), Error);
  }
}

TEST_CASE("NASA-TLX scoring") {
  const std::array<double, 6> flat{50, 50, 50, 50, 50, 50};
  const std::array<int, 6> w{5, 4, 3, 2, 1, 0};
  CHECK(score_nasa_tlx(flat).overall == 50);
  CHECK(score_nasa_tlx(flat, std::span<const int>(w)).overall == doctest::Approx(50));

  const std::array<double, 6> rising{10, 20, 30, 40, 50, 60};
  CHECK(score_nasa_tlx(rising).overall == doctest::Approx(35));

  const std::array<double, 6> one{100, 0, 0, 0, 0, 0};
  const auto weighted = score_nasa_tlx(one, std::span<const int>(w));
  CHECK(weighted.weighted);
  CHECK(weighted.overall == doctest::Approx(100.0 * 5 / 15));
  CHECK(weighted.dimension_scores[0] == 500);

  const std::array<int, 6> bad{5, 5, 5, 0, 0, 1};
  CHECK_THROWS_AS(score_nasa_tlx(flat, std::span<const int>(bad)), Error);
  const std::array<double, 6> over{101, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(score_nasa_tlx(over), Error);

  SUBCASE("pairwise answers tally to weights") {
    const auto& tlx = builtin_instrument("nasa-tlx");
    Json answers{{"mental", 80}, {"physical", 10}, {"temporal", 40}, {"performance", 30}, {"effort", 60}, {"frustration", 20}};
    // Always pick the first option: mental wins all 5 of its pairs, physical 4, ...
    for (const auto* it : presented_items(tlx, true)) {
      if (it->weighted_only) answers[it->item_id] = it->options[0];
    }
    const auto weights = nasa_tlx_weights(tlx, answers);
    CHECK(weights == std::array<int, 6>{5, 4, 3, 2, 1, 0});
    const auto j = score_questionnaire(tlx, answers, true);
    CHECK(j["overall"].get<double>() == doctest::Approx((5 * 80 + 4 * 10 + 3 * 40 + 2 * 30 + 1 * 60) / 15.0));
  }
}

TEST_CASE("BFI-10 scoring") {
  std::array<int, 10> mid{};
  mid.fill(3);
  for (const auto& [dim, v] : score_bfi10(mid)) CHECK(v == 3.0);

  // Extraversion: item 6 positive, item 1 reversed.
  std::array<int, 10> a{};
  a.fill(3);
  a[5] = 5;
  a[0] = 1;
  const auto s = score_bfi10(a);
  CHECK(s.at("extraversion") == 5.0);

  SUBCASE("changing one dimension's items leaves the others alone") {
    std::array<int, 10> b{};
    b.fill(3);
    const auto base = score_bfi10(b);
    b[1] = 5;  // agreeableness, positive
    b[6] = 2;  // agreeableness, reversed
    const auto moved = score_bfi10(b);
    for (const auto& [dim, v] : moved) {
      if (dim == "agreeableness") CHECK(v == (5 + (6 - 2)) / 2.0);
      else CHECK(v == base.at(dim));
    }
  }
  std::array<int, 10> bad{};
  bad.fill(0);
  CHECK_THROWS_AS(score_bfi10(bad), Error);
}

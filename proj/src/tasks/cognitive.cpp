#include "stimforge/tasks/cognitive.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "stimforge/common/error.hpp"
#include "stimforge/common/rng.hpp"

namespace stimforge::tasks {
namespace {

constexpr std::array<std::string_view, 8> kLetters{"B", "C", "D", "F", "G", "H", "K", "M"};
constexpr std::array<std::string_view, 8> kShapes{"circle", "square", "triangle", "diamond",
                                                  "star",   "cross",  "hexagon",  "heart"};
constexpr std::array<std::string_view, 8> kSounds{"tone-c4", "tone-d4", "tone-e4", "tone-f4",
                                                  "tone-g4", "tone-a4", "tone-b4", "tone-c5"};
constexpr std::array<std::string_view, 4> kColors{"red", "green", "blue", "yellow"};

void check_timing(const TrialTiming& t) {
  if (t.stimulus_ms <= 0 || t.inter_stimulus_ms < 0) {
    throw Error(Errc::invalid_argument, "trial timing: stimulus must be > 0 and inter-stimulus >= 0");
  }
}

/// `count` distinct positions from [lo, hi), ascending.
std::vector<int> pick_positions(Rng& rng, int lo, int hi, int count) {
  std::vector<int> pool(static_cast<std::size_t>(hi - lo));
  std::iota(pool.begin(), pool.end(), lo);
  rng.shuffle(std::span(pool));
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::string_view to_string(NBackModality m) {
  switch (m) {
    case NBackModality::Letter: return "letter";
    case NBackModality::Shape: return "shape";
    case NBackModality::Sound: return "sound";
  }
  return "letter";
}

std::span<const std::string_view> nback_alphabet(NBackModality m) {
  switch (m) {
    case NBackModality::Letter: return kLetters;
    case NBackModality::Shape: return kShapes;
    case NBackModality::Sound: return kSounds;
  }
  return kLetters;
}

NBackSequence generate_nback(NBackModality modality, int n, int trials, double target_rate, TrialTiming timing,
                             std::uint64_t seed) {
  if (n < 1) throw Error(Errc::invalid_argument, "nback: n must be >= 1");
  if (trials <= n) throw Error(Errc::invalid_argument, "nback: trials must exceed n");
  if (!(target_rate > 0) || target_rate > 1) {
    throw Error(Errc::invalid_argument, "nback: target rate must be in (0, 1]");
  }
  check_timing(timing);
  const int eligible = trials - n;
  const auto targets = static_cast<int>(std::lround(target_rate * eligible));
  const auto alphabet = nback_alphabet(modality);

  Rng rng(Rng::derive(seed, 10));
  const auto positions = pick_positions(rng, n, trials, targets);
  const std::set<int> target_set(positions.begin(), positions.end());

  NBackSequence seq;
  seq.modality = modality;
  seq.n = n;
  for (int i = 0; i < trials; ++i) {
    NBackTrial t;
    t.index = i;
    t.onset_ms = static_cast<std::int64_t>(i) * timing.window_ms();
    t.response_window_ms = timing.window_ms();
    if (i >= n && target_set.contains(i)) {
      t.stimulus = seq.trials[static_cast<std::size_t>(i - n)].stimulus;
      t.is_target = true;
    } else if (i >= n) {
      // Draw from the alphabet minus the symbol n back.
      const auto& back = seq.trials[static_cast<std::size_t>(i - n)].stimulus;
      const auto b = static_cast<std::uint64_t>(std::find(alphabet.begin(), alphabet.end(), back) - alphabet.begin());
      auto k = rng.below(alphabet.size() - 1);
      if (k >= b) ++k;
      t.stimulus = alphabet[k];
    } else {
      t.stimulus = alphabet[rng.below(alphabet.size())];
    }
    seq.trials.push_back(std::move(t));
  }
  return seq;
}

NBackScore score_nback(const NBackSequence& seq, std::span<const int> responses) {
  std::set<int> pressed;
  for (int r : responses) {
    if (r < 0 || r >= static_cast<int>(seq.trials.size())) {
      throw Error(Errc::out_of_range, "nback: response to unknown trial " + std::to_string(r));
    }
    if (!pressed.insert(r).second) throw Error(Errc::duplicate, "nback: duplicate response for trial " + std::to_string(r));
  }
  NBackScore s;
  int eligible = 0;
  for (const auto& t : seq.trials) {
    const bool p = pressed.contains(t.index);
    if (t.index < seq.n) {
      s.early_responses += p ? 1 : 0;
      continue;
    }
    ++eligible;
    if (t.is_target) {
      (p ? s.hits : s.misses)++;
    } else {
      (p ? s.false_alarms : s.correct_rejections)++;
    }
  }
  s.accuracy = eligible > 0 ? static_cast<double>(s.hits + s.correct_rejections) / eligible : 0.0;
  return s;
}

std::string_view to_string(StroopVariant v) {
  switch (v) {
    case StroopVariant::Simple: return "simple";
    case StroopVariant::Complex: return "complex";
    case StroopVariant::Fast: return "fast";
  }
  return "simple";
}

std::span<const std::string_view> stroop_colors() { return kColors; }

std::vector<StroopTrial> generate_stroop(StroopVariant variant, int trials, const StroopOptions& o,
                                         std::uint64_t seed) {
  if (trials <= 0) throw Error(Errc::invalid_argument, "stroop: trials must be positive");
  check_timing(o.timing);
  if (!(o.incongruent_ratio >= 0) || o.incongruent_ratio > 1) {
    throw Error(Errc::invalid_argument, "stroop: incongruent ratio must be in [0, 1]");
  }
  if (!(o.fast_window_factor > 0) || !(o.fast_window_factor < 1)) {
    throw Error(Errc::invalid_argument, "stroop: fast window factor must be in (0, 1)");
  }
  Rng rng(Rng::derive(seed, 11));
  std::set<int> incongruent;
  if (variant != StroopVariant::Simple) {
    const auto count = static_cast<int>(std::lround(o.incongruent_ratio * trials));
    const auto pos = pick_positions(rng, 0, trials, count);
    incongruent.insert(pos.begin(), pos.end());
  }
  int window = o.timing.window_ms();
  if (variant == StroopVariant::Fast) {
    window = std::max(1, static_cast<int>(std::lround(window * o.fast_window_factor)));
  }
  std::vector<StroopTrial> out;
  for (int i = 0; i < trials; ++i) {
    StroopTrial t;
    t.index = i;
    t.onset_ms = static_cast<std::int64_t>(i) * o.timing.window_ms();
    t.response_window_ms = window;
    const auto ink = rng.below(kColors.size());
    t.ink = kColors[ink];
    if (incongruent.contains(i)) {
      auto w = rng.below(kColors.size() - 1);
      if (w >= ink) ++w;
      t.word = kColors[w];
      t.congruent = false;
    } else {
      t.word = t.ink;
    }
    out.push_back(std::move(t));
  }
  return out;
}

StroopScore score_stroop(std::span<const StroopTrial> trials, std::span<const StroopResponse> responses) {
  StroopScore s;
  std::set<int> seen;
  double rt_sum = 0;
  for (const auto& r : responses) {
    if (r.trial_index < 0 || r.trial_index >= static_cast<int>(trials.size())) {
      throw Error(Errc::out_of_range, "stroop: response to unknown trial " + std::to_string(r.trial_index));
    }
    if (!seen.insert(r.trial_index).second) {
      throw Error(Errc::duplicate, "stroop: duplicate response for trial " + std::to_string(r.trial_index));
    }
    const auto& t = trials[static_cast<std::size_t>(r.trial_index)];
    if (r.rt_ms < 0 || r.rt_ms > t.response_window_ms) {
      ++s.timeouts;
    } else if (r.ink == t.ink) {
      ++s.correct;
      rt_sum += r.rt_ms;
    } else {
      ++s.incorrect;
    }
  }
  s.timeouts += static_cast<int>(trials.size() - seen.size());
  s.accuracy = trials.empty() ? 0.0 : static_cast<double>(s.correct) / static_cast<double>(trials.size());
  s.mean_rt_correct_ms = s.correct > 0 ? rt_sum / s.correct : 0.0;
  return s;
}

std::string_view to_string(ArrowLevel level) {
  switch (level) {
    case ArrowLevel::Easy: return "easy";
    case ArrowLevel::Medium: return "medium";
    case ArrowLevel::Hard: return "hard";
  }
  return "easy";
}

int arrow_turns(ArrowLevel level) {
  switch (level) {
    case ArrowLevel::Easy: return 3;
    case ArrowLevel::Medium: return 7;
    case ArrowLevel::Hard: return 11;
  }
  return 3;
}

int count_turns(std::span<const GridCell> cells) {
  int turns = 0;
  for (std::size_t i = 2; i < cells.size(); ++i) {
    const int dr0 = cells[i - 1].row - cells[i - 2].row, dc0 = cells[i - 1].col - cells[i - 2].col;
    const int dr1 = cells[i].row - cells[i - 1].row, dc1 = cells[i].col - cells[i - 1].col;
    if (dr0 != dr1 || dc0 != dc1) ++turns;
  }
  return turns;
}

ArrowPath generate_arrow_path(ArrowLevel level, std::uint64_t seed, int moves) {
  constexpr int kGrid = 8;
  constexpr int kMaxAttempts = 100000;
  constexpr std::array<std::array<int, 2>, 4> kDirs{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};  // clockwise
  const int want = arrow_turns(level);
  if (moves < want + 1) {
    throw Error(Errc::invalid_argument, "arrow: " + std::to_string(moves) + " moves cannot hold " +
                                            std::to_string(want) + " turns");
  }
  const double p_turn = static_cast<double>(want) / moves;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(Rng::derive(seed, 1000 + static_cast<std::uint64_t>(attempt)));
    ArrowPath path;
    GridCell cur{static_cast<int>(rng.below(kGrid)), static_cast<int>(rng.below(kGrid))};
    path.cells.push_back(cur);
    int dir = static_cast<int>(rng.below(4));
    bool ok = true;
    for (int m = 0; m < moves && ok; ++m) {
      auto inside = [&](int d) {
        const int r = cur.row + kDirs[d][0], c = cur.col + kDirs[d][1];
        return r >= 0 && r < kGrid && c >= 0 && c < kGrid;
      };
      // The first move sets the heading, so it can never be a turn.
      const bool turn = m > 0 && (rng.uniform01() < p_turn || !inside(dir));
      if (turn) {
        const int left = (dir + 3) % 4, right = (dir + 1) % 4;
        const bool l = inside(left), r = inside(right);
        if (!l && !r) {
          ok = false;
          break;
        }
        dir = l && r ? (rng.below(2) == 0 ? left : right) : (l ? left : right);
      } else if (!inside(dir)) {
        ok = false;
        break;
      }
      cur = {cur.row + kDirs[dir][0], cur.col + kDirs[dir][1]};
      path.cells.push_back(cur);
    }
    if (!ok) continue;
    path.turn_count = count_turns(path.cells);
    if (path.turn_count == want) return path;
  }
  throw Error(Errc::generation_failed, "arrow: no path with " + std::to_string(want) + " turns after " +
                                           std::to_string(kMaxAttempts) + " attempts");
}

std::string_view to_string(BlinkVariant v) { return v == BlinkVariant::Long ? "long" : "short"; }

std::string_view to_string(CueKind k) {
  switch (k) {
    case CueKind::Close: return "close";
    case CueKind::Open: return "open";
    case CueKind::Beep: return "beep";
  }
  return "beep";
}

std::vector<BlinkCue> blink_schedule(BlinkVariant variant, int interval_ms, int cue_count) {
  if (cue_count <= 0) throw Error(Errc::invalid_argument, "blink: cue count must be positive");
  if (interval_ms <= 0) throw Error(Errc::invalid_argument, "blink: interval must be positive");
  std::vector<BlinkCue> out;
  for (int i = 0; i < cue_count; ++i) {
    BlinkCue c;
    c.index = i;
    c.onset_ms = static_cast<std::int64_t>(i) * interval_ms;
    if (variant == BlinkVariant::Long) {
      c.kind = i % 2 == 0 ? CueKind::Close : CueKind::Open;
      c.text = i % 2 == 0 ? "Close your eyes" : "Open your eyes";
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace stimforge::tasks

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stimforge::tasks {

/// Onset spacing shared by the trial-based tasks.
struct TrialTiming {
  int stimulus_ms = 500;
  int inter_stimulus_ms = 2000;
  /// Responses are accepted from onset until the next onset.
  int window_ms() const { return stimulus_ms + inter_stimulus_ms; }
};

// N-back

enum class NBackModality { Letter, Shape, Sound };
std::string_view to_string(NBackModality m);

/// Symbol sets per modality.
std::span<const std::string_view> nback_alphabet(NBackModality m);

struct NBackTrial {
  int index = 0;
  std::string stimulus;
  bool is_target = false;
  std::int64_t onset_ms = 0;
  int response_window_ms = 0;
  bool operator==(const NBackTrial&) const = default;
};

struct NBackSequence {
  NBackModality modality = NBackModality::Letter;
  int n = 2;
  std::vector<NBackTrial> trials;
  bool operator==(const NBackSequence&) const = default;
};

/// round(target_rate * (trials - n)) targets at seeded positions among the
/// eligible trials; non-targets never match the symbol n back. Throws
/// invalid_argument when n < 1, trials <= n or target_rate is outside (0, 1].
NBackSequence generate_nback(NBackModality modality, int n, int trials, double target_rate, TrialTiming timing,
                             std::uint64_t seed);

struct NBackScore {
  int hits = 0;
  int misses = 0;
  int false_alarms = 0;
  int correct_rejections = 0;
  /// Presses on trials with index < n; not part of the signal-detection counts.
  int early_responses = 0;
  double accuracy = 0;
  bool operator==(const NBackScore&) const = default;
};

/// `responses` are indices of trials the participant marked as matches.
/// Throws duplicate for a repeated index, out_of_range for an unknown one.
NBackScore score_nback(const NBackSequence& sequence, std::span<const int> responses);

// Stroop

enum class StroopVariant { Simple, Complex, Fast };
std::string_view to_string(StroopVariant v);

std::span<const std::string_view> stroop_colors();

struct StroopTrial {
  int index = 0;
  std::string word;
  std::string ink;
  bool congruent = true;
  std::int64_t onset_ms = 0;
  int response_window_ms = 0;
  bool operator==(const StroopTrial&) const = default;
};

struct StroopOptions {
  TrialTiming timing;
  /// Fraction of incongruent trials in the complex and fast variants.
  double incongruent_ratio = 0.5;
  /// Response window multiplier of the fast variant, in (0, 1).
  double fast_window_factor = 0.5;
};

/// Simple: all congruent. Complex: exactly round(ratio * trials) incongruent
/// trials at seeded positions. Fast: same mix with the response window
/// scaled by the fast factor.
std::vector<StroopTrial> generate_stroop(StroopVariant variant, int trials, const StroopOptions& options,
                                         std::uint64_t seed);

struct StroopResponse {
  int trial_index = 0;
  std::string ink;
  /// Reaction time from onset.
  int rt_ms = 0;
};

struct StroopScore {
  int correct = 0;
  int incorrect = 0;
  /// Responses after the trial's window, and trials with no response.
  int timeouts = 0;
  double accuracy = 0;
  double mean_rt_correct_ms = 0;
  bool operator==(const StroopScore&) const = default;
};

StroopScore score_stroop(std::span<const StroopTrial> trials, std::span<const StroopResponse> responses);

// Arrow tracking

enum class ArrowLevel { Easy, Medium, Hard };
std::string_view to_string(ArrowLevel level);

/// 3, 7 and 11 turns.
int arrow_turns(ArrowLevel level);

struct GridCell {
  int row = 0;
  int col = 0;
  bool operator==(const GridCell&) const = default;
};

struct ArrowPath {
  int grid_size = 8;
  std::vector<GridCell> cells;
  int turn_count = 0;
  bool operator==(const ArrowPath&) const = default;
};

/// Direction changes along a path of 4-adjacent cells.
int count_turns(std::span<const GridCell> cells);

/// Seeded walk of `moves` steps on an 8x8 grid without 180 degree
/// reversals, retried with derived seeds until it has exactly the level's
/// turn count. Throws generation_failed after 100000 attempts and
/// invalid_argument when moves cannot hold the turns.
ArrowPath generate_arrow_path(ArrowLevel level, std::uint64_t seed, int moves = 20);

// Blink

enum class BlinkVariant { Long, Short };
std::string_view to_string(BlinkVariant v);

enum class CueKind { Close, Open, Beep };
std::string_view to_string(CueKind k);

struct BlinkCue {
  int index = 0;
  std::int64_t onset_ms = 0;
  CueKind kind = CueKind::Beep;
  /// Shown text; empty for beep-only cues.
  std::string text;
  bool beep = true;
  bool operator==(const BlinkCue&) const = default;
};

/// Long: alternating close/open text cues, each with a beep. Short: beeps
/// only. Onsets at k * interval_ms.
std::vector<BlinkCue> blink_schedule(BlinkVariant variant, int interval_ms, int cue_count);

}  // namespace stimforge::tasks

#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stimforge/common/json.hpp"

namespace stimforge::tasks {

inline constexpr std::string_view kInstrumentSchemaVersion = "stimforge.instrument/1";

enum class ItemKind { Radio, Checkbox, Text, Number, Likert };
std::string_view to_string(ItemKind kind);

struct LikertScale {
  double min = 1;
  double max = 5;
  double step = 1;
  std::vector<std::string> labels;
  bool operator==(const LikertScale&) const = default;
};

struct InstrumentItem {
  std::string item_id;
  std::string prompt;
  ItemKind kind = ItemKind::Text;
  std::vector<std::string> options;
  bool required = false;
  std::optional<double> min;  // Number only
  std::optional<double> max;
  std::optional<LikertScale> scale;  // Likert only
  /// Scoring dimension the item feeds (NASA-TLX ratings).
  std::string dimension;
  /// Only presented in NASA-TLX weighted mode (the pairwise comparisons).
  bool weighted_only = false;
  bool operator==(const InstrumentItem&) const = default;
};

/// A `.instrument.json` document.
struct Instrument {
  std::string instrument_id;  // demographics, nasa-tlx, bfi10 or custom
  std::string title;
  std::vector<InstrumentItem> items;
  Json scoring = nullptr;
  bool operator==(const Instrument&) const = default;
};

/// Strict parse. Throws parse_error for unknown fields and
/// validation_error for duplicate item ids, missing options or scales.
Instrument parse_instrument(const Json& json);
Json to_json(const Instrument& instrument);

/// Shipped instruments: "demographics", "nasa-tlx", "bfi10".
const Instrument& builtin_instrument(std::string_view id);

/// Items shown to the participant; pairwise items only when weighted.
std::vector<const InstrumentItem*> presented_items(const Instrument& instrument, bool weighted);

/// Checks an answers object {item_id: value} against the presented items.
/// Throws validation_error naming the first offending item.
void validate_answers(const Instrument& instrument, const Json& answers, bool weighted);

inline constexpr std::array<std::string_view, 6> kNasaTlxDimensions{"mental",      "physical", "temporal",
                                                                   "performance", "effort",   "frustration"};

struct NasaTlxScore {
  /// Raw: the ratings. Weighted: weight times rating.
  std::array<double, 6> dimension_scores{};
  double overall = 0;
  bool weighted = false;
};

/// Raw overall = mean of the 6 ratings; weighted overall = sum(w * r) / 15.
/// Throws out_of_range for ratings outside [0, 100], invalid_argument for
/// a rating count other than 6 or weights that are not 6 tallies in 0..5
/// summing to 15.
NasaTlxScore score_nasa_tlx(std::span<const double> ratings, std::optional<std::span<const int>> weights = std::nullopt);

/// Tallies per dimension from the 15 pairwise answers.
std::array<int, 6> nasa_tlx_weights(const Instrument& instrument, const Json& answers);

/// Dimension means of a positive and a reverse-coded item (reverse = 6 - a),
/// keyed by dimension name, using the key in the shipped instrument.
/// Throws out_of_range for answers outside 1..5, invalid_argument unless
/// exactly 10 answers are given (in item order bfi1..bfi10).
std::map<std::string, double> score_bfi10(std::span<const int> answers);

/// Scores for scored instruments (nasa-tlx, bfi10); null otherwise.
Json score_questionnaire(const Instrument& instrument, const Json& answers, bool weighted);

}  // namespace stimforge::tasks

#include "stimforge/tasks/questionnaire.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

#include "stimforge/common/error.hpp"
#include "stimforge/common/resources.hpp"

namespace stimforge::tasks {
namespace {

constexpr std::array<std::pair<ItemKind, std::string_view>, 5> kKinds{{
    {ItemKind::Radio, "radio"},
    {ItemKind::Checkbox, "checkbox"},
    {ItemKind::Text, "text"},
    {ItemKind::Number, "number"},
    {ItemKind::Likert, "likert"},
}};

[[noreturn]] void invalid(const std::string& msg) { throw Error(Errc::validation_error, msg); }

InstrumentItem parse_item(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  InstrumentItem it;
  it.item_id = r.get<std::string>("item_id");
  it.prompt = r.get<std::string>("prompt");
  const auto kind = r.get<std::string>("kind");
  bool found = false;
  for (const auto& [k, name] : kKinds) {
    if (name == kind) {
      it.kind = k;
      found = true;
    }
  }
  if (!found) throw Error(Errc::parse_error, path + ".kind: unknown item kind '" + kind + "'");
  it.options = r.get_or<std::vector<std::string>>("options", {});
  it.required = r.get_or("required", false);
  if (r.has("min")) it.min = r.get<double>("min");
  if (r.has("max")) it.max = r.get<double>("max");
  if (r.has("scale")) {
    ObjectReader s(r.at("scale"), path + ".scale");
    LikertScale sc;
    sc.min = s.get<double>("min");
    sc.max = s.get<double>("max");
    sc.step = s.get_or("step", 1.0);
    sc.labels = s.get_or<std::vector<std::string>>("labels", {});
    s.finish();
    it.scale = sc;
  }
  it.dimension = r.get_or<std::string>("dimension", "");
  it.weighted_only = r.get_or("weighted_only", false);
  r.finish();

  if (it.item_id.empty()) invalid(path + ": empty item_id");
  if ((it.kind == ItemKind::Radio || it.kind == ItemKind::Checkbox) && it.options.empty()) {
    invalid(path + ": " + std::string(to_string(it.kind)) + " item needs options");
  }
  if (it.kind == ItemKind::Likert) {
    if (!it.scale) invalid(path + ": likert item needs a scale");
    if (!(it.scale->max > it.scale->min) || !(it.scale->step > 0)) invalid(path + ": likert scale needs min < max, step > 0");
  }
  if (it.min && it.max && *it.min > *it.max) invalid(path + ": min exceeds max");
  return it;
}

bool on_scale(const LikertScale& s, double v) {
  if (v < s.min || v > s.max) return false;
  const double k = (v - s.min) / s.step;
  return std::abs(k - std::round(k)) < 1e-9;
}

}  // namespace

std::string_view to_string(ItemKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "text";
}

Instrument parse_instrument(const Json& json) {
  ObjectReader r(json, "instrument");
  const auto version = r.get<std::string>("schema_version");
  if (version != kInstrumentSchemaVersion) {
    throw Error(Errc::version_error, "instrument: unsupported schema_version '" + version + "'");
  }
  Instrument inst;
  inst.instrument_id = r.get<std::string>("instrument_id");
  inst.title = r.get_or<std::string>("title", "");
  const Json& items = r.at("items");
  if (!items.is_array()) throw Error(Errc::parse_error, "instrument.items: expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto item = parse_item(items[i], "instrument.items[" + std::to_string(i) + "]");
    if (!ids.insert(item.item_id).second) invalid("instrument: duplicate item_id '" + item.item_id + "'");
    inst.items.push_back(std::move(item));
  }
  if (r.has("scoring")) inst.scoring = r.at("scoring");
  r.finish();
  static const std::set<std::string, std::less<>> kIds{"demographics", "nasa-tlx", "bfi10", "custom"};
  if (!kIds.contains(inst.instrument_id)) invalid("instrument: unknown instrument_id '" + inst.instrument_id + "'");
  if (inst.items.empty()) invalid("instrument: no items");
  return inst;
}

Json to_json(const Instrument& inst) {
  Json items = Json::array();
  for (const auto& it : inst.items) {
    Json j{{"item_id", it.item_id},
           {"prompt", it.prompt},
           {"kind", to_string(it.kind)},
           {"options", it.options},
           {"required", it.required}};
    if (it.min) j["min"] = *it.min;
    if (it.max) j["max"] = *it.max;
    if (it.scale) {
      j["scale"] = {{"min", it.scale->min}, {"max", it.scale->max}, {"step", it.scale->step}, {"labels", it.scale->labels}};
    }
    if (!it.dimension.empty()) j["dimension"] = it.dimension;
    if (it.weighted_only) j["weighted_only"] = true;
    items.push_back(std::move(j));
  }
  Json out{{"schema_version", kInstrumentSchemaVersion},
           {"instrument_id", inst.instrument_id},
           {"title", inst.title},
           {"items", items}};
  if (!inst.scoring.is_null()) out["scoring"] = inst.scoring;
  return out;
}

const Instrument& builtin_instrument(std::string_view id) {
  static std::once_flag once;
  static std::map<std::string, Instrument, std::less<>> table;
  std::call_once(once, [] {
    for (const char* name : {"demographics", "nasa-tlx", "bfi10"}) {
      const auto text = embedded_resource(std::string("instruments/") + name + ".instrument.json");
      if (!text) throw Error(Errc::not_found, std::string("missing built-in instrument ") + name);
      table.emplace(name, parse_instrument(parse_json(*text)));
    }
  });
  auto it = table.find(id);
  if (it == table.end()) throw Error(Errc::not_found, "no built-in instrument '" + std::string(id) + "'");
  return it->second;
}

std::vector<const InstrumentItem*> presented_items(const Instrument& inst, bool weighted) {
  std::vector<const InstrumentItem*> out;
  for (const auto& it : inst.items) {
    if (!it.weighted_only || weighted) out.push_back(&it);
  }
  return out;
}

void validate_answers(const Instrument& inst, const Json& answers, bool weighted) {
  if (!answers.is_object()) invalid("answers: expected an object");
  const auto items = presented_items(inst, weighted);
  std::set<std::string, std::less<>> known;
  for (const auto* it : items) known.insert(it->item_id);
  for (const auto& [key, _] : answers.items()) {
    if (!known.contains(key)) invalid("answers: unknown item '" + key + "'");
  }
  for (const auto* it : items) {
    auto a = answers.find(it->item_id);
    const std::string where = "answers." + it->item_id;
    if (a == answers.end() || a->is_null()) {
      if (it->required) invalid(where + ": required");
      continue;
    }
    switch (it->kind) {
      case ItemKind::Radio:
        if (!a->is_string() || std::find(it->options.begin(), it->options.end(), a->get<std::string>()) == it->options.end()) {
          invalid(where + ": expected one of the options");
        }
        break;
      case ItemKind::Checkbox: {
        if (!a->is_array()) invalid(where + ": expected an array of options");
        std::set<std::string> picked;
        for (const auto& v : *a) {
          if (!v.is_string() || std::find(it->options.begin(), it->options.end(), v.get<std::string>()) == it->options.end()) {
            invalid(where + ": expected only listed options");
          }
          if (!picked.insert(v.get<std::string>()).second) invalid(where + ": option listed twice");
        }
        if (it->required && picked.empty()) invalid(where + ": required");
        break;
      }
      case ItemKind::Text:
        if (!a->is_string()) invalid(where + ": expected text");
        if (it->required && a->get<std::string>().empty()) invalid(where + ": required");
        break;
      case ItemKind::Number: {
        if (!a->is_number()) invalid(where + ": expected a number");
        const double v = a->get<double>();
        if ((it->min && v < *it->min) || (it->max && v > *it->max)) invalid(where + ": out of range");
        break;
      }
      case ItemKind::Likert:
        if (!a->is_number() || !on_scale(*it->scale, a->get<double>())) invalid(where + ": not a scale point");
        break;
    }
  }
}

NasaTlxScore score_nasa_tlx(std::span<const double> ratings, std::optional<std::span<const int>> weights) {
  if (ratings.size() != 6) throw Error(Errc::invalid_argument, "nasa-tlx: expected 6 ratings");
  for (double r : ratings) {
    if (!(r >= 0 && r <= 100)) throw Error(Errc::out_of_range, "nasa-tlx: rating outside [0, 100]");
  }
  NasaTlxScore s;
  if (!weights) {
    for (std::size_t i = 0; i < 6; ++i) s.dimension_scores[i] = ratings[i];
    s.overall = std::accumulate(ratings.begin(), ratings.end(), 0.0) / 6.0;
    return s;
  }
  if (weights->size() != 6) throw Error(Errc::invalid_argument, "nasa-tlx: expected 6 weights");
  int sum = 0;
  for (int w : *weights) {
    if (w < 0 || w > 5) throw Error(Errc::invalid_argument, "nasa-tlx: each weight must be a tally in 0..5");
    sum += w;
  }
  if (sum != 15) throw Error(Errc::invalid_argument, "nasa-tlx: weights must sum to 15");
  s.weighted = true;
  double total = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    s.dimension_scores[i] = (*weights)[i] * ratings[i];
    total += s.dimension_scores[i];
  }
  s.overall = total / 15.0;
  return s;
}

std::array<int, 6> nasa_tlx_weights(const Instrument& inst, const Json& answers) {
  std::array<int, 6> w{};
  for (const auto& it : inst.items) {
    if (!it.weighted_only) continue;
    auto a = answers.find(it.item_id);
    if (a == answers.end() || !a->is_string()) invalid("nasa-tlx: missing pairwise answer " + it.item_id);
    const auto pick = a->get<std::string>();
    const auto pos = std::find(kNasaTlxDimensions.begin(), kNasaTlxDimensions.end(), pick);
    if (pos == kNasaTlxDimensions.end()) invalid("nasa-tlx: unknown dimension '" + pick + "'");
    ++w[static_cast<std::size_t>(pos - kNasaTlxDimensions.begin())];
  }
  return w;
}

std::map<std::string, double> score_bfi10(std::span<const int> answers) {
  if (answers.size() != 10) throw Error(Errc::invalid_argument, "bfi10: expected 10 answers");
  for (int a : answers) {
    if (a < 1 || a > 5) throw Error(Errc::out_of_range, "bfi10: answers must be 1..5");
  }
  const auto& inst = builtin_instrument("bfi10");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < inst.items.size(); ++i) index[inst.items[i].item_id] = i;
  std::map<std::string, double> out;
  for (const auto& [dim, key] : inst.scoring.at("dimensions").items()) {
    const auto& items = key.at("items");
    const auto& reverse = key.at("reverse");
    double sum = 0;
    for (const auto& id : items) {
      const int a = answers[index.at(id.get<std::string>())];
      const bool rev = std::find(reverse.begin(), reverse.end(), id) != reverse.end();
      sum += rev ? 6 - a : a;
    }
    out[dim] = sum / static_cast<double>(items.size());
  }
  return out;
}

Json score_questionnaire(const Instrument& inst, const Json& answers, bool weighted) {
  if (inst.instrument_id == "nasa-tlx") {
    std::array<double, 6> ratings{};
    for (std::size_t i = 0; i < 6; ++i) ratings[i] = answers.at(std::string(kNasaTlxDimensions[i])).get<double>();
    std::optional<std::array<int, 6>> w;
    if (weighted) w = nasa_tlx_weights(inst, answers);
    const auto s = w ? score_nasa_tlx(ratings, std::span<const int>(*w)) : score_nasa_tlx(ratings);
    Json dims = Json::object();
    for (std::size_t i = 0; i < 6; ++i) dims[std::string(kNasaTlxDimensions[i])] = s.dimension_scores[i];
    Json out{{"overall", s.overall}, {"weighted", s.weighted}, {"dimensions", dims}};
    if (w) out["weights"] = *w;
    return out;
  }
  if (inst.instrument_id == "bfi10") {
    std::array<int, 10> a{};
    for (std::size_t i = 0; i < 10; ++i) a[i] = answers.at(inst.items[i].item_id).get<int>();
    Json out = Json::object();
    for (const auto& [dim, v] : score_bfi10(a)) out[dim] = v;
    return {{"dimensions", out}};
  }
  return nullptr;
}

}  // namespace stimforge::tasks

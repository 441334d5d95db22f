#include "stimforge/protocol/flow.hpp"

#include "stimforge/common/hash.hpp"

namespace stimforge::protocol {
namespace {

Json step_json(const FlowStep& step) {
  Json j{{"step_id", step.step_id}, {"task_type", to_string(step.task_type)}, {"overrides", step.overrides}};
  if (step.seed) j["seed"] = *step.seed;
  return j;
}

FlowStep step_from(const Json& j, const std::string& path, const Json& global_json) {
  ObjectReader r(j, path);
  FlowStep step;
  step.step_id = r.get<std::string>("step_id");
  const auto type_name = r.get<std::string>("task_type");
  const auto type = task_type_from_string(type_name);
  if (!type) throw Error(Errc::parse_error, path + ".task_type: unknown task type '" + type_name + "'");
  step.task_type = *type;
  if (r.has("overrides")) {
    step.overrides = r.at("overrides");
    if (!step.overrides.is_object()) {
      throw Error(Errc::parse_error, path + ".overrides: expected an object");
    }
    // Structure check: the merged document must still be a valid preset.
    settings_from_json(merge_overrides(global_json, step.overrides), path + ".overrides");
  }
  if (r.has("seed") && !r.at("seed").is_null()) step.seed = r.get<std::uint64_t>("seed");
  r.finish();
  return step;
}

}  // namespace

Json merge_overrides(const Json& base, const Json& overrides) {
  Json out = base;
  for (const auto& [key, value] : overrides.items()) {
    auto it = out.find(key);
    if (value.is_object() && it != out.end() && it->is_object() && key != "customInstrument") {
      *it = merge_overrides(*it, value);
    } else {
      out[key] = value;
    }
  }
  return out;
}

std::string serialize_flow(const ExperimentFlow& flow) {
  Json steps = Json::array();
  for (const auto& s : flow.steps) steps.push_back(step_json(s));
  Json j{{"schema_version", flow.schema_version},
         {"flow_id", flow.flow_id},
         {"name", flow.name},
         {"created_utc_ms", flow.created_utc_ms},
         {"global_preset", to_json(flow.global_preset)},
         {"steps", std::move(steps)}};
  return j.dump(2) + "\n";
}

ExperimentFlow parse_flow(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object()) throw Error(Errc::parse_error, "flow: expected a JSON object");
  // Version first: a newer document may legitimately carry fields we do not know.
  auto v = j.find("schema_version");
  if (v == j.end() || !v->is_string()) {
    throw Error(Errc::version_error, "flow: missing schema_version");
  }
  if (v->get<std::string>() != kFlowSchemaVersion) {
    throw Error(Errc::version_error, "flow: unsupported schema_version '" + v->get<std::string>() +
                                         "' (this build understands " + std::string(kFlowSchemaVersion) + ")");
  }
  ObjectReader r(j, "flow");
  ExperimentFlow flow;
  flow.schema_version = r.get<std::string>("schema_version");
  flow.flow_id = r.get<std::string>("flow_id");
  flow.name = r.get_or<std::string>("name", "");
  flow.created_utc_ms = r.get_or<std::int64_t>("created_utc_ms", 0);
  flow.global_preset = settings_from_json(r.at("global_preset"), "flow.global_preset");
  const Json global_json = to_json(flow.global_preset);
  const Json& steps = r.at("steps");
  if (!steps.is_array()) throw Error(Errc::parse_error, "flow.steps: expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    flow.steps.push_back(step_from(steps[i], "flow.steps[" + std::to_string(i) + "]", global_json));
  }
  r.finish();
  return flow;
}

std::string flow_hash(const ExperimentFlow& flow) { return sha256_hex(serialize_flow(flow)); }

SettingsPreset resolve_step_settings(const ExperimentFlow& flow, std::size_t step_index) {
  if (step_index >= flow.steps.size()) {
    throw Error(Errc::out_of_range, "resolve_step_settings: step index " + std::to_string(step_index) +
                                        " out of range (flow has " + std::to_string(flow.steps.size()) +
                                        " steps)");
  }
  const auto& overrides = flow.steps[step_index].overrides;
  if (overrides.empty()) return flow.global_preset;
  return settings_from_json(merge_overrides(to_json(flow.global_preset), overrides),
                            "steps[" + std::to_string(step_index) + "].overrides");
}

int instance_index(const ExperimentFlow& flow, std::size_t step_index) {
  int count = 0;
  for (std::size_t i = 0; i < step_index && i < flow.steps.size(); ++i) {
    if (flow.steps[i].task_type == flow.steps[step_index].task_type) ++count;
  }
  return count;
}

}  // namespace stimforge::protocol

// Python bindings. Documents cross the boundary as JSON text or plain
// Python objects (dict/list), never as wrapped C++ types.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stimforge/common/error.hpp"
#include "stimforge/engine/plan.hpp"
#include "stimforge/engine/runner.hpp"
#include "stimforge/eventlog/reconstruct.hpp"
#include "stimforge/eventlog/session_log.hpp"
#include "stimforge/eventlog/verify.hpp"
#include "stimforge/markers/alignment.hpp"
#include "stimforge/markers/detection.hpp"
#include "stimforge/markers/layout.hpp"
#include "stimforge/protocol/flow.hpp"
#include "stimforge/protocol/validate.hpp"
#include "stimforge/sync/clock.hpp"
#include "stimforge/tasks/questionnaire.hpp"

namespace py = pybind11;
namespace sf = stimforge;

namespace {

py::object to_py(const sf::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

sf::Json from_py(const py::object& o) {
  return sf::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

sf::eventlog::SessionLog parse_log(const std::string& text) { return sf::eventlog::parse_session_log(text); }

}  // namespace

PYBIND11_MODULE(_stimforge, m) {
  m.doc() = "Stimulus protocols, session logs and marker alignment";

  // Kept alive for the life of the interpreter; the translator cannot capture.
  static PyObject* error_type = py::module_::import("stimforge.errors").attr("StimforgeError").cast<py::object>().release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sf::Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(std::string(sf::errc_name(e.code())), e.what());
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  m.def("flow_hash", [](const std::string& text) { return sf::protocol::flow_hash(sf::protocol::parse_flow(text)); },
        py::arg("flow_text"), "SHA-256 of the canonical serialization.");
  m.def("canonical_flow", [](const std::string& text) { return sf::protocol::serialize_flow(sf::protocol::parse_flow(text)); },
        py::arg("flow_text"));
  m.def(
      "validate_flow",
      [](const std::string& text) {
        return to_py(sf::protocol::to_json(sf::protocol::validate_flow(sf::protocol::parse_flow(text))));
      },
      py::arg("flow_text"), "ValidationReport as a dict: {ok, issues}.");
  m.def(
      "resolve_step_settings",
      [](const std::string& text, std::size_t index) {
        return to_py(sf::protocol::to_json(sf::protocol::resolve_step_settings(sf::protocol::parse_flow(text), index)));
      },
      py::arg("flow_text"), py::arg("step_index"));
  m.def(
      "plan",
      [](const std::string& text) {
        sf::Json steps = sf::Json::array();
        for (const auto& p : sf::engine::plan_session(sf::protocol::parse_flow(text), nullptr)) {
          steps.push_back(sf::engine::to_json(p));
        }
        return to_py(steps);
      },
      py::arg("flow_text"));
  m.def(
      "pursuit_vectors",
      [](const std::string& text, std::size_t index, double rate_hz) {
        return to_py(sf::engine::pursuit_vectors(sf::engine::plan_step(sf::protocol::parse_flow(text), index, nullptr), rate_hz));
      },
      py::arg("flow_text"), py::arg("step_index"), py::arg("rate_hz") = 60.0);

  m.def(
      "run_headless",
      [](const std::string& text, std::uint64_t seed) {
        sf::engine::HeadlessOptions opt;
        opt.seed = seed;
        const auto r = sf::engine::run_headless(sf::protocol::parse_flow(text), opt);
        return sf::eventlog::render_session_log(r.header, r.entries, true);
      },
      py::arg("flow_text"), py::arg("seed") = 0, "Sealed session log text.");
  m.def(
      "verify",
      [](const std::string& log_text, const std::string& flow_text) {
        return to_py(sf::eventlog::to_json(sf::eventlog::verify(parse_log(log_text), sf::protocol::parse_flow(flow_text))));
      },
      py::arg("log_text"), py::arg("flow_text"));
  m.def(
      "reconstruct",
      [](const std::string& log_text, bool strict) {
        return to_py(sf::eventlog::to_json(sf::eventlog::reconstruct(parse_log(log_text), strict)));
      },
      py::arg("log_text"), py::arg("strict") = true);
  m.def(
      "seal_valid", [](const std::string& log_text) { return parse_log(log_text).seal_valid(); }, py::arg("log_text"));

  m.def(
      "estimate_offset",
      [](double t0, double t1, double t2, double t3) {
        const auto s = sf::sync::estimate_offset(t0, t1, t2, t3);
        return py::make_tuple(s.offset_ms, s.rtt_ms);
      },
      py::arg("t0"), py::arg("t1"), py::arg("t2"), py::arg("t3"), "(offset_ms, rtt_ms)");

  m.def(
      "score_nasa_tlx",
      [](const std::vector<double>& ratings, std::optional<std::vector<int>> weights) {
        const auto s = weights ? sf::tasks::score_nasa_tlx(ratings, std::span<const int>(*weights))
                               : sf::tasks::score_nasa_tlx(ratings);
        py::dict d;
        d["overall"] = s.overall;
        d["weighted"] = s.weighted;
        d["dimensions"] = std::vector<double>(s.dimension_scores.begin(), s.dimension_scores.end());
        return d;
      },
      py::arg("ratings"), py::arg("weights") = py::none());
  m.def(
      "score_bfi10", [](const std::vector<int>& answers) { return sf::tasks::score_bfi10(answers); }, py::arg("answers"));
  m.def(
      "score_questionnaire",
      [](const std::string& instrument_id, const py::object& answers, bool weighted) {
        return to_py(sf::tasks::score_questionnaire(sf::tasks::builtin_instrument(instrument_id), from_py(answers), weighted));
      },
      py::arg("instrument_id"), py::arg("answers"), py::arg("weighted") = false);

  m.def(
      "edge_marker_layout",
      [](int w, int h, int size) {
        const auto layout = sf::markers::edge_marker_layout(w, h, size);
        py::list out;
        for (const auto& mk : layout.markers) {
          py::dict d;
          d["marker_id"] = mk.marker_id;
          d["center_x"] = mk.center_x;
          d["center_y"] = mk.center_y;
          d["size_px"] = mk.size_px;
          out.append(d);
        }
        return out;
      },
      py::arg("viewport_w_px"), py::arg("viewport_h_px"), py::arg("marker_size_px") = 96);
  m.def(
      "simulate_camera",
      [](const std::string& log_text, double fps, double offset_ms, std::uint64_t seed) {
        const auto log = parse_log(log_text);
        const auto plan = sf::markers::marker_plan_from_log(log.entries);
        // Pixel density from the first settings snapshot; the plan already required one.
        sf::markers::ScreenPose pose;
        for (const auto& e : log.entries) {
          if (e.event_type != "TaskStart" || !e.details.contains("currentSettings")) continue;
          const auto s = sf::protocol::settings_from_json(e.details.at("currentSettings"));
          pose.px_per_cm_x = s.px_per_cm_x();
          pose.px_per_cm_y = s.px_per_cm_y();
          break;
        }
        sf::markers::CameraSimulation sim;
        sim.fps = fps;
        sim.clock_offset_ms = offset_ms;
        sim.seed = seed;
        const auto det = sf::markers::simulate_camera(log.entries, plan, pose, sf::markers::CameraIntrinsics{}, sim);
        std::ostringstream out;
        sf::markers::write_detections(out, det);
        return out.str();
      },
      py::arg("log_text"), py::arg("fps") = 30.0, py::arg("offset_ms") = 0.0, py::arg("seed") = 0,
      "Detections file text for a camera 60 cm in front of the screen.");
  m.def(
      "align",
      [](const std::string& log_text, const std::string& detections_text) {
        std::istringstream in(detections_text);
        const auto det = sf::markers::read_detections(in);
        return to_py(sf::markers::to_json(sf::markers::align_timelines(det, parse_log(log_text).entries)));
      },
      py::arg("log_text"), py::arg("detections_text"));
}

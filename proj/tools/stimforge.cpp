#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>

#include "stimforge/common/error.hpp"
#include "stimforge/common/fs.hpp"
#include "stimforge/engine/runner.hpp"
#include "stimforge/eventlog/reconstruct.hpp"
#include "stimforge/eventlog/verify.hpp"
#include "stimforge/markers/alignment.hpp"
#include "stimforge/protocol/validate.hpp"
#include "stimforge/service/server.hpp"

namespace sf = stimforge;
namespace fs = std::filesystem;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kError = 2;

sf::protocol::ExperimentFlow load_flow(const fs::path& p) { return sf::protocol::parse_flow(sf::read_file_or_throw(p)); }

std::unique_ptr<sf::tasks::MediaStore> media_store(const std::string& store) {
  if (store.empty()) return nullptr;
  return std::make_unique<sf::tasks::MediaStore>(fs::path(store) / "media");
}

void print(const sf::Json& j) { std::cout << j.dump(2) << "\n"; }

/// Camera 60 cm in front of the screen centre, looking at it.
sf::markers::ScreenPose default_pose(const std::vector<sf::eventlog::LogEntry>& entries) {
  sf::markers::ScreenPose pose;
  for (const auto& e : entries) {
    if (e.event_type != sf::eventlog::event::kTaskStart || !e.details.contains("currentSettings")) continue;
    const auto s = sf::protocol::settings_from_json(e.details.at("currentSettings"));
    pose.px_per_cm_x = s.px_per_cm_x();
    pose.px_per_cm_y = s.px_per_cm_y();
    return pose;
  }
  throw sf::Error(sf::Errc::invalid_argument, "log has no TaskStart with a settings snapshot");
}

int serve(const std::string& config_file, const std::string& addr, const std::string& store_dir,
          const std::string& static_dir) {
  auto cfg = sf::service::load_config(config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file));
  if (!addr.empty()) sf::service::apply_address(cfg, addr);
  if (!store_dir.empty()) cfg.store = store_dir;
  if (!static_dir.empty()) cfg.static_dir = static_dir;
  spdlog::set_level(spdlog::level::from_str(cfg.log_level));

  // Block the signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  sf::service::Store store(cfg.store);
  sf::service::SessionRegistry sessions(store, cfg.queue_limit);
  sf::service::Server server(cfg, store, sessions);
  server.start();
  std::cout << sf::Json{{"listening", cfg.host + ":" + std::to_string(server.port())}, {"store", cfg.store.string()}}.dump()
            << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  spdlog::info("signal {}, shutting down", sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stimforge: stimulus protocols, session logs and marker alignment"};
  app.require_subcommand(1);

  std::string config_file, addr, store_dir, static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/WebSocket service");
  serve_cmd->add_option("--config", config_file, "JSON config file");
  serve_cmd->add_option("--addr", addr, "host:port (overrides config and STIMFORGE_ADDR)");
  serve_cmd->add_option("--store", store_dir, "Store directory (overrides config and STIMFORGE_STORE)");
  serve_cmd->add_option("--static-dir", static_dir, "Directory served under /stimuli/");

  std::string flow_path, log_path, det_path, out_path, media_dir;
  std::uint64_t seed = 0;

  auto* validate_cmd = app.add_subcommand("validate", "Validate a flow; exit 0 iff ok");
  validate_cmd->add_option("flow", flow_path)->required();
  validate_cmd->add_option("--store", media_dir, "Store directory for uploaded media");

  auto* format_cmd = app.add_subcommand("format", "Print a flow in canonical form");
  format_cmd->add_option("flow", flow_path)->required();

  auto* plan_cmd = app.add_subcommand("plan", "Print the presentation plan of every step");
  plan_cmd->add_option("flow", flow_path)->required();
  plan_cmd->add_option("--store", media_dir, "Store directory for uploaded media");

  double rate_hz = 60;
  auto* vectors_cmd = app.add_subcommand("pursuit-vectors", "Sample every pursuit step's closed-form path (presenter test vectors)");
  vectors_cmd->add_option("flow", flow_path)->required();
  vectors_cmd->add_option("--hz", rate_hz, "Sampling rate")->capture_default_str();

  auto* run_cmd = app.add_subcommand("run-headless", "Run a flow on a virtual clock with a simulated participant");
  run_cmd->add_option("flow", flow_path)->required();
  run_cmd->add_option("--seed", seed, "Seed of the simulated participant")->required();
  run_cmd->add_option("--out", out_path, "Log path (default: <flow_id>.session.jsonl)");
  run_cmd->add_option("--store", media_dir, "Store directory for uploaded media");

  bool summary = false;
  auto* replay_cmd = app.add_subcommand("replay", "Reconstruct the per-task timeline of a log");
  replay_cmd->add_option("log", log_path)->required();
  replay_cmd->add_flag("--summary", summary, "Only counts per task");

  auto* verify_cmd = app.add_subcommand("verify", "Verify a log against its flow; exit 0 iff every check passes");
  verify_cmd->add_option("log", log_path)->required();
  verify_cmd->add_option("flow", flow_path)->required();
  verify_cmd->add_option("--store", media_dir, "Store directory for uploaded media");

  sf::markers::CameraSimulation sim;
  double phase = -1;
  std::string pose_path, intr_path;
  auto* sim_cmd = app.add_subcommand("simulate-camera", "Synthesize scene-camera marker detections for a log");
  sim_cmd->add_option("log", log_path)->required();
  sim_cmd->add_option("--fps", sim.fps, "Camera frame rate")->capture_default_str();
  sim_cmd->add_option("--offset", sim.clock_offset_ms, "Camera clock minus log clock, ms")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Frame phase and noise seed")->capture_default_str();
  sim_cmd->add_option("--phase", phase, "First frame time on the camera clock (default: seeded)");
  sim_cmd->add_option("--noise", sim.corner_noise_px, "Corner noise sigma, px")->capture_default_str();
  sim_cmd->add_option("--pose", pose_path, "Screen pose JSON (default: 60 cm in front, facing)");
  sim_cmd->add_option("--intrinsics", intr_path, "Camera intrinsics JSON");
  sim_cmd->add_option("--out", out_path, "Detections file (default: stdout)");

  auto* align_cmd = app.add_subcommand("align", "Align camera detections to the log via task markers");
  align_cmd->add_option("log", log_path)->required();
  align_cmd->add_option("detections", det_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve_cmd->parsed()) return serve(config_file, addr, store_dir, static_dir);

    if (validate_cmd->parsed()) {
      const auto store = media_store(media_dir);
      const auto report = sf::protocol::validate_flow(load_flow(flow_path), store.get());
      print(sf::protocol::to_json(report));
      return report.ok() ? 0 : kCheckFailed;
    }
    if (format_cmd->parsed()) {
      std::cout << sf::protocol::serialize_flow(load_flow(flow_path));
      return 0;
    }
    if (plan_cmd->parsed()) {
      const auto store = media_store(media_dir);
      sf::Json steps = sf::Json::array();
      for (const auto& p : sf::engine::plan_session(load_flow(flow_path), store.get())) steps.push_back(sf::engine::to_json(p));
      print(steps);
      return 0;
    }
    if (vectors_cmd->parsed()) {
      const auto flow = load_flow(flow_path);
      sf::Json steps = sf::Json::array();
      for (std::size_t i = 0; i < flow.steps.size(); ++i) {
        if (sf::protocol::family_of(flow.steps[i].task_type) != sf::protocol::TaskFamily::Pursuit) continue;
        steps.push_back(sf::engine::pursuit_vectors(sf::engine::plan_step(flow, i, nullptr), rate_hz));
      }
      std::cout << steps.dump() << "\n";
      return 0;
    }
    if (run_cmd->parsed()) {
      const auto flow = load_flow(flow_path);
      const auto store = media_store(media_dir);
      sf::engine::HeadlessOptions opt;
      opt.seed = seed;
      opt.store = store.get();
      opt.log_path = out_path.empty() ? fs::path(flow.flow_id + ".session.jsonl") : fs::path(out_path);
      const auto r = sf::engine::run_headless(flow, opt);
      print({{"session_id", r.session_id},
             {"log", opt.log_path->string()},
             {"entry_count", r.seal.entry_count},
             {"content_hash", r.seal.content_hash}});
      return 0;
    }
    if (replay_cmd->parsed()) {
      const auto tl = sf::eventlog::reconstruct(sf::eventlog::read_session_log(log_path));
      if (!summary) {
        print(sf::eventlog::to_json(tl));
        return 0;
      }
      sf::Json tasks = sf::Json::array();
      for (const auto& t : tl.tasks) {
        tasks.push_back({{"stepId", t.step_id}, {"taskName", t.task_name}, {"startTimestamp", t.start_ts},
                         {"endTimestamp", t.end_ts}, {"stimuli", t.stimuli.size()}, {"responses", t.responses.size()}});
      }
      print({{"session_id", tl.header.session_id}, {"tasks", std::move(tasks)}});
      return 0;
    }
    if (verify_cmd->parsed()) {
      const auto store = media_store(media_dir);
      sf::eventlog::VerifyOptions opt;
      opt.store = store.get();
      const auto report = sf::eventlog::verify(sf::eventlog::read_session_log(log_path), load_flow(flow_path), opt);
      print(sf::eventlog::to_json(report));
      return report.ok() ? 0 : kCheckFailed;
    }
    if (sim_cmd->parsed()) {
      const auto log = sf::eventlog::read_session_log(log_path);
      const auto plan = sf::markers::marker_plan_from_log(log.entries);
      const auto pose = pose_path.empty() ? default_pose(log.entries)
                                          : sf::markers::pose_from_json(sf::parse_json(sf::read_file_or_throw(pose_path)));
      const auto intr = intr_path.empty() ? sf::markers::CameraIntrinsics{}
                                          : sf::markers::intrinsics_from_json(sf::parse_json(sf::read_file_or_throw(intr_path)));
      if (phase >= 0) sim.phase_ms = phase;
      const auto dets = sf::markers::simulate_camera(log.entries, plan, pose, intr, sim);
      if (out_path.empty()) {
        sf::markers::write_detections(std::cout, dets);
      } else {
        std::ostringstream os;
        sf::markers::write_detections(os, dets);
        sf::write_file_atomic(out_path, os.str());
      }
      return 0;
    }
    if (align_cmd->parsed()) {
      const auto log = sf::eventlog::read_session_log(log_path);
      std::ifstream in(det_path);
      if (!in) throw sf::Error(sf::Errc::not_found, "cannot open " + det_path);
      const auto dets = sf::markers::read_detections(in);
      const auto result = sf::markers::align_timelines(dets, log.entries);
      print(sf::markers::to_json(result));
      return 0;
    }
  } catch (const sf::ParseError& e) {
    std::cerr << sf::Json{{"error", sf::errc_name(e.code())}, {"message", e.what()}, {"offset", e.offset()}}.dump() << "\n";
    return kError;
  } catch (const sf::Error& e) {
    std::cerr << sf::Json{{"error", sf::errc_name(e.code())}, {"message", e.what()}}.dump() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << sf::Json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kError;
  }
  return kError;
}

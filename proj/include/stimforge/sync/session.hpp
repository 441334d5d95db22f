#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stimforge/eventlog/session_log.hpp"
#include "stimforge/protocol/flow.hpp"
#include "stimforge/sync/clock.hpp"
#include "stimforge/sync/message.hpp"

namespace stimforge::sync {

enum class SessionState { Created, Running, Paused, Finished };
std::string_view to_string(SessionState s);

inline constexpr std::size_t kDefaultQueueLimit = 10000;

/// Receiving end of one subscriber connection.
///
/// The session pushes without ever waiting; when the queue would exceed
/// its limit the subscriber is closed with reason "overflow" and dropped.
class Subscriber {
 public:
  using Frame = std::shared_ptr<const std::string>;

  explicit Subscriber(std::size_t limit) : limit_(limit) {}

  /// Next frame, waiting up to `timeout`. nullopt on timeout or once closed
  /// and drained.
  std::optional<Frame> pop(std::chrono::milliseconds timeout);
  std::optional<Frame> try_pop();

  bool closed() const;
  std::string close_reason() const;
  std::size_t queued() const;

  /// Called after every push and on close, outside the subscriber lock.
  void set_notify(std::function<void()> notify);

  /// Session side.
  bool push(Frame frame, bool bypass_limit = false);
  void close(const std::string& reason);

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> queue_;
  std::size_t limit_;
  bool closed_ = false;
  std::string reason_;
  std::function<void()> notify_;
};

struct SessionConfig {
  std::string session_id;
  protocol::ExperimentFlow flow;
  std::string publisher_token;
  std::shared_ptr<Clock> clock;
  /// Where to write the durable `.session.jsonl`; in-memory only when unset.
  std::optional<std::filesystem::path> log_path;
  eventlog::SessionLogWriter::Options log_options;
  std::size_t queue_limit = kDefaultQueueLimit;
};

/// One publish/subscribe session.
///
/// Every logged event gets the next sequence number (its index in the log)
/// and the clock's time, is appended to the log, kept in the in-memory
/// backlog and pushed to every subscriber, all under one lock so delivery
/// order equals log order. start() also emits the ConfigSnapshot of step 0,
/// and each TaskEnd the snapshot of the following step.
///
/// TaskStart details are completed from the flow: stepId, stepIndex,
/// taskType, instanceIndex, seed, markerId and currentSettings are filled
/// in when absent and must match when present.
class Session {
 public:
  explicit Session(SessionConfig config);
  ~Session();

  const std::string& id() const { return id_; }
  const protocol::ExperimentFlow& flow() const { return flow_; }
  SessionState state() const;

  /// Throws unauthorized for a wrong token and conflict when a publisher is
  /// already attached. Re-attaching after a detach logs PublisherReattach.
  void attach_publisher(const std::string& token);
  void detach_publisher();
  bool publisher_attached() const;

  void start(const std::string& token);
  void pause(const std::string& token);
  void resume(const std::string& token);
  /// Emits SessionFinish, seals the log and closes every subscriber.
  eventlog::LogSeal finish(const std::string& token);

  /// Publisher events: TaskStart, TaskEnd, VisualDot, Cue, Response.
  /// Returns the assigned sequence number. Throws unauthorized, state_error
  /// (session not running, task boundaries out of order) or
  /// invalid_argument (unknown kind, details disagree with the flow).
  std::uint64_t publish(const std::string& token, std::string_view event_type,
                        std::optional<std::string> task_name, Json details);

  /// New subscriber receiving the backlog from `replay_from` and then the
  /// live stream with no gap. Without replay, the stream starts at the next
  /// event.
  std::shared_ptr<Subscriber> subscribe(std::optional<std::uint64_t> replay_from = std::nullopt);
  void unsubscribe(const std::shared_ptr<Subscriber>& subscriber);
  std::size_t subscriber_count() const;

  /// Unsequenced Heartbeat to every subscriber.
  void heartbeat();

  /// Reply to a TimePing sent at subscriber time t0.
  SyncMessage time_pong(double t0, std::int64_t received_ms) const;

  std::vector<eventlog::LogEntry> entries() const;
  std::uint64_t next_seq() const;
  std::optional<eventlog::LogSeal> seal() const;
  eventlog::LogHeader header() const { return header_; }
  std::int64_t now_ms() const { return clock_->now_ms(); }

 private:
  void check_token(const std::string& token) const;
  std::uint64_t emit_locked(std::string_view type, std::optional<std::string> task_name, Json details);
  void complete_task_start(Json& details, std::optional<std::string>& task_name);

  mutable std::mutex mu_;
  std::string id_;
  protocol::ExperimentFlow flow_;
  std::string token_;
  std::shared_ptr<Clock> clock_;
  std::unique_ptr<eventlog::SessionLogWriter> log_;
  eventlog::LogHeader header_;
  std::size_t queue_limit_;
  SessionState state_ = SessionState::Created;
  bool publisher_attached_ = false;
  bool publisher_ever_attached_ = false;
  std::vector<eventlog::LogEntry> entries_;
  std::vector<Subscriber::Frame> frames_;
  std::vector<std::shared_ptr<Subscriber>> subscribers_;
  std::optional<std::size_t> open_task_;
  std::size_t next_step_ = 0;
  std::int64_t last_ts_ = 0;
  std::optional<eventlog::LogSeal> seal_;
};

}  // namespace stimforge::sync

#include "stimforge/sync/session.hpp"

#include <algorithm>

#include "stimforge/common/error.hpp"
#include "stimforge/common/hash.hpp"
#include "stimforge/markers/ids.hpp"

namespace stimforge::sync {

namespace ev = eventlog::event;

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::Created: return "created";
    case SessionState::Running: return "running";
    case SessionState::Paused: return "paused";
    case SessionState::Finished: return "finished";
  }
  return "created";
}

// Subscriber

std::optional<Subscriber::Frame> Subscriber::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  auto f = std::move(queue_.front());
  queue_.pop_front();
  return f;
}

std::optional<Subscriber::Frame> Subscriber::try_pop() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  auto f = std::move(queue_.front());
  queue_.pop_front();
  return f;
}

bool Subscriber::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::string Subscriber::close_reason() const {
  std::lock_guard lock(mu_);
  return reason_;
}

std::size_t Subscriber::queued() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void Subscriber::set_notify(std::function<void()> notify) {
  std::lock_guard lock(mu_);
  notify_ = std::move(notify);
}

bool Subscriber::push(Frame frame, bool bypass_limit) {
  std::function<void()> notify;
  {
    std::lock_guard lock(mu_);
    if (closed_) return false;
    if (!bypass_limit && queue_.size() >= limit_) {
      // Drop what the client never read; the reason tells it to reconnect with replay.
      closed_ = true;
      reason_ = "overflow";
      queue_.clear();
    } else {
      queue_.push_back(std::move(frame));
    }
    notify = notify_;
  }
  cv_.notify_all();
  if (notify) notify();
  return true;
}

void Subscriber::close(const std::string& reason) {
  std::function<void()> notify;
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = true;
    reason_ = reason;
    notify = notify_;
  }
  cv_.notify_all();
  if (notify) notify();
}

// Session

Session::Session(SessionConfig config)
    : id_(std::move(config.session_id)),
      flow_(std::move(config.flow)),
      token_(std::move(config.publisher_token)),
      clock_(std::move(config.clock)),
      queue_limit_(config.queue_limit == 0 ? 1 : config.queue_limit) {
  if (!clock_) clock_ = std::make_shared<SystemClock>();
  if (flow_.steps.empty()) throw Error(Errc::invalid_argument, "session: flow has no steps");
  header_.session_id = id_;
  header_.flow_hash = protocol::flow_hash(flow_);
  header_.start_utc_ms = SystemClock().now_ms();
  header_.clock_basis = dynamic_cast<VirtualClock*>(clock_.get()) != nullptr ? "virtual" : "utc-epoch-ms";
  if (config.log_path) {
    log_ = std::make_unique<eventlog::SessionLogWriter>(
        eventlog::SessionLogWriter::create(*config.log_path, header_, config.log_options));
  }
  std::lock_guard lock(mu_);
  emit_locked(ev::kSessionCreated, std::nullopt,
              {{"sessionId", id_}, {"flowId", flow_.flow_id}, {"flowHash", header_.flow_hash}});
}

Session::~Session() {
  std::lock_guard lock(mu_);
  for (auto& s : subscribers_) s->close("session closed");
}

SessionState Session::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

void Session::check_token(const std::string& token) const {
  if (token != token_) throw Error(Errc::unauthorized, "session " + id_ + ": invalid publisher token");
}

void Session::attach_publisher(const std::string& token) {
  std::lock_guard lock(mu_);
  check_token(token);
  if (publisher_attached_) throw Error(Errc::conflict, "session " + id_ + ": a publisher is already attached");
  if (state_ == SessionState::Finished) throw Error(Errc::state_error, "session " + id_ + " is finished");
  publisher_attached_ = true;
  if (publisher_ever_attached_) emit_locked(ev::kPublisherReattach, std::nullopt, {{"sessionId", id_}});
  publisher_ever_attached_ = true;
}

void Session::detach_publisher() {
  std::lock_guard lock(mu_);
  publisher_attached_ = false;
}

bool Session::publisher_attached() const {
  std::lock_guard lock(mu_);
  return publisher_attached_;
}

void Session::start(const std::string& token) {
  std::lock_guard lock(mu_);
  check_token(token);
  if (state_ != SessionState::Created) {
    throw Error(Errc::state_error, "cannot start a " + std::string(to_string(state_)) + " session");
  }
  state_ = SessionState::Running;
  emit_locked(ev::kSessionStart, std::nullopt, {{"sessionId", id_}});
  emit_locked(ev::kConfigSnapshot, std::nullopt,
              {{"stepIndex", 0},
               {"stepId", flow_.steps[0].step_id},
               {"currentSettings", protocol::to_json(protocol::resolve_step_settings(flow_, 0))}});
}

void Session::pause(const std::string& token) {
  std::lock_guard lock(mu_);
  check_token(token);
  if (state_ != SessionState::Running) {
    throw Error(Errc::state_error, "cannot pause a " + std::string(to_string(state_)) + " session");
  }
  state_ = SessionState::Paused;
  emit_locked(ev::kSessionPause, std::nullopt, {{"sessionId", id_}});
}

void Session::resume(const std::string& token) {
  std::lock_guard lock(mu_);
  check_token(token);
  if (state_ != SessionState::Paused) {
    throw Error(Errc::state_error, "cannot resume a " + std::string(to_string(state_)) + " session");
  }
  state_ = SessionState::Running;
  emit_locked(ev::kSessionResume, std::nullopt, {{"sessionId", id_}});
}

eventlog::LogSeal Session::finish(const std::string& token) {
  std::lock_guard lock(mu_);
  check_token(token);
  if (state_ != SessionState::Running && state_ != SessionState::Paused) {
    throw Error(Errc::state_error, "cannot finish a " + std::string(to_string(state_)) + " session");
  }
  emit_locked(ev::kSessionFinish, std::nullopt, {{"sessionId", id_}, {"entryCount", entries_.size() + 1}});
  state_ = SessionState::Finished;
  if (log_) {
    seal_ = log_->seal();
  } else {
    seal_ = eventlog::LogSeal{entries_.size(), sha256_hex(eventlog::render_session_log(header_, entries_, false))};
  }
  for (auto& s : subscribers_) s->close("finished");
  subscribers_.clear();
  return *seal_;
}

void Session::complete_task_start(Json& details, std::optional<std::string>& task_name) {
  const std::size_t index = next_step_;
  if (index >= flow_.steps.size()) throw Error(Errc::state_error, "TaskStart after the last flow step");
  const auto& step = flow_.steps[index];
  const auto settings = protocol::to_json(protocol::resolve_step_settings(flow_, index));
  const int instance = protocol::instance_index(flow_, index);
  Json expected{{"stepId", step.step_id},
                {"stepIndex", index},
                {"taskType", protocol::to_string(step.task_type)},
                {"instanceIndex", instance},
                {"currentSettings", settings}};
  if (step.seed) expected["seed"] = *step.seed;
  if (protocol::carries_markers(step.task_type)) {
    expected["markerId"] = markers::allocate_task_markers(step.task_type, instance).start_id;
  }
  for (const auto& [key, value] : expected.items()) {
    auto it = details.find(key);
    if (it == details.end()) {
      details[key] = value;
    } else if (*it != value) {
      throw Error(Errc::invalid_argument, "TaskStart." + key + " disagrees with flow step " + step.step_id);
    }
  }
  const std::string name(protocol::task_name(step.task_type));
  if (task_name && *task_name != name) {
    throw Error(Errc::invalid_argument, "TaskStart taskName '" + *task_name + "' does not match step " + step.step_id);
  }
  task_name = name;
}

std::uint64_t Session::publish(const std::string& token, std::string_view type, std::optional<std::string> task_name,
                               Json details) {
  std::lock_guard lock(mu_);
  check_token(token);
  if (state_ != SessionState::Running) {
    throw Error(Errc::state_error, "cannot publish to a " + std::string(to_string(state_)) + " session");
  }
  if (!details.is_object()) throw Error(Errc::invalid_argument, "event details must be an object");
  if (type == ev::kTaskStart) {
    if (open_task_) throw Error(Errc::state_error, "TaskStart while step " + std::to_string(*open_task_) + " is open");
    complete_task_start(details, task_name);
    open_task_ = next_step_++;
    return emit_locked(type, task_name, std::move(details));
  }
  if (type == ev::kTaskEnd) {
    if (!open_task_) throw Error(Errc::state_error, "TaskEnd without an open task");
    const auto& step = flow_.steps[*open_task_];
    Json expected{{"stepId", step.step_id}, {"stepIndex", *open_task_}};
    if (protocol::carries_markers(step.task_type)) {
      expected["markerId"] =
          markers::allocate_task_markers(step.task_type, protocol::instance_index(flow_, *open_task_)).end_id;
    }
    for (const auto& [key, value] : expected.items()) {
      auto it = details.find(key);
      if (it == details.end()) {
        details[key] = value;
      } else if (*it != value) {
        throw Error(Errc::invalid_argument, "TaskEnd." + key + " disagrees with flow step " + step.step_id);
      }
    }
    const auto seq = emit_locked(type, std::string(protocol::task_name(step.task_type)), std::move(details));
    open_task_.reset();
    if (next_step_ < flow_.steps.size()) {
      emit_locked(ev::kConfigSnapshot, std::nullopt,
                  {{"stepIndex", next_step_},
                   {"stepId", flow_.steps[next_step_].step_id},
                   {"currentSettings", protocol::to_json(protocol::resolve_step_settings(flow_, next_step_))}});
    }
    return seq;
  }
  if (type == ev::kVisualDot || type == ev::kCue || type == ev::kResponse) {
    return emit_locked(type, std::move(task_name), std::move(details));
  }
  throw Error(Errc::invalid_argument, "publishers cannot send '" + std::string(type) + "' events");
}

std::uint64_t Session::emit_locked(std::string_view type, std::optional<std::string> task_name, Json details) {
  eventlog::LogEntry e;
  e.timestamp = std::max(clock_->now_ms(), last_ts_);
  e.event_type = std::string(type);
  e.task_name = std::move(task_name);
  e.details = std::move(details);
  if (log_) log_->append(e);
  last_ts_ = e.timestamp;
  const std::uint64_t seq = entries_.size();
  auto frame = std::make_shared<const std::string>(encode_message(message_from_entry(seq, e)));
  entries_.push_back(std::move(e));
  frames_.push_back(frame);
  std::erase_if(subscribers_, [&](const std::shared_ptr<Subscriber>& s) {
    s->push(frame);
    return s->closed();
  });
  return seq;
}

std::shared_ptr<Subscriber> Session::subscribe(std::optional<std::uint64_t> replay_from) {
  std::lock_guard lock(mu_);
  auto sub = std::make_shared<Subscriber>(queue_limit_);
  if (replay_from) {
    if (*replay_from > frames_.size()) {
      throw Error(Errc::out_of_range, "replay_from " + std::to_string(*replay_from) + " is beyond seq " +
                                          std::to_string(frames_.size()));
    }
    for (std::size_t i = *replay_from; i < frames_.size(); ++i) sub->push(frames_[i], true);
  }
  if (state_ == SessionState::Finished) {
    sub->close("finished");
  } else {
    subscribers_.push_back(sub);
  }
  return sub;
}

void Session::unsubscribe(const std::shared_ptr<Subscriber>& subscriber) {
  std::lock_guard lock(mu_);
  std::erase(subscribers_, subscriber);
  subscriber->close("unsubscribed");
}

std::size_t Session::subscriber_count() const {
  std::lock_guard lock(mu_);
  return subscribers_.size();
}

void Session::heartbeat() {
  std::lock_guard lock(mu_);
  SyncMessage m;
  m.server_ts_ms = clock_->now_ms();
  m.kind = kHeartbeat;
  m.payload = {{"nextSeq", entries_.size()}, {"state", to_string(state_)}};
  auto frame = std::make_shared<const std::string>(encode_message(m));
  std::erase_if(subscribers_, [&](const std::shared_ptr<Subscriber>& s) {
    s->push(frame);
    return s->closed();
  });
}

SyncMessage Session::time_pong(double t0, std::int64_t received_ms) const {
  SyncMessage m;
  m.server_ts_ms = clock_->now_ms();
  m.kind = kTimePong;
  m.payload = {{"t0", t0}, {"t1", received_ms}, {"t2", m.server_ts_ms}};
  return m;
}

std::vector<eventlog::LogEntry> Session::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::uint64_t Session::next_seq() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::optional<eventlog::LogSeal> Session::seal() const {
  std::lock_guard lock(mu_);
  return seal_;
}

}  // namespace stimforge::sync

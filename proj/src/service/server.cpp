#include "stimforge/service/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <condition_variable>
#include <deque>
#include <thread>

#include "stimforge/common/error.hpp"
#include "stimforge/common/fs.hpp"

namespace stimforge::service {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Frame = std::shared_ptr<const std::string>;

constexpr std::size_t kBodyLimit = 64u << 20;

struct Context {
  ApiRouter router;
  SessionRegistry& sessions;
  std::optional<std::filesystem::path> static_dir;
};

std::string mime_for(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".wav") return "audio/wav";
  return "application/octet-stream";
}

HttpResponse serve_static(const Context& ctx, const std::string& path) {
  if (!ctx.static_dir) return error_response(Errc::not_found, "no static directory configured");
  std::string rel = path.substr(std::string_view("/stimuli").size());
  while (!rel.empty() && rel.front() == '/') rel.erase(0, 1);
  if (rel.empty()) rel = "index.html";
  const std::filesystem::path p(rel);
  for (const auto& part : p) {
    if (part == ".." || part.string().starts_with(".")) return error_response(Errc::not_found, "no file " + path);
  }
  auto bytes = read_file(*ctx.static_dir / p);
  if (!bytes) return error_response(Errc::not_found, "no file " + path);
  HttpResponse r;
  r.content_type = mime_for(p);
  r.body = std::move(*bytes);
  return r;
}

std::string error_frame(Errc code, const std::string& message) {
  return Json{{"seq", nullptr}, {"kind", "Error"}, {"payload", {{"error", errc_name(code)}, {"message", message}}}}.dump();
}

/// Serialises writes on one websocket: at most one async_write in flight.
template <typename Derived>
class WsBase : public std::enable_shared_from_this<Derived> {
 public:
  explicit WsBase(tcp::socket&& socket) : ws_(std::move(socket)) {}

 protected:
  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsBase::on_accept, self()));
  }

  void enqueue(Frame f) {
    out_.push_back(std::move(f));
    write_next();
  }

  void write_next() {
    if (writing_ || closing_) return;
    if (out_.empty()) {
      static_cast<Derived*>(this)->on_drained();
      return;
    }
    writing_ = true;
    ws_.async_write(net::buffer(*out_.front()), beast::bind_front_handler(&WsBase::on_write, self()));
  }

  void close(websocket::close_code code, const std::string& reason) {
    if (closing_) return;
    closing_ = true;
    ws_.async_close(websocket::close_reason(code, reason), [s = self()](beast::error_code) {});
  }

  void read_next() { ws_.async_read(buffer_, beast::bind_front_handler(&WsBase::on_read, self())); }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<Frame> out_;
  bool writing_ = false;
  bool closing_ = false;

 private:
  std::shared_ptr<Derived> self() { return static_cast<Derived*>(this)->shared_from_this(); }

  void on_accept(beast::error_code ec) {
    if (ec) return static_cast<Derived*>(this)->on_gone();
    static_cast<Derived*>(this)->on_open();
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) return static_cast<Derived*>(this)->on_gone();
    out_.pop_front();
    write_next();
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return static_cast<Derived*>(this)->on_gone();
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    static_cast<Derived*>(this)->on_message(text);
    if (!closing_) read_next();
  }
};

/// Publisher connection: each frame is one event; each gets an Ack or an Error.
class WsPublisher : public WsBase<WsPublisher> {
 public:
  WsPublisher(tcp::socket&& socket, std::shared_ptr<sync::Session> session, std::string token)
      : WsBase(std::move(socket)), session_(std::move(session)), token_(std::move(token)) {}
  ~WsPublisher() { release(); }

  void run(http::request<http::string_body> req) { accept(std::move(req)); }

  void on_open() { read_next(); }
  void on_drained() {}
  void on_gone() { release(); }

  void on_message(const std::string& text) {
    Json reply;
    try {
      const std::int64_t received = session_->now_ms();
      const auto msg = sync::decode_client_frame(text);
      if (msg.kind == sync::kTimePing) {
        const double t0 = msg.payload.at("t0").get<double>();
        enqueue(std::make_shared<const std::string>(sync::encode_message(session_->time_pong(t0, received))));
        return;
      }
      if (msg.kind == eventlog::event::kSessionPause) {
        session_->pause(token_);
        reply = {{"seq", nullptr}, {"kind", "Ack"}, {"payload", {{"state", "Paused"}}}};
      } else if (msg.kind == eventlog::event::kSessionResume) {
        session_->resume(token_);
        reply = {{"seq", nullptr}, {"kind", "Ack"}, {"payload", {{"state", "Running"}}}};
      } else if (msg.kind == eventlog::event::kSessionFinish) {
        const auto seal = session_->finish(token_);
        reply = {{"seq", nullptr},
                 {"kind", "Ack"},
                 {"payload", {{"state", "Finished"}, {"entry_count", seal.entry_count}, {"content_hash", seal.content_hash}}}};
      } else {
        ObjectReader r(msg.payload, "frame.payload");
        std::optional<std::string> task_name;
        if (r.has("taskName")) task_name = r.get<std::string>("taskName");
        Json details = r.has("details") ? r.at("details") : Json::object();
        r.finish();
        const auto seq = session_->publish(token_, msg.kind, std::move(task_name), std::move(details));
        reply = {{"seq", nullptr}, {"kind", "Ack"}, {"payload", {{"ackSeq", seq}}}};
      }
      reply["server_ts_ms"] = session_->now_ms();
    } catch (const Error& e) {
      enqueue(std::make_shared<const std::string>(error_frame(e.code(), e.what())));
      return;
    } catch (const std::exception& e) {
      enqueue(std::make_shared<const std::string>(error_frame(Errc::parse_error, e.what())));
      return;
    }
    enqueue(std::make_shared<const std::string>(reply.dump()));
  }

 private:
  void release() {
    if (attached_) {
      attached_ = false;
      session_->detach_publisher();
    }
  }

  std::shared_ptr<sync::Session> session_;
  std::string token_;
  bool attached_ = true;  // attached before the upgrade
};

/// Subscriber connection: backlog and live frames, TimePong replies.
class WsSubscriber : public WsBase<WsSubscriber> {
 public:
  WsSubscriber(tcp::socket&& socket, std::shared_ptr<sync::Session> session, std::optional<std::uint64_t> replay_from)
      : WsBase(std::move(socket)), session_(std::move(session)), replay_from_(replay_from) {}
  ~WsSubscriber() {
    if (sub_) session_->unsubscribe(sub_);
  }

  void run(http::request<http::string_body> req) { accept(std::move(req)); }

  void on_open() {
    try {
      sub_ = session_->subscribe(replay_from_);
    } catch (const Error& e) {
      enqueue(std::make_shared<const std::string>(error_frame(e.code(), e.what())));
      close(websocket::close_code::policy_error, std::string(errc_name(e.code())));
      return;
    }
    std::weak_ptr<WsSubscriber> weak = shared_from_this();
    auto exec = ws_.get_executor();
    sub_->set_notify([weak, exec] {
      net::post(exec, [weak] {
        if (auto s = weak.lock()) s->pump();
      });
    });
    pump();
    read_next();
  }

  void on_message(const std::string& text) {
    try {
      const std::int64_t received = session_->now_ms();
      const auto msg = sync::decode_client_frame(text);
      if (msg.kind != sync::kTimePing) throw Error(Errc::invalid_argument, "subscribers may only send TimePing");
      const double t0 = msg.payload.at("t0").get<double>();
      enqueue(std::make_shared<const std::string>(sync::encode_message(session_->time_pong(t0, received))));
    } catch (const Error& e) {
      enqueue(std::make_shared<const std::string>(error_frame(e.code(), e.what())));
    } catch (const std::exception& e) {
      enqueue(std::make_shared<const std::string>(error_frame(Errc::parse_error, e.what())));
    }
  }

  void on_drained() {
    if (sub_ && sub_->closed() && sub_->queued() == 0) {
      const auto reason = sub_->close_reason();
      close(reason == "overflow" ? websocket::close_code::try_again_later : websocket::close_code::normal, reason);
    }
  }

  void on_gone() {
    if (sub_) {
      session_->unsubscribe(sub_);
      sub_.reset();
    }
  }

  void pump() {
    if (!sub_) return;
    while (auto f = sub_->try_pop()) out_.push_back(std::move(*f));
    write_next();
  }

 private:
  std::shared_ptr<sync::Session> session_;
  std::optional<std::uint64_t> replay_from_;
  std::shared_ptr<sync::Subscriber> sub_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Context& ctx) : stream_(std::move(socket)), ctx_(ctx) {}

  void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this())); }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(kBodyLimit);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) return upgrade(std::move(req));

    HttpRequest r;
    r.method = std::string(req.method_string());
    r.target = std::string(req.target());
    r.body = std::move(req.body());
    for (const auto& f : req) {
      std::string name(f.name_string());
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
      r.headers[name] = std::string(f.value());
    }
    HttpResponse out;
    const auto path = parse_target(r.target).path;
    if (path == "/stimuli" || path.starts_with("/stimuli/")) {
      out = r.method == "GET" ? serve_static(ctx_, path) : error_response(Errc::invalid_argument, "GET only");
    } else {
      out = ctx_.router.handle(r);
    }
    spdlog::debug("{} {} -> {}", r.method, r.target, out.status);
    send(std::move(out), req.version(), req.keep_alive());
  }

  void send(HttpResponse out, unsigned version, bool keep_alive) {
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(out.status), version);
    res->set(http::field::server, "stimforge");
    res->set(http::field::content_type, out.content_type);
    for (const auto& [k, v] : out.headers) res->set(k, v);
    res->keep_alive(keep_alive);
    res->body() = std::move(out.body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (res->need_eof()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->read();
    });
  }

  void upgrade(http::request<http::string_body> req) {
    const auto target = parse_target(std::string(req.target()));
    const auto version = req.version();
    auto fail = [&](Errc code, const std::string& msg) { send(error_response(code, msg), version, false); };
    constexpr std::string_view pub = "/ws/publish/", sub = "/ws/subscribe/";
    const bool is_pub = target.path.starts_with(pub);
    if (!is_pub && !target.path.starts_with(sub)) return fail(Errc::not_found, "no websocket route " + target.path);
    const auto id = target.path.substr(is_pub ? pub.size() : sub.size());
    auto session = ctx_.sessions.find(id);
    if (!session) return fail(Errc::not_found, "no session " + id);
    stream_.expires_never();
    if (is_pub) {
      HttpRequest hr;
      if (auto a = req.find(http::field::authorization); a != req.end()) hr.headers["authorization"] = std::string(a->value());
      const auto token = request_token(hr, target);
      try {
        session->attach_publisher(token);
      } catch (const Error& e) {
        return fail(e.code(), e.what());
      }
      std::make_shared<WsPublisher>(stream_.release_socket(), session, token)->run(std::move(req));
      return;
    }
    std::optional<std::uint64_t> replay;
    if (auto it = target.query.find("replay_from"); it != target.query.end()) {
      try {
        std::size_t used = 0;
        replay = std::stoull(it->second, &used);
        if (used != it->second.size() || it->second.starts_with('-')) throw std::invalid_argument("replay_from");
      } catch (const std::exception&) {
        return fail(Errc::invalid_argument, "replay_from must be a non-negative integer");
      }
      if (*replay > session->next_seq()) {
        return fail(Errc::out_of_range, "replay_from is beyond seq " + std::to_string(session->next_seq()));
      }
    }
    std::make_shared<WsSubscriber>(stream_.release_socket(), session, replay)->run(std::move(req));
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Context& ctx_;
};

}  // namespace

struct Server::Impl {
  ServiceConfig config;
  Context ctx;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;
  std::thread heartbeat;
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  bool running = false;

  Impl(const ServiceConfig& c, Store& store, SessionRegistry& sessions)
      : config(c), ctx{ApiRouter(store, sessions), sessions, c.static_dir} {}

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
        spdlog::warn("accept: {}", ec.message());
      } else {
        std::make_shared<HttpSession>(std::move(socket), ctx)->run();
      }
      do_accept();
    });
  }
};

Server::Server(const ServiceConfig& config, Store& store, SessionRegistry& sessions)
    : impl_(std::make_unique<Impl>(config, store, sessions)) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& m = *impl_;
  beast::error_code ec;
  const auto addr = net::ip::make_address(m.config.host, ec);
  if (ec) throw Error(Errc::invalid_argument, "bad listen address '" + m.config.host + "'");
  const tcp::endpoint ep(addr, m.config.port);
  m.acceptor.open(ep.protocol());
  m.acceptor.set_option(net::socket_base::reuse_address(true));
  m.acceptor.bind(ep, ec);
  if (ec) throw Error(Errc::io_error, "cannot bind " + m.config.host + ":" + std::to_string(m.config.port) + ": " + ec.message());
  m.acceptor.listen();
  m.do_accept();
  m.running = true;
  for (int i = 0; i < 2; ++i) m.threads.emplace_back([&m] { m.ioc.run(); });
  m.heartbeat = std::thread([&m] {
    std::unique_lock lock(m.mu);
    while (!m.cv.wait_for(lock, std::chrono::milliseconds(m.config.heartbeat_ms), [&] { return m.stopping; })) {
      lock.unlock();
      m.ctx.sessions.heartbeat_all();
      lock.lock();
    }
  });
  spdlog::info("listening on {}:{}", m.config.host, port());
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop() {
  auto& m = *impl_;
  {
    std::lock_guard lock(m.mu);
    if (!m.running) return;
    m.running = false;
    m.stopping = true;
  }
  m.cv.notify_all();
  net::post(m.ioc, [&m] {
    beast::error_code ec;
    m.acceptor.close(ec);
  });
  m.ioc.stop();
  for (auto& t : m.threads) t.join();
  m.threads.clear();
  if (m.heartbeat.joinable()) m.heartbeat.join();
}

void Server::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait(lock, [&] { return impl_->stopping; });
}

}  // namespace stimforge::service

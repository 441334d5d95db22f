#include "stimforge/service/api.hpp"

#include "stimforge/common/error.hpp"
#include "stimforge/common/fs.hpp"
#include "stimforge/engine/plan.hpp"
#include "stimforge/tasks/questionnaire.hpp"

namespace stimforge::service {
namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const auto j = path.find('/', i);
    parts.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
    if (j == std::string::npos) break;
    i = j;
  }
  return parts;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out.push_back(' ');
    } else if (s[i] == '%' && i + 2 < s.size()) {
      const auto hex = std::string(s.substr(i + 1, 2));
      char* end = nullptr;
      const long v = std::strtol(hex.c_str(), &end, 16);
      if (end == hex.c_str() + 2) {
        out.push_back(static_cast<char>(v));
        i += 2;
      } else {
        out.push_back('%');
      }
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

HttpResponse json_response(int status, const Json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump() + "\n";
  return r;
}

Json session_json(const sync::Session& s) {
  return {{"session_id", s.id()},
          {"flow_id", s.flow().flow_id},
          {"flow_hash", s.header().flow_hash},
          {"state", sync::to_string(s.state())},
          {"next_seq", s.next_seq()},
          {"subscribers", s.subscriber_count()},
          {"publisher_attached", s.publisher_attached()}};
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::out_of_range:
    case Errc::parse_error:
    case Errc::version_error:
    case Errc::validation_error:
    case Errc::unknown_media: return 400;
    case Errc::unauthorized: return 401;
    case Errc::not_found: return 404;
    case Errc::conflict:
    case Errc::duplicate:
    case Errc::state_error:
    case Errc::sealed: return 409;
    default: return 500;
  }
}

HttpResponse error_response(Errc code, const std::string& message) {
  return json_response(http_status(code), {{"error", errc_name(code)}, {"message", message}});
}

ParsedTarget parse_target(const std::string& target) {
  ParsedTarget t;
  const auto q = target.find('?');
  t.path = url_decode(target.substr(0, q));
  if (q == std::string::npos) return t;
  std::string_view rest(target);
  rest.remove_prefix(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    if (!pair.empty()) {
      t.query[url_decode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return t;
}

std::string request_token(const HttpRequest& req, const ParsedTarget& target) {
  if (auto it = req.headers.find("authorization"); it != req.headers.end()) {
    constexpr std::string_view prefix = "Bearer ";
    if (it->second.starts_with(prefix)) return it->second.substr(prefix.size());
  }
  if (auto it = target.query.find("token"); it != target.query.end()) return it->second;
  return {};
}

HttpResponse ApiRouter::handle(const HttpRequest& req) {
  const auto target = parse_target(req.target);
  try {
    return route(req, target);
  } catch (const InvalidFlow& e) {
    return json_response(400, {{"error", errc_name(e.code())}, {"message", e.what()},
                               {"report", protocol::to_json(e.report())}});
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(Errc::io_error, e.what());
  }
}

HttpResponse ApiRouter::route(const HttpRequest& req, const ParsedTarget& target) {
  const auto parts = split_path(target.path);
  if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1") {
    return error_response(Errc::not_found, "no route " + target.path);
  }
  const auto& m = req.method;
  const std::string& res = parts[2];
  const std::size_t n = parts.size();
  auto method_not_allowed = [&] {
    auto r = error_response(Errc::invalid_argument, "method " + m + " not allowed on " + target.path);
    r.status = 405;
    return r;
  };

  if (res == "health" && n == 3) return json_response(200, {{"status", "ok"}});

  if (res == "validate" && n == 3) {
    if (m != "POST") return method_not_allowed();
    const auto flow = protocol::parse_flow(req.body);
    return json_response(200, protocol::to_json(protocol::validate_flow(flow, &store_.media())));
  }

  if (res == "flows") {
    if (n == 3) {
      if (m == "GET") {
        std::optional<Visibility> filter;
        if (auto it = target.query.find("visibility"); it != target.query.end()) {
          filter = visibility_from_string(it->second);
          if (!filter) throw Error(Errc::invalid_argument, "visibility must be private or shared");
        }
        Json list = Json::array();
        for (const auto& r : store_.list_flows(filter)) list.push_back(to_json(r));
        return json_response(200, {{"flows", std::move(list)}});
      }
      if (m == "POST") {
        auto vis = Visibility::Private;
        if (auto it = target.query.find("visibility"); it != target.query.end()) {
          auto v = visibility_from_string(it->second);
          if (!v) throw Error(Errc::invalid_argument, "visibility must be private or shared");
          vis = *v;
        }
        return json_response(201, to_json(store_.put_flow(req.body, vis)));
      }
      return method_not_allowed();
    }
    const std::string& id = parts[3];
    if (n == 4) {
      if (m != "GET") return method_not_allowed();
      const auto rec = store_.get_flow(id);
      HttpResponse r;
      r.body = rec.document;
      r.headers["X-Content-Hash"] = rec.content_hash;
      r.headers["X-Flow-Hash"] = rec.flow_hash;
      return r;
    }
    if (n == 5 && parts[4] == "meta" && m == "GET") return json_response(200, to_json(store_.get_flow(id)));
    if (n == 5 && (parts[4] == "share" || parts[4] == "unshare")) {
      if (m != "POST") return method_not_allowed();
      const auto vis = parts[4] == "share" ? Visibility::Shared : Visibility::Private;
      return json_response(200, to_json(store_.set_visibility(id, vis)));
    }
    if (n == 5 && parts[4] == "plan" && m == "GET") {
      const auto flow = protocol::parse_flow(store_.get_flow(id).document);
      Json steps = Json::array();
      for (const auto& p : engine::plan_session(flow, &store_.media())) steps.push_back(engine::to_json(p));
      return json_response(200, {{"flow_id", id}, {"flow_hash", protocol::flow_hash(flow)}, {"steps", std::move(steps)}});
    }
    return error_response(Errc::not_found, "no route " + target.path);
  }

  if (res == "media") {
    if (n == 3) {
      if (m != "POST") return method_not_allowed();
      auto ct = req.headers.find("content-type");
      const std::string mime = ct == req.headers.end() ? "application/octet-stream" : ct->second;
      const auto info = store_.media().put(req.body, mime.substr(0, mime.find(';')));
      return json_response(201, {{"content_hash", info.content_hash}, {"mime", info.mime}, {"size", info.size},
                                 {"media_ref", "sha256:" + info.content_hash}});
    }
    if (n == 4 && m == "GET") {
      const auto& hash = parts[3];
      const auto info = store_.media().info(hash);
      const auto bytes = store_.media().get(hash);
      if (!info || !bytes) return error_response(Errc::not_found, "no media " + hash);
      HttpResponse r;
      r.content_type = info->mime;
      r.body = *bytes;
      r.headers["X-Content-Hash"] = info->content_hash;
      return r;
    }
    return method_not_allowed();
  }

  if (res == "instruments" && n == 4 && m == "GET") {
    try {
      return json_response(200, tasks::to_json(tasks::builtin_instrument(parts[3])));
    } catch (const Error&) {
      return error_response(Errc::not_found, "no instrument " + parts[3]);
    }
  }

  if (res == "sessions") {
    if (n == 3) {
      if (m == "GET") {
        Json list = Json::array();
        for (const auto& s : sessions_.list()) list.push_back(session_json(*s));
        return json_response(200, {{"sessions", std::move(list)}});
      }
      if (m != "POST") return method_not_allowed();
      const Json body = parse_json(req.body);
      ObjectReader r(body, "session request");
      const auto flow_id = r.get<std::string>("flow_id");
      r.finish();
      const auto created = sessions_.create(flow_id);
      Json j = session_json(*created.session);
      j["publisher_token"] = created.publisher_token;
      j["publish_url"] = "/ws/publish/" + created.session->id();
      j["subscribe_url"] = "/ws/subscribe/" + created.session->id();
      return json_response(201, j);
    }
    const std::string& id = parts[3];
    if (n == 5 && parts[4] == "log" && m == "GET") {
      const auto text = read_file(store_.session_log_path(id));
      if (!text) return error_response(Errc::not_found, "no log for session " + id);
      HttpResponse r;
      r.content_type = "application/x-ndjson";
      r.body = *text;
      return r;
    }
    auto session = sessions_.find(id);
    if (!session) return error_response(Errc::not_found, "no session " + id);
    if (n == 4) {
      if (m != "GET") return method_not_allowed();
      return json_response(200, session_json(*session));
    }
    if (n == 5) {
      if (m != "POST") return method_not_allowed();
      const auto token = request_token(req, target);
      const auto& action = parts[4];
      if (action == "start") {
        session->start(token);
      } else if (action == "pause") {
        session->pause(token);
      } else if (action == "resume") {
        session->resume(token);
      } else if (action == "finish") {
        const auto seal = session->finish(token);
        Json j = session_json(*session);
        j["seal"] = {{"entry_count", seal.entry_count}, {"content_hash", seal.content_hash}};
        return json_response(200, j);
      } else {
        return error_response(Errc::not_found, "no route " + target.path);
      }
      return json_response(200, session_json(*session));
    }
  }
  return error_response(Errc::not_found, "no route " + target.path);
}

}  // namespace stimforge::service

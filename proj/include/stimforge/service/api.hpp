#pragma once

#include <map>
#include <string>

#include "stimforge/service/sessions.hpp"
#include "stimforge/service/store.hpp"

namespace stimforge::service {

struct HttpRequest {
  std::string method;
  /// Path plus optional query string.
  std::string target;
  /// Lower-case header names.
  std::map<std::string, std::string> headers;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
  std::string body;
};

/// HTTP status for an error code.
int http_status(Errc code);

/// {"error": <code name>, "message": ...}
HttpResponse error_response(Errc code, const std::string& message);

/// Splits "/a/b?x=1&y=2" into path and decoded query parameters.
struct ParsedTarget {
  std::string path;
  std::map<std::string, std::string> query;
};
ParsedTarget parse_target(const std::string& target);

/// REST endpoints under /api/v1/, independent of any socket layer.
class ApiRouter {
 public:
  ApiRouter(Store& store, SessionRegistry& sessions) : store_(store), sessions_(sessions) {}
  HttpResponse handle(const HttpRequest& request);

 private:
  HttpResponse route(const HttpRequest& request, const ParsedTarget& target);

  Store& store_;
  SessionRegistry& sessions_;
};

/// Bearer token from an Authorization header, or the `token` query parameter.
std::string request_token(const HttpRequest& request, const ParsedTarget& target);

}  // namespace stimforge::service

#pragma once

#include "stylevis/survey_service.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace stylevis::survey {

/// HTTP front of SurveyService:
///   GET  /api/session/{rater-id}
///   GET  /api/images/{item-id}/{prompt-index}
///   POST /api/response
///   GET  /api/export.csv       (X-Admin-Token header or ?token=)
/// Error bodies are {"error": <code>, "message": <text>}; status 400
/// validation, 401 bad admin token, 403 authorization, 404 not found,
/// 409 conflict.
class SurveyHttpServer {
 public:
  SurveyHttpServer(SurveyService& service, std::string admin_token);
  ~SurveyHttpServer();

  /// Serves static files (the rater UI) from `dir` at "/".
  bool mount_static(const std::filesystem::path& dir);

  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  SurveyService& service_;
  std::string admin_token_;
  std::unique_ptr<httplib::Server> server_;
};

int http_status_for(ErrorKind kind);

}  // namespace stylevis::survey

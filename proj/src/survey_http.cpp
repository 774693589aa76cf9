#include "stylevis/survey_http.hpp"

#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <httplib.h>
#include <json.hpp>

namespace stylevis::survey {
namespace {

void send_error(httplib::Response& res, ErrorKind kind, const std::string& message) {
  res.status = http_status_for(kind);
  res.set_content(nlohmann::json{{"error", std::string(to_string(kind))}, {"message", message}}
                      .dump(),
                  "application/json");
}

std::string content_type_for(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  if (ext == ".ppm") return "image/x-portable-pixmap";
  return "application/octet-stream";
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e.kind(), e.what());
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump(),
                    "application/json");
  }
}

}  // namespace

int http_status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::Argument:
      return 400;
    case ErrorKind::Authorization: return 403;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Conflict: return 409;
    default: return 500;
  }
}

SurveyHttpServer::SurveyHttpServer(SurveyService& service, std::string admin_token)
    : service_(service),
      admin_token_(std::move(admin_token)),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

SurveyHttpServer::~SurveyHttpServer() = default;

void SurveyHttpServer::install_routes() {
  server_->Get(R"(/api/session/([^/]+))", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
    guarded(res, [&] {
      res.set_content(session_to_json(service_.get_session(req.matches[1].str())),
                      "application/json");
    });
  });

  server_->Get(R"(/api/images/([^/]+)/(\d+))", [this](const httplib::Request& req,
                                                      httplib::Response& res) {
    guarded(res, [&] {
      const auto path = service_.image_file(req.matches[1].str(), std::stoi(req.matches[2].str()));
      res.set_content(fsutil::read_file(path), content_type_for(path));
    });
  });

  server_->Post("/api/response", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto stored = service_.submit(draft_from_json(req.body));
      res.status = 201;
      res.set_content(response_to_json(stored), "application/json");
    });
  });

  server_->Get("/api/export.csv", [this](const httplib::Request& req, httplib::Response& res) {
    std::string token = req.get_header_value("X-Admin-Token");
    if (token.empty() && req.has_param("token")) token = req.get_param_value("token");
    if (admin_token_.empty() || token != admin_token_) {
      res.status = 401;
      res.set_content(R"({"error":"unauthorized","message":"admin token required"})",
                      "application/json");
      return;
    }
    guarded(res, [&] { res.set_content(service_.export_csv(), "text/csv"); });
  });
}

bool SurveyHttpServer::mount_static(const std::filesystem::path& dir) {
  return server_->set_mount_point("/", dir.string());
}

int SurveyHttpServer::bind_to_any_port(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool SurveyHttpServer::bind(const std::string& host, int port) {
  return server_->bind_to_port(host, port);
}

bool SurveyHttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void SurveyHttpServer::stop() { server_->stop(); }

void SurveyHttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace stylevis::survey

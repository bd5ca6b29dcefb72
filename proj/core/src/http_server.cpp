#include "rhc/http_server.hpp"

#include <httplib.h>

#include "rhc/scoring.hpp"

namespace rhc {

struct HttpScoringServer::Impl {
  const ScoringService& service;
  httplib::Server server;

  explicit Impl(const ScoringService& s) : service(s) {
    // Responses go out as header and body writes; without this, delayed ACKs
    // add tens of milliseconds per keep-alive request.
    server.set_tcp_nodelay(true);
    server.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      int status = 500;
      std::string body = service.HandleScore(req.body, &status);
      res.status = status;
      res.set_content(std::move(body), "application/json");
    });
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(service.HandleHealth(), "application/json");
    });
  }
};

HttpScoringServer::HttpScoringServer(const ScoringService& service)
    : impl_(std::make_unique<Impl>(service)) {}

HttpScoringServer::~HttpScoringServer() { Stop(); }

int HttpScoringServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpScoringServer::Bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

bool HttpScoringServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpScoringServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpScoringServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace rhc

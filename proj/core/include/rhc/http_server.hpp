#ifndef RHC_HTTP_SERVER_HPP_
#define RHC_HTTP_SERVER_HPP_

#include <memory>
#include <string>

namespace rhc {

class ScoringService;

// POST /score and GET /health over HTTP/1.1. The service must outlive the
// server.
class HttpScoringServer {
 public:
  explicit HttpScoringServer(const ScoringService& service);
  ~HttpScoringServer();

  HttpScoringServer(const HttpScoringServer&) = delete;
  HttpScoringServer& operator=(const HttpScoringServer&) = delete;

  // Returns the bound port, or -1.
  int BindToAnyPort(const std::string& host);
  bool Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rhc

#endif  // RHC_HTTP_SERVER_HPP_

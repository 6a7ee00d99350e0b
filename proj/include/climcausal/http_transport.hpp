#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace climcausal {

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type = "application/json";
  double timeout_s = 30.0;
};

// status 0 means the request never produced an HTTP response (connect error,
// timeout); `error` then says why.
struct HttpResponse {
  int status = 0;
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// HTTPS/HTTP transport backed by cpp-httplib. Throws a Config error when the
// library was built without live HTTP support.
std::unique_ptr<HttpTransport> make_http_transport();

// Injectable time source so retry and rate-limit schedules are testable.
struct Clock {
  std::function<std::chrono::steady_clock::time_point()> now = [] { return std::chrono::steady_clock::now(); };
  std::function<void(std::chrono::duration<double>)> sleep = [](std::chrono::duration<double> d) {
    std::this_thread::sleep_for(d);
  };
};

std::string url_encode(const std::string& text);

}  // namespace climcausal

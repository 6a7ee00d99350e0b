#include "climcausal/http_transport.hpp"

#include "climcausal/error.hpp"

#ifdef CLIMCAUSAL_LIVE_HTTP
#include <httplib.h>
#endif

#include <cctype>
#include <cstdio>

namespace climcausal {

std::string url_encode(const std::string& text) {
  std::string out;
  char buf[4];
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

#ifdef CLIMCAUSAL_LIVE_HTTP

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse send(const HttpRequest& request) override {
    // Split "scheme://host[:port]/path?query".
    const auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) return {0, {}, "malformed URL " + request.url};
    const auto path_start = request.url.find('/', scheme_end + 3);
    const std::string origin = request.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

    httplib::Client client(origin);
    const auto seconds = static_cast<time_t>(request.timeout_s);
    const auto micros = static_cast<time_t>((request.timeout_s - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    client.set_follow_location(true);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    httplib::Result result = request.method == "POST"
                                 ? client.Post(path, headers, request.body, request.content_type)
                                 : client.Get(path, headers);
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
  }
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

#else

std::unique_ptr<HttpTransport> make_http_transport() {
  fail(ErrorKind::Config, "this build has no live HTTP support (configure with CLIMCAUSAL_LIVE_HTTP=ON)");
}

#endif

}  // namespace climcausal

#include <httplib.h>

#include "declsolve/llm_client.hpp"

namespace declsolve {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "endpoint needs a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers,
                    std::chrono::milliseconds timeout) override {
    const SplitUrl target = split_url(url);
    httplib::Client client(target.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(target.path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && std::chrono::steady_clock::now() - started >= timeout);
      if (timed_out) throw Error(ErrorCode::Timeout, "no response from " + url + " within " +
                                                        std::to_string(timeout.count()) + " ms");
      throw EndpointError(0, httplib::to_string(err) + " (" + url + ")");
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace declsolve

#include "socialoam/http.hpp"

#include <httplib.h>

#include "socialoam/errors.hpp"

namespace socialoam {

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("not a URL: '" + url + "'");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme in '" + url + "'");
  const auto path_begin = url.find_first_of("/?", scheme_end + 3);
  UrlParts parts;
  parts.scheme_host_port = url.substr(0, path_begin);
  parts.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (parts.path.front() == '?') parts.path.insert(0, "/");
  return parts;
}

std::optional<HttpResponse> http_get(const std::string& url,
                                     const std::vector<std::pair<std::string, std::string>>& params,
                                     std::chrono::seconds timeout) {
  const UrlParts parts = split_url(url);
  httplib::Client client(parts.scheme_host_port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  httplib::Params query;
  for (const auto& [k, v] : params) query.emplace(k, v);
  auto result = client.Get(parts.path, query, httplib::Headers{});
  if (!result) return std::nullopt;
  return HttpResponse{result->status, result->body};
}

}  // namespace socialoam

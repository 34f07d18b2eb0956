#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace socialoam {

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct UrlParts {
  std::string scheme_host_port;  ///< e.g. `http://127.0.0.1:8080`
  std::string path;              ///< path plus any query string, `/` when empty
};

/// Throws ConfigError for anything that is not an http(s) URL.
[[nodiscard]] UrlParts split_url(const std::string& url);

/// Plain GET with query parameters. nullopt on connection failure.
[[nodiscard]] std::optional<HttpResponse> http_get(const std::string& url,
                                                   const std::vector<std::pair<std::string, std::string>>& params,
                                                   std::chrono::seconds timeout);

}  // namespace socialoam

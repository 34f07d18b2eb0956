#pragma once

#include <set>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "socialoam/errors.hpp"

namespace socialoam::detail {

using nlohmann::json;

// Object view that rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  const json* get(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (const json* v = get(key)) out = as<T>(*v, key);
  }

  template <typename T>
  T as(const json& v, const char* key) const {
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("{}.{}: wrong type", where_, key));
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(fmt::format("{}: unknown key '{}'", where_, k));
    }
  }

  [[nodiscard]] const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace socialoam::detail

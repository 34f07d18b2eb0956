#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace socialoam {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

/// Parses an RFC 3339 timestamp and returns it in UTC.
///
/// Accepted: `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM`, `YYYY-MM-DDTHH:MM:SS[.fff]`,
/// with `T` or a space as separator and an optional `Z` / `±HH:MM` / `±HHMM`
/// suffix. Fractional seconds are truncated. When the string carries no
/// offset, `default_offset` (local minus UTC) is applied.
Timestamp parse_rfc3339(std::string_view text, std::chrono::minutes default_offset = {});

/// Parses a UTC offset such as `Z`, `UTC`, `+02:00`, `-0330`.
std::chrono::minutes parse_utc_offset(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_rfc3339(Timestamp t);

/// Floor division of a duration by a positive period.
inline long long floor_div(Duration d, Duration period) {
  const auto q = d.count() / period.count();
  const auto r = d.count() % period.count();
  return (r != 0 && ((r < 0) != (period.count() < 0))) ? q - 1 : q;
}

inline long long ceil_div(Duration d, Duration period) {
  const auto f = floor_div(d, period);
  return (d.count() % period.count() == 0) ? f : f + 1;
}

}  // namespace socialoam

#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "socialoam/events.hpp"

namespace socialoam {

struct FusionParams {
  double name_threshold = 0.85;
  Duration time_tolerance = std::chrono::minutes(30);
  /// Source priority by source_id; unknown sources count as 0.
  std::map<std::string, int> source_priority;
};

/// Merges duplicate records.
///
/// Two events are duplicates when similarity(name) >= name_threshold and
/// their start times differ by at most time_tolerance. Duplicates are merged
/// per connected component of that relation, which makes the result
/// independent of input order. Within a component the members are ordered by
/// (priority desc, start_time, name, event_id); the first member provides
/// the identity, and each optional field comes from the first member that has
/// it. A differing value in another member is recorded in `notes`.
///
/// Output is sorted by (start_time, name, event_id). The operation is
/// idempotent.
[[nodiscard]] std::vector<SocialEvent> fuse_sources(std::vector<SocialEvent> events, const FusionParams& params = {});

}  // namespace socialoam

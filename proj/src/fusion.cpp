#include "socialoam/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "socialoam/similarity.hpp"

namespace socialoam {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

int priority_of(const FusionParams& p, const SocialEvent& e) {
  const auto it = p.source_priority.find(e.source_id);
  return it == p.source_priority.end() ? 0 : it->second;
}

std::string show(const std::string& s) { return s; }
std::string show(double v) { return fmt::format("{}", v); }
std::string show(Timestamp t) { return format_rfc3339(t); }

template <typename T>
void merge_field(std::optional<T>& into, const std::optional<T>& from, const char* name, const SocialEvent& donor,
                 std::vector<std::string>& notes) {
  if (!from) return;
  if (!into) {
    into = from;
  } else if (!(*into == *from)) {
    notes.push_back(fmt::format("{}: kept '{}', discarded '{}' from {}", name, show(*into), show(*from), donor.event_id));
  }
}

bool output_before(const SocialEvent& a, const SocialEvent& b) {
  const auto ka = std::tie(a.start_time, a.name, a.event_id);
  const auto kb = std::tie(b.start_time, b.name, b.event_id);
  if (ka != kb) return ka < kb;
  // Records sharing an identity still need a total order.
  return to_json(a).dump() < to_json(b).dump();
}

}  // namespace

std::vector<SocialEvent> fuse_sources(std::vector<SocialEvent> events, const FusionParams& params) {
  // Canonical processing order so that component merges never depend on input order.
  std::sort(events.begin(), events.end(), output_before);
  const std::size_t n = events.size();

  std::vector<std::u32string> names;
  names.reserve(n);
  for (const auto& e : events) names.push_back(normalize_codepoints(e.name));

  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (events[j].start_time - events[i].start_time > params.time_tolerance) break;
      if (sets.find(i) == sets.find(j)) continue;
      if (similarity_normalized(names[i], names[j]) >= params.name_threshold) sets.unite(i, j);
    }
  }

  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);

  std::vector<SocialEvent> fused;
  for (auto& members : groups) {
    if (members.empty()) continue;
    if (members.size() == 1) {
      fused.push_back(std::move(events[members.front()]));
      continue;
    }
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      const int pa = priority_of(params, events[a]);
      const int pb = priority_of(params, events[b]);
      if (pa != pb) return pa > pb;
      return output_before(events[a], events[b]);
    });
    SocialEvent merged = events[members.front()];
    for (std::size_t k = 1; k < members.size(); ++k) {
      const SocialEvent& donor = events[members[k]];
      merge_field(merged.end_time, donor.end_time, "END_TIME", donor, merged.notes);
      if (donor.has_location()) {
        if (!merged.has_location()) {
          merged.lat = donor.lat;
          merged.lon = donor.lon;
        } else if (merged.location() != donor.location()) {
          merged.notes.push_back(fmt::format("LAT/LON: kept {},{}, discarded {},{} from {}", *merged.lat, *merged.lon,
                                             *donor.lat, *donor.lon, donor.event_id));
        }
      }
      merge_field(merged.venue, donor.venue, "VENUE", donor, merged.notes);
      merge_field(merged.category, donor.category, "TYPE", donor, merged.notes);
      merge_field(merged.popularity, donor.popularity, "POPULARITY", donor, merged.notes);
      if (donor.address) {
        if (!merged.address) {
          merged.address = donor.address;
        } else {
          merge_field(merged.address->street, donor.address->street, "ADDRESS.STREET", donor, merged.notes);
          merge_field(merged.address->city, donor.address->city, "ADDRESS.CITY", donor, merged.notes);
          merge_field(merged.address->region, donor.address->region, "ADDRESS.REGION", donor, merged.notes);
          merge_field(merged.address->country, donor.address->country, "ADDRESS.COUNTRY", donor, merged.notes);
          merge_field(merged.address->normalized, donor.address->normalized, "ADDRESS.NORMALIZED", donor,
                      merged.notes);
        }
      }
      merged.notes.push_back("merged " + donor.event_id);
    }
    // A merged end time must still follow the kept start time.
    if (merged.end_time && *merged.end_time <= merged.start_time) {
      merged.notes.push_back("END_TIME dropped: not after START_TIME");
      merged.end_time.reset();
    }
    fused.push_back(std::move(merged));
  }

  std::sort(fused.begin(), fused.end(), output_before);
  return fused;
}

}  // namespace socialoam

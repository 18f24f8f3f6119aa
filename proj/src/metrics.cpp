// Copyright 2026 The Scopeflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scopeflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace scopeflow {

namespace {

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross) > 1e-9 * std::max(1.0, len)) return false;
  return p.x >= std::min(a.x, b.x) - 1e-9 && p.x <= std::max(a.x, b.x) + 1e-9 &&
         p.y >= std::min(a.y, b.y) - 1e-9 && p.y <= std::max(a.y, b.y) + 1e-9;
}

}  // namespace

bool point_in_polygon(const Point2& p, const Polygon& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

Polygon rectangle_polygon(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

bool match_pattern(const Track& track, const SpatialPattern& pattern) {
  if (track.detections.empty()) return false;
  return point_in_polygon(track.first().center(), pattern.start_region) &&
         point_in_polygon(track.last().center(), pattern.end_region);
}

std::map<std::string, int> predict_counts(const std::vector<Track>& tracks,
                                          const std::vector<SpatialPattern>& patterns) {
  std::map<std::string, int> counts;
  for (const auto& p : patterns) counts[p.id] = 0;
  for (const auto& t : tracks) {
    for (const auto& p : patterns) {
      if (match_pattern(t, p)) ++counts[p.id];
    }
  }
  return counts;
}

double count_agreement(int predicted, int truth) {
  const double denom = std::max(truth, 1);
  return std::max(0.0, 1.0 - std::abs(predicted - truth) / denom);
}

double count_accuracy_from_counts(const CountLabels& predicted, const CountLabels& labels) {
  if (labels.empty()) throw MissingLabels("no labeled clips");
  for (const auto& [clip, _] : predicted) {
    if (!labels.contains(clip)) throw MissingLabels("clip '" + clip + "' has no labels");
  }
  double total = 0.0;
  for (const auto& [clip, truth] : labels) {
    auto it = predicted.find(clip);
    if (it == predicted.end()) throw MissingLabels("clip '" + clip + "' has no predictions");
    if (truth.empty()) {
      total += 1.0;
      continue;
    }
    double clip_sum = 0.0;
    for (const auto& [pattern, count] : truth) {
      auto p = it->second.find(pattern);
      clip_sum += count_agreement(p == it->second.end() ? 0 : p->second, count);
    }
    total += clip_sum / static_cast<double>(truth.size());
  }
  return total / static_cast<double>(labels.size());
}

double count_accuracy(const std::map<std::string, std::vector<Track>>& tracks_by_clip,
                      const std::vector<SpatialPattern>& patterns, const CountLabels& labels) {
  CountLabels predicted;
  for (const auto& [clip, tracks] : tracks_by_clip) {
    predicted[clip] = predict_counts(tracks, patterns);
  }
  return count_accuracy_from_counts(predicted, labels);
}

std::vector<int> limit_query(const std::vector<Track>& tracks, const LimitQuery& query) {
  struct Candidate {
    int frame;
    int count;
    int min_duration;
  };
  // frame -> (count, min duration) of in-region tracks
  std::map<int, std::pair<int, int>> occupancy;
  for (const auto& t : tracks) {
    if (t.detections.size() < 2) continue;
    const int dur = t.duration();
    for (const auto& d : t.detections) {
      if (!point_in_polygon(d.center(), query.region)) continue;
      auto [it, fresh] = occupancy.try_emplace(d.frame, 0, std::numeric_limits<int>::max());
      it->second.first += 1;
      it->second.second = std::min(it->second.second, dur);
    }
  }

  std::vector<Candidate> candidates;
  for (const auto& [frame, occ] : occupancy) {
    if (occ.first >= query.min_count) candidates.push_back({frame, occ.first, occ.second});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.min_duration > b.min_duration;
                   });

  std::vector<int> chosen;
  for (const auto& c : candidates) {
    if (static_cast<int>(chosen.size()) >= query.limit) break;
    const bool spaced = std::all_of(chosen.begin(), chosen.end(), [&](int f) {
      return std::abs(f - c.frame) >= query.spacing;
    });
    if (spaced) chosen.push_back(c.frame);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace scopeflow

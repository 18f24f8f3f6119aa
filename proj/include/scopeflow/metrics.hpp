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

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "scopeflow/geometry.hpp"

namespace scopeflow {

using Polygon = std::vector<Point2>;

// Even-odd rule; points on an edge or vertex count as inside.
bool point_in_polygon(const Point2& p, const Polygon& poly);

Polygon rectangle_polygon(double x0, double y0, double x1, double y1);

struct SpatialPattern {
  std::string id;
  Polygon start_region;
  Polygon end_region;
};

// clip id -> pattern id -> unique-object count.
using CountLabels = std::map<std::string, std::map<std::string, int>>;

class MissingLabels : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool match_pattern(const Track& track, const SpatialPattern& pattern);

std::map<std::string, int> predict_counts(const std::vector<Track>& tracks,
                                          const std::vector<SpatialPattern>& patterns);

// Clamped relative error, max(truth, 1) denominator.
double count_agreement(int predicted, int truth);

// Mean over patterns within each clip, then mean over clips. Every clip in
// `tracks_by_clip` must have labels; every labeled clip must have tracks
// (possibly an empty list).
double count_accuracy(const std::map<std::string, std::vector<Track>>& tracks_by_clip,
                      const std::vector<SpatialPattern>& patterns, const CountLabels& labels);

// Same metric from already-predicted counts.
double count_accuracy_from_counts(const CountLabels& predicted, const CountLabels& labels);

struct LimitQuery {
  Polygon region;
  int min_count = 4;
  int spacing = 50;  // frames
  int limit = 20;
};

// Frames where at least min_count multi-detection tracks have a detection
// inside the region, ranked by the minimum duration of those tracks and
// greedily thinned to respect spacing. Result is sorted ascending.
std::vector<int> limit_query(const std::vector<Track>& tracks, const LimitQuery& query);

}  // namespace scopeflow

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

// Endpoint refinement for low-rate tracks.
//
// Reference tracks (full-rate output of the best-accuracy configuration) are
// clustered by path shape. A low-rate track is extended at both ends to the
// weighted median start/end of the cluster centers closest to it, which
// recovers the entry and exit points that a coarse sampling gap skips over.

#pragma once

#include <map>
#include <vector>

#include "scopeflow/geometry.hpp"

namespace scopeflow {

inline constexpr int kPathPoints = 20;

using Path = std::vector<Point2>;

// Mean Euclidean distance between corresponding arc-length resampled points.
// Throws UnrefinableTrack for tracks with fewer than two detections.
double track_distance(const Track& a, const Track& b);
double path_distance(const Path& a, const Path& b);

struct DbscanResult {
  // labels[i] is the cluster of track i, or -1 for noise.
  std::vector<int> labels;
  int cluster_count = 0;
};

// Standard DBSCAN over a precomputed distance function. Points are visited in
// index order, so cluster ids are assigned by the first core point found.
DbscanResult dbscan(const std::vector<Path>& paths, double eps, int min_pts);

// Pointwise mean of the members' resampled paths.
Path cluster_center(const std::vector<Path>& members);

struct TrackCluster {
  int id = 0;
  int member_count = 1;
  Path center;
};

// Clusters from a DBSCAN result; noise points become singleton clusters
// numbered after the dense ones.
std::vector<TrackCluster> build_clusters(const std::vector<Path>& paths, const DbscanResult& db);

// Cells of `cell_size` pixels crossed by any segment of each center.
class PathGridIndex {
 public:
  PathGridIndex() = default;
  PathGridIndex(const std::vector<TrackCluster>& clusters, double cell_size = kCellSize);

  double cell_size() const { return cell_size_; }
  // Cluster ids registered in the 3x3 neighborhood of the point's cell,
  // ascending.
  std::vector<int> near(const Point2& p) const;
  const std::map<std::pair<int, int>, std::vector<int>>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

 private:
  std::pair<int, int> cell_of(const Point2& p) const;

  double cell_size_ = kCellSize;
  std::map<std::pair<int, int>, std::vector<int>> cells_;
};

// Cells touched by the segment a-b (supercover traversal).
std::vector<std::pair<int, int>> segment_cells(const Point2& a, const Point2& b, double cell_size);

struct RefinementOptions {
  double eps = 0.0;  // <= 0 means 5% of the frame diagonal
  int min_pts = 2;
  int k = 10;
};

struct RefinementModel {
  std::vector<TrackCluster> clusters;
  PathGridIndex index;
  RefinementOptions options;
};

// Clusters the resamplable reference tracks and indexes the centers.
RefinementModel build_refinement(const std::vector<Track>& reference, WindowSize frame,
                                 RefinementOptions options = {});

struct RefineResult {
  Track track;
  bool extended_start = false;
  bool extended_end = false;
  bool no_candidates = false;
};

// Lower-middle weighted median.
double weighted_median(std::vector<std::pair<double, int>> values);

// Extends the track's endpoints. Interior detections are never touched;
// new endpoint frames come from the boundary velocity and are clamped to
// [0, clip_length - 1]. An end is left alone when no free frame remains.
RefineResult refine(const Track& track, const RefinementModel& model, int clip_length);

}  // namespace scopeflow

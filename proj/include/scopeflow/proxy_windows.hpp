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

// Turning proxy cell scores into detector windows.
//
// Positive cells are grouped into clusters (seeded by 4-connected
// components), clusters are greedily merged while a single window of one of
// the fixed sizes is cheaper than the windows of the parts, and each cluster
// becomes one rectangle. The fixed size set itself is chosen ahead of time by
// greedy forward selection against ground-truth-derived cells.

#pragma once

#include <vector>

#include "scopeflow/geometry.hpp"
#include "scopeflow/scene_sim.hpp"

namespace scopeflow {

class WindowSizeSet {
 public:
  // Throws std::invalid_argument unless `sizes` is duplicate-free, every
  // size is a positive multiple of 32 within the frame, and the full frame
  // is present.
  WindowSizeSet(std::vector<WindowSize> sizes, WindowSize frame);

  static WindowSizeSet full_frame_only(WindowSize frame) { return WindowSizeSet({frame}, frame); }

  const std::vector<WindowSize>& sizes() const { return sizes_; }
  WindowSize frame() const { return frame_; }
  size_t size() const { return sizes_.size(); }
  bool contains(const WindowSize& s) const;
  WindowSizeSet with(const WindowSize& extra) const;

 private:
  std::vector<WindowSize> sizes_;
  WindowSize frame_;
};

struct WindowPlan {
  std::vector<Rect> rects;
  std::vector<Cell> covered_cells;  // cells lying inside some rect, row-major
  bool fell_back_to_full_frame = false;
};

std::vector<Cell> threshold(const FrameGrid& grid, double b_proxy);

// 4-connected components. Clusters are ordered by their first cell in
// row-major order and each cluster's cells are row-major sorted.
std::vector<std::vector<Cell>> connected_components(const std::vector<Cell>& cells);

double est_time(const std::vector<Rect>& rects, const WindowCostTable& costs);

// Minimum-area size whose extent holds a box of the given pixel size; ties
// broken by smaller width. Falls back to the full frame.
WindowSize smallest_window_for(int box_w, int box_h, const WindowSizeSet& sizes);

struct GroupingStats {
  int initial_clusters = 0;
  int passes = 0;
  int merges = 0;
};

WindowPlan group_cells(const std::vector<Cell>& cells, const WindowSizeSet& sizes,
                       const WindowCostTable& costs, GroupingStats* stats = nullptr);

// Positive cells assuming a perfect proxy: every cell overlapping a box.
std::vector<Cell> cells_for_boxes(const std::vector<Detection>& boxes, WindowSize frame);

struct WindowSelection {
  WindowSizeSet sizes;
  std::vector<double> objective;  // tot_time after each greedy step, starting from {full}
};

// Greedy forward selection of k window sizes. `frames` holds one detection
// list per training frame. Throws std::invalid_argument on an empty set.
WindowSelection select_window_sizes(const std::vector<std::vector<Detection>>& frames, int k,
                                    const WindowCostTable& costs, WindowSize frame);

// tot_time for one size set over precomputed per-frame cells.
double total_plan_time(const std::vector<std::vector<Cell>>& frame_cells,
                       const WindowSizeSet& sizes, const WindowCostTable& costs);

// Cached per-frame inputs for the proxy module's recall/runtime estimates.
struct ProxyFrameCache {
  std::vector<FrameGrid> grids;                     // one per proxy resolution
  std::vector<Detection> reference_detections;      // from the best-accuracy configuration
};

struct ProxyCache {
  std::vector<std::string> proxy_ids;               // parallel to ProxyFrameCache::grids
  std::vector<double> proxy_costs;
  std::vector<ProxyFrameCache> frames;
};

class CacheMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecallRuntime {
  double recall = 1.0;
  double runtime = 0.0;
};

// Fraction of cached reference detections whose box overlaps a planned rect,
// and proxy time plus planned detector time summed over the cached frames.
RecallRuntime recall_runtime(const ProxyCache& cache, const std::string& proxy_id, double b_proxy,
                             const WindowSizeSet& sizes, const WindowCostTable& costs);

}  // namespace scopeflow

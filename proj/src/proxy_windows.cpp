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

#include "scopeflow/proxy_windows.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

namespace scopeflow {

WindowSizeSet::WindowSizeSet(std::vector<WindowSize> sizes, WindowSize frame)
    : sizes_(std::move(sizes)), frame_(frame) {
  std::set<WindowSize> seen;
  bool has_full = false;
  for (const auto& s : sizes_) {
    if (s.w < kCellSize || s.h < kCellSize || s.w % kCellSize != 0 || s.h % kCellSize != 0 ||
        s.w > frame.w || s.h > frame.h) {
      throw std::invalid_argument("window size " + std::to_string(s.w) + "x" +
                                  std::to_string(s.h) + " is not a multiple of 32 inside the frame");
    }
    if (!seen.insert(s).second) throw std::invalid_argument("duplicate window size");
    has_full = has_full || s == frame;
  }
  if (!has_full) throw std::invalid_argument("window size set must contain the full frame");
}

bool WindowSizeSet::contains(const WindowSize& s) const {
  return std::find(sizes_.begin(), sizes_.end(), s) != sizes_.end();
}

WindowSizeSet WindowSizeSet::with(const WindowSize& extra) const {
  auto sizes = sizes_;
  sizes.push_back(extra);
  return WindowSizeSet(std::move(sizes), frame_);
}

std::vector<Cell> threshold(const FrameGrid& grid, double b_proxy) {
  std::vector<Cell> out;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (grid.at(c, r) > b_proxy) out.push_back({c, r});
    }
  }
  return out;
}

std::vector<std::vector<Cell>> connected_components(const std::vector<Cell>& cells) {
  std::set<Cell> pending(cells.begin(), cells.end());
  std::vector<std::vector<Cell>> out;
  // std::set<Cell> orders by (col, row); components are reported in
  // row-major order of their first cell, so walk a row-major copy.
  std::vector<Cell> order(pending.begin(), pending.end());
  std::sort(order.begin(), order.end(), [](const Cell& a, const Cell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const auto& seed : order) {
    if (!pending.contains(seed)) continue;
    std::vector<Cell> comp;
    std::deque<Cell> queue{seed};
    pending.erase(seed);
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      comp.push_back(c);
      const Cell nbrs[] = {{c.col - 1, c.row}, {c.col + 1, c.row}, {c.col, c.row - 1},
                           {c.col, c.row + 1}};
      for (const auto& n : nbrs) {
        if (pending.erase(n) > 0) queue.push_back(n);
      }
    }
    std::sort(comp.begin(), comp.end(), [](const Cell& a, const Cell& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    out.push_back(std::move(comp));
  }
  return out;
}

double est_time(const std::vector<Rect>& rects, const WindowCostTable& costs) {
  double total = 0.0;
  for (const auto& r : rects) total += costs.at(r.size());
  return total;
}

WindowSize smallest_window_for(int box_w, int box_h, const WindowSizeSet& sizes) {
  const WindowSize* best = nullptr;
  for (const auto& s : sizes.sizes()) {
    if (!s.contains(box_w, box_h)) continue;
    if (best == nullptr || area_then_width_less(s, *best)) best = &s;
  }
  return best != nullptr ? *best : sizes.frame();
}

namespace {

struct CellBox {
  int c0 = std::numeric_limits<int>::max();
  int r0 = std::numeric_limits<int>::max();
  int c1 = std::numeric_limits<int>::min();
  int r1 = std::numeric_limits<int>::min();

  void add(const CellBox& o) {
    c0 = std::min(c0, o.c0);
    r0 = std::min(r0, o.r0);
    c1 = std::max(c1, o.c1);
    r1 = std::max(r1, o.r1);
  }
  int pixel_w() const { return (c1 - c0 + 1) * kCellSize; }
  int pixel_h() const { return (r1 - r0 + 1) * kCellSize; }
};

struct Cluster {
  std::vector<Cell> cells;
  CellBox box;
  double sum_col = 0.0;
  double sum_row = 0.0;

  explicit Cluster(const std::vector<Cell>& cs) {
    for (const auto& c : cs) add_cell(c);
  }
  void add_cell(const Cell& c) {
    cells.push_back(c);
    box.add({c.col, c.row, c.col, c.row});
    sum_col += c.col;
    sum_row += c.row;
  }
  void absorb(const Cluster& o) {
    cells.insert(cells.end(), o.cells.begin(), o.cells.end());
    box.add(o.box);
    sum_col += o.sum_col;
    sum_row += o.sum_row;
  }
  double cx() const { return sum_col / cells.size(); }
  double cy() const { return sum_row / cells.size(); }
};

int place(int box_start, int box_len, int window_len, int frame_len) {
  const int slack_cells = (window_len - box_len) / kCellSize;
  const int start = box_start - (slack_cells / 2) * kCellSize;
  return std::clamp(start, 0, frame_len - window_len);
}

}  // namespace

WindowPlan group_cells(const std::vector<Cell>& cells, const WindowSizeSet& sizes,
                       const WindowCostTable& costs, GroupingStats* stats) {
  WindowPlan plan;
  GroupingStats local;
  std::vector<Cluster> clusters;
  for (const auto& comp : connected_components(cells)) clusters.emplace_back(comp);
  local.initial_clusters = static_cast<int>(clusters.size());

  auto window_of = [&](const CellBox& b) {
    return smallest_window_for(b.pixel_w(), b.pixel_h(), sizes);
  };

  bool merged_any = !clusters.empty();
  while (merged_any) {
    merged_any = false;
    ++local.passes;
    size_t i = 0;
    while (i < clusters.size() && clusters.size() >= 2) {
      size_t nearest = i;
      double best = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < clusters.size(); ++j) {
        if (j == i) continue;
        const double d = std::hypot(clusters[i].cx() - clusters[j].cx(),
                                    clusters[i].cy() - clusters[j].cy());
        if (d < best) {
          best = d;
          nearest = j;
        }
      }

      CellBox merged_box = clusters[i].box;
      merged_box.add(clusters[nearest].box);
      const WindowSize window = window_of(merged_box);
      std::vector<size_t> members{i, nearest};
      for (size_t k = 0; k < clusters.size(); ++k) {
        if (k == i || k == nearest) continue;
        CellBox trial = merged_box;
        trial.add(clusters[k].box);
        if (window.contains(trial.pixel_w(), trial.pixel_h())) {
          merged_box = trial;
          members.push_back(k);
        }
      }

      double separate = 0.0;
      for (size_t m : members) separate += costs.at(window_of(clusters[m].box));
      if (costs.at(window) < separate) {
        std::sort(members.begin(), members.end());
        Cluster merged = clusters[members.front()];
        for (size_t m = 1; m < members.size(); ++m) merged.absorb(clusters[members[m]]);
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(*it));
        }
        clusters.insert(clusters.begin() + static_cast<std::ptrdiff_t>(members.front()),
                        std::move(merged));
        i = members.front() + 1;
        merged_any = true;
        ++local.merges;
      } else {
        ++i;
      }
    }
  }

  const WindowSize frame = sizes.frame();
  for (const auto& c : clusters) {
    const WindowSize win = window_of(c.box);
    plan.rects.push_back({place(c.box.c0 * kCellSize, c.box.pixel_w(), win.w, frame.w),
                          place(c.box.r0 * kCellSize, c.box.pixel_h(), win.h, frame.h), win.w,
                          win.h});
  }
  if (!plan.rects.empty() && est_time(plan.rects, costs) > costs.at(frame)) {
    plan.rects = {{0, 0, frame.w, frame.h}};
    plan.fell_back_to_full_frame = true;
  }

  const int cols = frame.w / kCellSize;
  const int rows = frame.h / kCellSize;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const bool inside = std::any_of(plan.rects.begin(), plan.rects.end(), [&](const Rect& rc) {
        return c * kCellSize >= rc.x && (c + 1) * kCellSize <= rc.x + rc.w &&
               r * kCellSize >= rc.y && (r + 1) * kCellSize <= rc.y + rc.h;
      });
      if (inside) plan.covered_cells.push_back({c, r});
    }
  }
  if (stats != nullptr) *stats = local;
  return plan;
}

std::vector<Cell> cells_for_boxes(const std::vector<Detection>& boxes, WindowSize frame) {
  const FrameGrid grid = FrameGrid::for_frame(frame.w, frame.h);
  std::set<Cell> acc;
  for (const auto& b : boxes) {
    for (const auto& c : cells_intersecting(b, grid)) acc.insert(c);
  }
  std::vector<Cell> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return out;
}

double total_plan_time(const std::vector<std::vector<Cell>>& frame_cells,
                       const WindowSizeSet& sizes, const WindowCostTable& costs) {
  double total = 0.0;
  for (const auto& cells : frame_cells) {
    if (cells.empty()) continue;
    total += est_time(group_cells(cells, sizes, costs).rects, costs);
  }
  return total;
}

namespace {

// tot_time over distinct cell sets weighted by how often each occurs.
double weighted_plan_time(const std::vector<std::pair<std::vector<Cell>, int>>& distinct,
                          const WindowSizeSet& sizes, const WindowCostTable& costs) {
  double total = 0.0;
  for (const auto& [cells, count] : distinct) {
    total += count * est_time(group_cells(cells, sizes, costs).rects, costs);
  }
  return total;
}

}  // namespace

WindowSelection select_window_sizes(const std::vector<std::vector<Detection>>& frames, int k,
                                    const WindowCostTable& costs, WindowSize frame) {
  if (frames.empty()) throw std::invalid_argument("window size selection needs training frames");
  if (k < 1) throw std::invalid_argument("window size set cardinality must be >= 1");

  std::map<std::vector<Cell>, int> multiplicity;
  for (const auto& f : frames) {
    auto cells = cells_for_boxes(f, frame);
    if (!cells.empty()) ++multiplicity[std::move(cells)];
  }
  const std::vector<std::pair<std::vector<Cell>, int>> distinct(multiplicity.begin(),
                                                                multiplicity.end());

  std::vector<WindowSize> candidates;
  for (int w = kCellSize; w <= frame.w; w += kCellSize) {
    for (int h = kCellSize; h <= frame.h; h += kCellSize) {
      if (WindowSize{w, h} != frame) candidates.push_back({w, h});
    }
  }
  std::sort(candidates.begin(), candidates.end(), area_then_width_less);

  WindowSelection sel{WindowSizeSet::full_frame_only(frame), {}};
  sel.objective.push_back(weighted_plan_time(distinct, sel.sizes, costs));
  while (static_cast<int>(sel.sizes.size()) < k) {
    const WindowSize* best = nullptr;
    double best_time = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
      if (sel.sizes.contains(c)) continue;
      const double t = weighted_plan_time(distinct, sel.sizes.with(c), costs);
      // Candidates are visited in (area, width) order, so strict improvement
      // keeps the tie-break.
      if (t < best_time) {
        best_time = t;
        best = &c;
      }
    }
    if (best == nullptr) break;
    sel.sizes = sel.sizes.with(*best);
    sel.objective.push_back(best_time);
  }
  return sel;
}

RecallRuntime recall_runtime(const ProxyCache& cache, const std::string& proxy_id, double b_proxy,
                             const WindowSizeSet& sizes, const WindowCostTable& costs) {
  const auto it = std::find(cache.proxy_ids.begin(), cache.proxy_ids.end(), proxy_id);
  if (it == cache.proxy_ids.end()) {
    throw CacheMissing("no cached proxy scores for '" + proxy_id + "'");
  }
  const size_t pi = static_cast<size_t>(it - cache.proxy_ids.begin());

  RecallRuntime out;
  long total = 0;
  long covered = 0;
  for (const auto& f : cache.frames) {
    if (pi >= f.grids.size()) throw CacheMissing("proxy cache frame is incomplete");
    const WindowPlan plan = group_cells(threshold(f.grids[pi], b_proxy), sizes, costs);
    out.runtime += cache.proxy_costs[pi] + est_time(plan.rects, costs);
    for (const auto& d : f.reference_detections) {
      ++total;
      if (std::any_of(plan.rects.begin(), plan.rects.end(),
                      [&](const Rect& r) { return box_overlaps_rect(d, r); })) {
        ++covered;
      }
    }
  }
  out.recall = total > 0 ? static_cast<double>(covered) / static_cast<double>(total) : 1.0;
  return out;
}

}  // namespace scopeflow

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

#include "scopeflow/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace scopeflow {

double path_distance(const Path& a, const Path& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("paths must have the same non-zero length");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += distance(a[i], b[i]);
  return sum / static_cast<double>(a.size());
}

double track_distance(const Track& a, const Track& b) {
  return path_distance(resample_path(a, kPathPoints), resample_path(b, kPathPoints));
}

DbscanResult dbscan(const std::vector<Path>& paths, double eps, int min_pts) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be positive");
  const int n = static_cast<int>(paths.size());
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || path_distance(paths[i], paths[j]) <= eps) neighbors[i].push_back(j);
    }
  }

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  DbscanResult out;
  out.labels.assign(n, kUnvisited);
  for (int i = 0; i < n; ++i) {
    if (out.labels[i] != kUnvisited) continue;
    if (static_cast<int>(neighbors[i].size()) < min_pts) {
      out.labels[i] = kNoise;
      continue;
    }
    const int c = out.cluster_count++;
    out.labels[i] = c;
    std::deque<int> frontier(neighbors[i].begin(), neighbors[i].end());
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop_front();
      if (out.labels[j] == kNoise) out.labels[j] = c;  // border point
      if (out.labels[j] != kUnvisited) continue;
      out.labels[j] = c;
      if (static_cast<int>(neighbors[j].size()) >= min_pts) {
        frontier.insert(frontier.end(), neighbors[j].begin(), neighbors[j].end());
      }
    }
  }
  return out;
}

Path cluster_center(const std::vector<Path>& members) {
  if (members.empty()) throw std::invalid_argument("cluster has no members");
  Path center(members.front().size());
  for (const auto& m : members) {
    if (m.size() != center.size()) throw std::invalid_argument("member paths differ in length");
    for (size_t i = 0; i < m.size(); ++i) {
      center[i].x += m[i].x;
      center[i].y += m[i].y;
    }
  }
  const double n = static_cast<double>(members.size());
  for (auto& p : center) {
    p.x /= n;
    p.y /= n;
  }
  return center;
}

std::vector<TrackCluster> build_clusters(const std::vector<Path>& paths, const DbscanResult& db) {
  std::vector<std::vector<Path>> groups(static_cast<size_t>(db.cluster_count));
  std::vector<TrackCluster> out;
  std::vector<const Path*> noise;
  for (size_t i = 0; i < paths.size(); ++i) {
    if (db.labels[i] >= 0) {
      groups[db.labels[i]].push_back(paths[i]);
    } else {
      noise.push_back(&paths[i]);
    }
  }
  for (const auto& g : groups) {
    out.push_back({static_cast<int>(out.size()), static_cast<int>(g.size()), cluster_center(g)});
  }
  for (const Path* p : noise) out.push_back({static_cast<int>(out.size()), 1, *p});
  return out;
}

std::vector<std::pair<int, int>> segment_cells(const Point2& a, const Point2& b,
                                               double cell_size) {
  int cx = static_cast<int>(std::floor(a.x / cell_size));
  int cy = static_cast<int>(std::floor(a.y / cell_size));
  const int ex = static_cast<int>(std::floor(b.x / cell_size));
  const int ey = static_cast<int>(std::floor(b.y / cell_size));
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  double tmax_x = sx != 0 ? ((cx + (sx > 0 ? 1 : 0)) * cell_size - a.x) / dx : inf;
  double tmax_y = sy != 0 ? ((cy + (sy > 0 ? 1 : 0)) * cell_size - a.y) / dy : inf;
  const double tdelta_x = sx != 0 ? cell_size / std::abs(dx) : inf;
  const double tdelta_y = sy != 0 ? cell_size / std::abs(dy) : inf;

  std::vector<std::pair<int, int>> out;
  const int max_steps = std::abs(ex - cx) + std::abs(ey - cy) + 2;
  out.emplace_back(cx, cy);
  for (int s = 0; s < max_steps && (cx != ex || cy != ey); ++s) {
    if (tmax_x < tmax_y) {
      cx += sx;
      tmax_x += tdelta_x;
    } else if (tmax_y < tmax_x) {
      cy += sy;
      tmax_y += tdelta_y;
    } else {
      // Exact corner crossing: include both side neighbors.
      out.emplace_back(cx + sx, cy);
      out.emplace_back(cx, cy + sy);
      cx += sx;
      cy += sy;
      tmax_x += tdelta_x;
      tmax_y += tdelta_y;
    }
    out.emplace_back(cx, cy);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PathGridIndex::PathGridIndex(const std::vector<TrackCluster>& clusters, double cell_size)
    : cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("index cell size must be positive");
  for (const auto& c : clusters) {
    for (size_t i = 0; i < c.center.size(); ++i) {
      const Point2& a = c.center[i];
      const Point2& b = i + 1 < c.center.size() ? c.center[i + 1] : c.center[i];
      for (const auto& cell : segment_cells(a, b, cell_size_)) {
        auto& ids = cells_[cell];
        if (ids.empty() || ids.back() != c.id) ids.push_back(c.id);
      }
    }
  }
  for (auto& [cell, ids] : cells_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
}

std::pair<int, int> PathGridIndex::cell_of(const Point2& p) const {
  return {static_cast<int>(std::floor(p.x / cell_size_)),
          static_cast<int>(std::floor(p.y / cell_size_))};
}

std::vector<int> PathGridIndex::near(const Point2& p) const {
  const auto [cx, cy] = cell_of(p);
  std::vector<int> out;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      auto it = cells_.find({cx + dx, cy + dy});
      if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RefinementModel build_refinement(const std::vector<Track>& reference, WindowSize frame,
                                 RefinementOptions options) {
  if (options.eps <= 0.0) options.eps = 0.05 * std::hypot(frame.w, frame.h);
  if (options.min_pts < 1) throw std::invalid_argument("min_pts must be >= 1");
  if (options.k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<Path> paths;
  for (const auto& t : reference) {
    if (t.detections.size() >= 2) paths.push_back(resample_path(t, kPathPoints));
  }
  RefinementModel model;
  model.options = options;
  model.clusters = build_clusters(paths, dbscan(paths, options.eps, options.min_pts));
  model.index = PathGridIndex(model.clusters);
  return model;
}

double weighted_median(std::vector<std::pair<double, int>> values) {
  if (values.empty()) throw std::invalid_argument("weighted median of nothing");
  std::stable_sort(values.begin(), values.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  long total = 0;
  for (const auto& [v, w] : values) total += w;
  long cum = 0;
  for (const auto& [v, w] : values) {
    cum += w;
    if (2 * cum >= total) return v;
  }
  return values.back().first;
}

namespace {

// Frames needed to cover `dist` pixels at the track's speed near one end.
int frames_for(double dist, const Detection& a, const Detection& b) {
  const double dt = std::abs(b.frame - a.frame);
  const double speed = dt > 0 ? distance(a.center(), b.center()) / dt : 0.0;
  if (speed <= 1e-9) return 1;
  return std::max(1, static_cast<int>(std::lround(dist / speed)));
}

}  // namespace

RefineResult refine(const Track& track, const RefinementModel& model, int clip_length) {
  RefineResult out;
  out.track = track;
  if (track.detections.size() < 2 || model.clusters.empty()) {
    out.no_candidates = true;
    return out;
  }
  std::vector<int> candidates = model.index.near(track.first().center());
  for (int id : model.index.near(track.last().center())) candidates.push_back(id);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) {
    out.no_candidates = true;
    return out;
  }

  const Path path = resample_path(track, kPathPoints);
  std::vector<std::pair<double, int>> ranked;
  for (int id : candidates) ranked.emplace_back(path_distance(path, model.clusters[id].center), id);
  std::sort(ranked.begin(), ranked.end());

  std::vector<std::pair<double, int>> xs0, ys0, xs1, ys1;
  int multiplicity = 0;
  for (const auto& [d, id] : ranked) {
    if (multiplicity >= model.options.k) break;
    const auto& c = model.clusters[id];
    xs0.emplace_back(c.center.front().x, c.member_count);
    ys0.emplace_back(c.center.front().y, c.member_count);
    xs1.emplace_back(c.center.back().x, c.member_count);
    ys1.emplace_back(c.center.back().y, c.member_count);
    multiplicity += c.member_count;
  }
  const Point2 start{weighted_median(xs0), weighted_median(ys0)};
  const Point2 end{weighted_median(xs1), weighted_median(ys1)};

  auto& dets = out.track.detections;
  const Detection first = dets.front();
  const Detection second = dets[1];
  const Detection last = dets.back();
  const Detection before_last = dets[dets.size() - 2];

  if (first.frame > 0) {
    Detection d = first;
    d.x = start.x;
    d.y = start.y;
    d.frame = std::max(0, first.frame - frames_for(distance(start, first.center()), first, second));
    d.object_id = -1;
    dets.insert(dets.begin(), d);
    out.extended_start = true;
  }
  if (last.frame < clip_length - 1) {
    Detection d = last;
    d.x = end.x;
    d.y = end.y;
    d.frame = std::min(clip_length - 1,
                       last.frame + frames_for(distance(end, last.center()), before_last, last));
    d.object_id = -1;
    dets.push_back(d);
    out.extended_end = true;
  }
  return out;
}

}  // namespace scopeflow

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

#include "scopeflow/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace scopeflow {

double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void validate_track(const Track& track) {
  if (track.detections.empty()) {
    throw std::invalid_argument("track " + std::to_string(track.id) + " has no detections");
  }
  for (size_t i = 1; i < track.detections.size(); ++i) {
    if (track.detections[i].frame <= track.detections[i - 1].frame) {
      throw std::invalid_argument("track " + std::to_string(track.id) +
                                  " frames are not strictly increasing");
    }
  }
}

bool area_then_width_less(const WindowSize& a, const WindowSize& b) {
  if (a.area() != b.area()) return a.area() < b.area();
  if (a.w != b.w) return a.w < b.w;
  return a.h < b.h;
}

double iou(const Detection& a, const Detection& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Point2> resample_path(const Track& track, int n) {
  if (track.detections.size() < 2) {
    throw UnrefinableTrack("track " + std::to_string(track.id) +
                           " has fewer than two detections");
  }
  if (n < 2) throw std::invalid_argument("resample_path needs n >= 2");

  std::vector<Point2> pts;
  pts.reserve(track.detections.size());
  for (const auto& d : track.detections) pts.push_back(d.center());

  std::vector<double> cumulative(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + distance(pts[i - 1], pts[i]);
  }
  const double total = cumulative.back();

  std::vector<Point2> out;
  out.reserve(n);
  size_t seg = 1;
  for (int k = 0; k < n; ++k) {
    if (k == n - 1) {
      out.push_back(pts.back());
      break;
    }
    const double target = total * k / (n - 1);
    while (seg < pts.size() - 1 && cumulative[seg] < target) ++seg;
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const double t = seg_len > 0.0 ? (target - cumulative[seg - 1]) / seg_len : 0.0;
    out.push_back({pts[seg - 1].x + t * (pts[seg].x - pts[seg - 1].x),
                   pts[seg - 1].y + t * (pts[seg].y - pts[seg - 1].y)});
  }
  return out;
}

std::vector<Cell> cells_intersecting(const Detection& box, const FrameGrid& grid) {
  std::vector<Cell> out;
  const double cs = grid.cell_size;
  const int c0 = std::max(0, static_cast<int>(std::floor(box.left() / cs)));
  const int c1 = std::min(grid.cols - 1, static_cast<int>(std::floor(box.right() / cs)));
  const int r0 = std::max(0, static_cast<int>(std::floor(box.top() / cs)));
  const int r1 = std::min(grid.rows - 1, static_cast<int>(std::floor(box.bottom() / cs)));
  for (int r = r0; r <= r1; ++r) {
    const double oy = std::min(box.bottom(), (r + 1) * cs) - std::max(box.top(), r * cs);
    if (oy <= 0.0) continue;
    for (int c = c0; c <= c1; ++c) {
      const double ox = std::min(box.right(), (c + 1) * cs) - std::max(box.left(), c * cs);
      if (ox > 0.0) out.push_back({c, r});
    }
  }
  return out;
}

bool box_overlaps_rect(const Detection& box, const Rect& rect) {
  const double ox = std::min(box.right(), static_cast<double>(rect.x + rect.w)) -
                    std::max(box.left(), static_cast<double>(rect.x));
  const double oy = std::min(box.bottom(), static_cast<double>(rect.y + rect.h)) -
                    std::max(box.top(), static_cast<double>(rect.y));
  return ox > 0.0 && oy > 0.0;
}

bool clip_to_frame(Detection& box, int frame_w, int frame_h) {
  const double l = std::max(0.0, box.left());
  const double r = std::min(static_cast<double>(frame_w), box.right());
  const double t = std::max(0.0, box.top());
  const double b = std::min(static_cast<double>(frame_h), box.bottom());
  if (r - l <= 0.0 || b - t <= 0.0) return false;
  box.x = (l + r) / 2.0;
  box.y = (t + b) / 2.0;
  box.w = r - l;
  box.h = b - t;
  return true;
}

}  // namespace scopeflow

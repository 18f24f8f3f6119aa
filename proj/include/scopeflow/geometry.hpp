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

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace scopeflow {

inline constexpr int kCellSize = 32;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(const Point2& a, const Point2& b);

// A box in a single frame. (x, y) is the box center; corner form is derived.
// object_id carries simulator provenance (-1 when unknown) and is never
// consulted by tracking or planning code.
struct Detection {
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 1.0;
  std::string category = "object";
  int object_id = -1;

  double left() const { return x - w / 2.0; }
  double right() const { return x + w / 2.0; }
  double top() const { return y - h / 2.0; }
  double bottom() const { return y + h / 2.0; }
  Point2 center() const { return {x, y}; }

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct Track {
  int id = 0;
  std::string category = "object";
  std::vector<Detection> detections;

  const Detection& first() const { return detections.front(); }
  const Detection& last() const { return detections.back(); }
  int duration() const { return last().frame - first().frame; }

  friend bool operator==(const Track&, const Track&) = default;
};

// Throws std::invalid_argument if the track is empty or its frames are not
// strictly increasing.
void validate_track(const Track& track);

struct Cell {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Per-cell scores over a frame, row-major.
struct FrameGrid {
  int cols = 0;
  int rows = 0;
  int cell_size = kCellSize;
  std::vector<double> scores;

  FrameGrid() = default;
  FrameGrid(int cols_, int rows_, double fill = 0.0)
      : cols(cols_), rows(rows_), scores(static_cast<size_t>(cols_) * rows_, fill) {}

  static FrameGrid for_frame(int frame_w, int frame_h, double fill = 0.0) {
    return FrameGrid(frame_w / kCellSize, frame_h / kCellSize, fill);
  }

  double& at(int col, int row) { return scores[static_cast<size_t>(row) * cols + col]; }
  double at(int col, int row) const { return scores[static_cast<size_t>(row) * cols + col]; }
  int frame_width() const { return cols * cell_size; }
  int frame_height() const { return rows * cell_size; }
};

struct WindowSize {
  int w = 0;
  int h = 0;

  long area() const { return static_cast<long>(w) * h; }
  bool contains(int box_w, int box_h) const { return box_w <= w && box_h <= h; }

  friend auto operator<=>(const WindowSize&, const WindowSize&) = default;
};

// Orders sizes by area, then width; used wherever a deterministic
// "smallest first" choice is needed.
bool area_then_width_less(const WindowSize& a, const WindowSize& b);

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  WindowSize size() const { return {w, h}; }
  bool contains_point(double px, double py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }

  friend auto operator<=>(const Rect&, const Rect&) = default;
};

class UnrefinableTrack : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double iou(const Detection& a, const Detection& b);

// n points spaced evenly by arc length along the polyline of box centers.
std::vector<Point2> resample_path(const Track& track, int n);

// Cells whose pixel square overlaps the box with positive area, in
// row-major order. Edge contact alone does not count.
std::vector<Cell> cells_intersecting(const Detection& box, const FrameGrid& grid);

// Positive-area overlap between a box and a rectangle.
bool box_overlaps_rect(const Detection& box, const Rect& rect);

// Clips the box to [0, frame_w] x [0, frame_h]; returns false when nothing
// of positive area remains.
bool clip_to_frame(Detection& box, int frame_w, int frame_h);

}  // namespace scopeflow

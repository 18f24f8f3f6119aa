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

// Synthetic scenes, a simulated detector and segmentation proxy, and the cost
// model that turns every pipeline decision into a deterministic runtime.

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "scopeflow/geometry.hpp"
#include "scopeflow/metrics.hpp"

namespace scopeflow {

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingCostEntry : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A route through the scene. Objects enter at the first waypoint, travel the
// polyline at a constant per-object speed (pixels per frame) and leave at the
// last waypoint.
struct PathSpec {
  std::string id;
  std::vector<Point2> waypoints;
  double speed_min = 4.0;
  double speed_max = 6.0;
  double lateral_jitter = 6.0;  // max perpendicular offset, pixels

  double length() const;
  Point2 point_at(double arc) const;
  Point2 normal_at(double arc) const;
};

struct SceneSpec {
  int frame_w = 640;
  int frame_h = 352;
  int fps = 10;
  int duration = 300;  // frames per clip
  int clip_count = 60;
  double object_rate = 0.3;  // expected new objects per second
  // A fraction of clips runs at object_rate * dense_rate_multiplier.
  double dense_clip_fraction = 0.0;
  double dense_rate_multiplier = 1.0;
  std::vector<PathSpec> paths;
  double size_min = 28.0;
  double size_max = 44.0;
  double pattern_radius = 48.0;  // half-side of the square entry/exit regions
  std::string category = "car";
  std::uint64_t rng_seed = 1;
};

void validate(const SceneSpec& spec);

// One pattern per path: starts near its first waypoint, ends near its last.
std::vector<SpatialPattern> patterns_for(const SceneSpec& spec);

// Junction-style default scene at the given frame size.
SceneSpec default_scene(int frame_w = 640, int frame_h = 352);

struct Clip {
  std::string id;
  std::vector<Track> tracks;                     // ground truth, id == object id
  std::vector<std::vector<Detection>> frames;    // per-frame ground truth
  std::map<std::string, int> counts;             // pattern id -> count
};

struct SyntheticDataset {
  SceneSpec spec;
  std::string split;
  std::vector<SpatialPattern> patterns;
  std::vector<Clip> clips;

  CountLabels labels() const;
  // Spec seed mixed with the split name; keys all per-split randomness.
  std::uint64_t seed() const;
};

// Rebuilds per-frame lists from tracks. Throws std::invalid_argument when a
// track leaves the clip or the frames disagree.
std::vector<std::vector<Detection>> frames_from_tracks(const std::vector<Track>& tracks,
                                                       int duration);

SyntheticDataset generate(const SceneSpec& spec, const std::string& split = "train");

// Seed used for a split: the scene rng_seed mixed with the split name.
std::uint64_t split_seed(std::uint64_t base, const std::string& split);

// ---------------------------------------------------------------------------
// Cost model

struct NoiseModel {
  bool enabled = true;
  // Miss probability rises as the object's effective (resolution-scaled)
  // size drops below size50; an optional second logistic penalises objects
  // that are too large for the receptive field.
  double size50 = 8.0;
  double slope = 0.8;
  double size_hi50 = std::numeric_limits<double>::infinity();
  double slope_hi = 0.5;
  double base_miss = 0.0;
  double jitter_px = 0.5;             // localisation sigma at native resolution
  double false_positive_rate = 0.0;   // expected spurious boxes per full frame
};

struct Architecture {
  std::string id;
  double window_overhead = 1.0;   // fixed cost per detector invocation
  double full_frame_cost = 40.0;  // pixel cost of a full native frame
  NoiseModel noise;
};

struct ProxyProfile {
  std::string id;
  WindowSize resolution;
  double cost = 1.0;
  double flip_rate = 0.0;
  double spread = 0.0;  // score distance from the 0/1 label, in [0, 0.5)
};

struct DecodeCost {
  double fixed = 1.0;
  double per_full_frame = 1.5;
};

struct SimConfig {
  std::vector<Architecture> architectures;
  std::vector<ProxyProfile> proxies;
  DecodeCost decode;
  double track_cost_per_frame = 0.02;
  double track_cost_per_pair = 0.002;
  double refine_cost_per_track = 0.05;

  const Architecture& architecture(const std::string& id) const;
  const ProxyProfile& proxy(const std::string& id) const;
};

// Two detector architectures and five proxy resolutions.
SimConfig default_sim_config(int frame_w, int frame_h);

// Same config with all detector and proxy noise removed.
SimConfig noiseless(SimConfig config);

// Detector time per window size for one (architecture, input resolution).
class WindowCostTable {
 public:
  WindowCostTable() = default;
  explicit WindowCostTable(std::map<WindowSize, double> table) : table_(std::move(table)) {}

  double at(const WindowSize& size) const;
  bool contains(const WindowSize& size) const { return table_.contains(size); }
  void set(const WindowSize& size, double t) { table_[size] = t; }
  const std::map<WindowSize, double>& entries() const { return table_; }

 private:
  std::map<WindowSize, double> table_;
};

class CostModel {
 public:
  CostModel(SimConfig config, int frame_w, int frame_h);

  // Every multiple-of-32 window up to the frame size.
  WindowCostTable window_costs(const std::string& arch, const WindowSize& resolution) const;
  double window_cost(const std::string& arch, const WindowSize& resolution,
                     const WindowSize& window) const;
  double proxy_time(const std::string& proxy_id) const;
  double decode_time(const WindowSize& resolution) const;

  const SimConfig& config() const { return config_; }
  WindowSize frame() const { return {frame_w_, frame_h_}; }

 private:
  SimConfig config_;
  int frame_w_;
  int frame_h_;
};

class SimulatedDetector {
 public:
  SimulatedDetector(const Architecture& arch, WindowSize resolution, int frame_w, int frame_h);

  double scale() const { return scale_; }
  double miss_rate(double object_size) const;
  double jitter_sigma() const;
  const Architecture& architecture() const { return arch_; }
  WindowSize resolution() const { return resolution_; }
  WindowSize frame() const { return {frame_w_, frame_h_}; }

 private:
  Architecture arch_;
  WindowSize resolution_;
  int frame_w_;
  int frame_h_;
  double scale_;
};

struct DetectResult {
  std::vector<Detection> detections;
  double time = 0.0;
};

// Runs the simulated detector inside the given windows. A ground-truth object
// is visible iff its center lies in some window; noise draws come from a
// stream keyed by (frame_seed, object id) so they do not depend on the plan.
DetectResult detect(const std::vector<Detection>& frame_truth, int frame_index,
                    const std::vector<Rect>& rects, const SimulatedDetector& detector,
                    const WindowCostTable& costs, std::uint64_t frame_seed);

// Per-cell object-presence scores: ground-truth cell labels with
// independent per-cell flips, pushed away from 0/1 by `spread`.
FrameGrid proxy_scores(const std::vector<Detection>& frame_truth, int frame_w, int frame_h,
                       const ProxyProfile& profile, std::uint64_t frame_seed);

// Ground-truth cell labels (1 where some box overlaps the cell).
FrameGrid cell_labels(const std::vector<Detection>& boxes, int frame_w, int frame_h);

// Seed for the noise of one frame of one clip.
std::uint64_t frame_seed(std::uint64_t dataset_seed, int clip_index, int frame);

}  // namespace scopeflow

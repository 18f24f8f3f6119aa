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

#include "scopeflow/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scopeflow/rng.hpp"

namespace scopeflow {

namespace {

// Coordinates are stored on a 1/64 pixel lattice so they survive text
// serialization unchanged.
double quantize(double v) { return std::round(v * 64.0) / 64.0; }

std::string clip_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "clip-%03d", index);
  return buf;
}

}  // namespace

double PathSpec::length() const {
  double total = 0.0;
  for (size_t i = 1; i < waypoints.size(); ++i) total += distance(waypoints[i - 1], waypoints[i]);
  return total;
}

Point2 PathSpec::point_at(double arc) const {
  if (waypoints.empty()) return {};
  double remaining = std::max(0.0, arc);
  for (size_t i = 1; i < waypoints.size(); ++i) {
    const double seg = distance(waypoints[i - 1], waypoints[i]);
    if (remaining <= seg && seg > 0.0) {
      const double t = remaining / seg;
      return {waypoints[i - 1].x + t * (waypoints[i].x - waypoints[i - 1].x),
              waypoints[i - 1].y + t * (waypoints[i].y - waypoints[i - 1].y)};
    }
    remaining -= seg;
  }
  return waypoints.back();
}

Point2 PathSpec::normal_at(double arc) const {
  double remaining = std::max(0.0, arc);
  for (size_t i = 1; i < waypoints.size(); ++i) {
    const double seg = distance(waypoints[i - 1], waypoints[i]);
    if ((remaining <= seg || i + 1 == waypoints.size()) && seg > 0.0) {
      return {-(waypoints[i].y - waypoints[i - 1].y) / seg,
              (waypoints[i].x - waypoints[i - 1].x) / seg};
    }
    remaining -= seg;
  }
  return {0.0, 0.0};
}

void validate(const SceneSpec& spec) {
  if (spec.frame_w <= 0 || spec.frame_h <= 0 || spec.frame_w % kCellSize != 0 ||
      spec.frame_h % kCellSize != 0) {
    throw InvalidSpec("frame dimensions must be positive multiples of 32");
  }
  if (spec.fps <= 0) throw InvalidSpec("fps must be positive");
  if (spec.duration <= 0) throw InvalidSpec("duration must be positive");
  if (spec.clip_count < 0) throw InvalidSpec("clip_count must be non-negative");
  if (!(spec.object_rate >= 0.0)) throw InvalidSpec("object_rate must be non-negative");
  if (spec.dense_clip_fraction < 0.0 || spec.dense_clip_fraction > 1.0) {
    throw InvalidSpec("dense_clip_fraction must lie in [0,1]");
  }
  if (spec.paths.empty()) throw InvalidSpec("path library is empty");
  for (const auto& p : spec.paths) {
    if (p.waypoints.size() < 2) throw InvalidSpec("path '" + p.id + "' needs two waypoints");
    if (p.length() <= 0.0) throw InvalidSpec("path '" + p.id + "' has zero length");
    if (p.speed_min <= 0.0 || p.speed_max < p.speed_min) {
      throw InvalidSpec("path '" + p.id + "' has an invalid speed range");
    }
  }
  if (spec.size_min <= 0.0 || spec.size_max < spec.size_min) {
    throw InvalidSpec("invalid object size range");
  }
}

std::vector<SpatialPattern> patterns_for(const SceneSpec& spec) {
  std::vector<SpatialPattern> out;
  const double r = spec.pattern_radius;
  auto square = [&](const Point2& c) {
    return rectangle_polygon(std::max(0.0, c.x - r), std::max(0.0, c.y - r),
                             std::min<double>(spec.frame_w, c.x + r),
                             std::min<double>(spec.frame_h, c.y + r));
  };
  for (const auto& p : spec.paths) {
    out.push_back({p.id, square(p.waypoints.front()), square(p.waypoints.back())});
  }
  return out;
}

SceneSpec default_scene(int frame_w, int frame_h) {
  SceneSpec spec;
  spec.frame_w = frame_w;
  spec.frame_h = frame_h;
  const double W = frame_w;
  const double H = frame_h;
  const double m = 16.0;
  // Two horizontal lanes, two vertical lanes and two turning movements.
  spec.paths = {
      {"west-east", {{m, 0.60 * H}, {W - m, 0.60 * H}}, 5.0, 7.0, 6.0},
      {"east-west", {{W - m, 0.36 * H}, {m, 0.36 * H}}, 5.0, 7.0, 6.0},
      {"north-south", {{0.40 * W, m}, {0.40 * W, H - m}}, 3.5, 5.0, 6.0},
      {"south-north", {{0.62 * W, H - m}, {0.62 * W, m}}, 3.5, 5.0, 6.0},
      {"west-south", {{m, 0.78 * H}, {0.25 * W, 0.78 * H}, {0.25 * W, H - m}}, 3.0, 4.0, 4.0},
      {"east-north", {{W - m, 0.18 * H}, {0.80 * W, 0.18 * H}, {0.80 * W, m}}, 3.0, 4.0, 4.0},
  };
  return spec;
}

CountLabels SyntheticDataset::labels() const {
  CountLabels out;
  for (const auto& c : clips) out[c.id] = c.counts;
  return out;
}

std::vector<std::vector<Detection>> frames_from_tracks(const std::vector<Track>& tracks,
                                                       int duration) {
  std::vector<std::vector<Detection>> frames(static_cast<size_t>(std::max(duration, 0)));
  for (const auto& t : tracks) {
    for (const auto& d : t.detections) {
      if (d.frame < 0 || d.frame >= duration) {
        throw std::invalid_argument("track " + std::to_string(t.id) + " leaves the clip");
      }
      Detection copy = d;
      copy.object_id = t.id;
      frames[d.frame].push_back(copy);
    }
  }
  for (auto& f : frames) {
    std::sort(f.begin(), f.end(),
              [](const Detection& a, const Detection& b) { return a.object_id < b.object_id; });
  }
  return frames;
}

std::uint64_t split_seed(std::uint64_t base, const std::string& split) {
  return mix_seed(base, hash_string(split));
}

std::uint64_t SyntheticDataset::seed() const { return split_seed(spec.rng_seed, split); }

SyntheticDataset generate(const SceneSpec& spec, const std::string& split) {
  validate(spec);
  SyntheticDataset ds;
  ds.spec = spec;
  ds.split = split;
  ds.patterns = patterns_for(spec);

  for (int ci = 0; ci < spec.clip_count; ++ci) {
    Rng rng(mix_seed(ds.seed(), static_cast<std::uint64_t>(ci)));
    Clip clip;
    clip.id = clip_name(ci);

    const bool dense = uniform01(rng) < spec.dense_clip_fraction;
    const double rate = spec.object_rate * (dense ? spec.dense_rate_multiplier : 1.0);
    const double per_frame = rate / spec.fps;

    int next_id = 0;
    double t = 0.0;
    while (per_frame > 0.0) {
      t += -std::log(1.0 - uniform01(rng)) / per_frame;
      if (t >= spec.duration) break;
      const auto& path = spec.paths[static_cast<size_t>(uniform01(rng) * spec.paths.size())];
      const double speed = path.speed_min + uniform01(rng) * (path.speed_max - path.speed_min);
      const double size = spec.size_min + uniform01(rng) * (spec.size_max - spec.size_min);
      const double aspect = 0.7 + 0.3 * uniform01(rng);
      const double lateral = (2.0 * uniform01(rng) - 1.0) * path.lateral_jitter;

      const int spawn = static_cast<int>(std::ceil(t));
      const int travel = static_cast<int>(std::floor(path.length() / speed));
      // Only objects that complete their route inside the clip are kept, so
      // every ground-truth track starts and ends at its path's endpoints.
      if (spawn + travel >= spec.duration) continue;

      Track track;
      track.id = next_id++;
      track.category = spec.category;
      for (int f = spawn; f <= spawn + travel; ++f) {
        const double arc = speed * (f - spawn);
        const Point2 c = path.point_at(arc);
        const Point2 n = path.normal_at(arc);
        Detection d;
        d.frame = f;
        d.x = c.x + lateral * n.x;
        d.y = c.y + lateral * n.y;
        d.w = size;
        d.h = size * aspect;
        d.category = spec.category;
        d.object_id = track.id;
        if (!clip_to_frame(d, spec.frame_w, spec.frame_h)) continue;
        // Snap the corners so the box stays inside the frame.
        const double l = quantize(d.left()), r = quantize(d.right());
        const double t = quantize(d.top()), b = quantize(d.bottom());
        if (r <= l || b <= t) continue;
        d.x = (l + r) / 2.0;
        d.y = (t + b) / 2.0;
        d.w = r - l;
        d.h = b - t;
        track.detections.push_back(d);
      }
      if (!track.detections.empty()) clip.tracks.push_back(std::move(track));
    }

    clip.frames = frames_from_tracks(clip.tracks, spec.duration);
    clip.counts = predict_counts(clip.tracks, ds.patterns);
    ds.clips.push_back(std::move(clip));
  }
  return ds;
}

// ---------------------------------------------------------------------------

const Architecture& SimConfig::architecture(const std::string& id) const {
  for (const auto& a : architectures) {
    if (a.id == id) return a;
  }
  throw MissingCostEntry("unknown detector architecture '" + id + "'");
}

const ProxyProfile& SimConfig::proxy(const std::string& id) const {
  for (const auto& p : proxies) {
    if (p.id == id) return p;
  }
  throw MissingCostEntry("unknown proxy resolution '" + id + "'");
}

SimConfig default_sim_config(int frame_w, int frame_h) {
  SimConfig cfg;
  Architecture large;
  large.id = "det-large";
  large.window_overhead = 2.0;
  large.full_frame_cost = 60.0;
  large.noise.size50 = 7.0;
  large.noise.slope = 0.9;
  large.noise.base_miss = 0.01;
  large.noise.jitter_px = 0.6;
  large.noise.false_positive_rate = 0.05;

  Architecture small;
  small.id = "det-small";
  small.window_overhead = 0.8;
  small.full_frame_cost = 22.0;
  small.noise.size50 = 11.0;
  small.noise.slope = 0.7;
  small.noise.base_miss = 0.02;
  small.noise.jitter_px = 1.0;
  small.noise.false_positive_rate = 0.1;
  cfg.architectures = {large, small};

  const double frame_area = static_cast<double>(frame_w) * frame_h;
  struct Level {
    double scale;
    double flip;
    double spread;
  };
  const Level levels[] = {
      {1.0 / 2, 0.002, 0.15}, {1.0 / 3, 0.004, 0.25}, {1.0 / 4, 0.008, 0.30},
      {1.0 / 6, 0.016, 0.35}, {1.0 / 8, 0.030, 0.40},
  };
  for (const auto& lv : levels) {
    ProxyProfile p;
    const int w = std::max(kCellSize, static_cast<int>(std::lround(frame_w * lv.scale / 32.0)) * 32);
    const int h = std::max(kCellSize, static_cast<int>(std::lround(frame_h * lv.scale / 32.0)) * 32);
    p.id = "proxy-" + std::to_string(w) + "x" + std::to_string(h);
    p.resolution = {w, h};
    p.cost = 0.3 + 6.0 * (static_cast<double>(w) * h / frame_area);
    p.flip_rate = lv.flip;
    p.spread = lv.spread;
    cfg.proxies.push_back(p);
  }
  cfg.decode = {1.0, 1.5};
  return cfg;
}

SimConfig noiseless(SimConfig config) {
  for (auto& a : config.architectures) a.noise.enabled = false;
  for (auto& p : config.proxies) {
    p.flip_rate = 0.0;
    p.spread = 0.0;
  }
  return config;
}

double WindowCostTable::at(const WindowSize& size) const {
  auto it = table_.find(size);
  if (it == table_.end()) {
    throw MissingCostEntry("no cost entry for window " + std::to_string(size.w) + "x" +
                           std::to_string(size.h));
  }
  return it->second;
}

CostModel::CostModel(SimConfig config, int frame_w, int frame_h)
    : config_(std::move(config)), frame_w_(frame_w), frame_h_(frame_h) {}

double CostModel::window_cost(const std::string& arch, const WindowSize& resolution,
                              const WindowSize& window) const {
  const auto& a = config_.architecture(arch);
  const double frame_area = static_cast<double>(frame_w_) * frame_h_;
  const double res_factor = static_cast<double>(resolution.area()) / frame_area;
  return a.window_overhead + a.full_frame_cost * res_factor * (window.area() / frame_area);
}

WindowCostTable CostModel::window_costs(const std::string& arch,
                                        const WindowSize& resolution) const {
  std::map<WindowSize, double> table;
  for (int w = kCellSize; w <= frame_w_; w += kCellSize) {
    for (int h = kCellSize; h <= frame_h_; h += kCellSize) {
      table[{w, h}] = window_cost(arch, resolution, {w, h});
    }
  }
  return WindowCostTable(std::move(table));
}

double CostModel::proxy_time(const std::string& proxy_id) const {
  return config_.proxy(proxy_id).cost;
}

double CostModel::decode_time(const WindowSize& resolution) const {
  const double frame_area = static_cast<double>(frame_w_) * frame_h_;
  return config_.decode.fixed + config_.decode.per_full_frame * (resolution.area() / frame_area);
}

SimulatedDetector::SimulatedDetector(const Architecture& arch, WindowSize resolution, int frame_w,
                                     int frame_h)
    : arch_(arch), resolution_(resolution), frame_w_(frame_w), frame_h_(frame_h) {
  scale_ = std::sqrt(static_cast<double>(resolution.area()) /
                     (static_cast<double>(frame_w) * frame_h));
}

double SimulatedDetector::miss_rate(double object_size) const {
  const auto& n = arch_.noise;
  if (!n.enabled) return 0.0;
  const double eff = object_size * scale_;
  const double low = 1.0 / (1.0 + std::exp(n.slope * (eff - n.size50)));
  const double high =
      std::isfinite(n.size_hi50) ? 1.0 / (1.0 + std::exp(-n.slope_hi * (eff - n.size_hi50))) : 0.0;
  return std::clamp(1.0 - (1.0 - n.base_miss) * (1.0 - low) * (1.0 - high), 0.0, 1.0);
}

double SimulatedDetector::jitter_sigma() const {
  if (!arch_.noise.enabled) return 0.0;
  return arch_.noise.jitter_px / std::max(scale_, 1e-6);
}

std::uint64_t frame_seed(std::uint64_t dataset_seed, int clip_index, int frame) {
  return mix_seed(mix_seed(dataset_seed, 0x5eedULL + static_cast<std::uint64_t>(clip_index)),
                  static_cast<std::uint64_t>(frame));
}

DetectResult detect(const std::vector<Detection>& frame_truth, int frame_index,
                    const std::vector<Rect>& rects, const SimulatedDetector& detector,
                    const WindowCostTable& costs, std::uint64_t seed) {
  DetectResult out;
  for (const auto& r : rects) out.time += costs.at(r.size());

  const auto& noise = detector.architecture().noise;
  for (const auto& gt : frame_truth) {
    const bool covered = std::any_of(rects.begin(), rects.end(), [&](const Rect& r) {
      return r.contains_point(gt.x, gt.y);
    });
    if (!covered) continue;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(gt.object_id) + 1));
    const double miss = detector.miss_rate(std::sqrt(gt.w * gt.h));
    const double u_miss = uniform01(rng);
    const double u_conf = uniform01(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double jx = normal(rng);
    const double jy = normal(rng);
    const double jw = normal(rng);
    const double jh = normal(rng);
    if (u_miss < miss) continue;

    Detection d = gt;
    d.frame = frame_index;
    if (noise.enabled) {
      const double sigma = detector.jitter_sigma();
      d.x += sigma * jx;
      d.y += sigma * jy;
      d.w = std::max(4.0, d.w + sigma * jw);
      d.h = std::max(4.0, d.h + sigma * jh);
      d.confidence = std::clamp((1.0 - miss) * (0.7 + 0.3 * u_conf), 0.0, 1.0);
    } else {
      d.confidence = 1.0;
    }
    out.detections.push_back(d);
  }

  if (noise.enabled && noise.false_positive_rate > 0.0) {
    for (size_t i = 0; i < rects.size(); ++i) {
      const auto& r = rects[i];
      Rng rng(mix_seed(seed, 0xfa15e000ULL + i));
      const double frac = static_cast<double>(r.w) * r.h / detector.frame().area();
      std::poisson_distribution<int> count(noise.false_positive_rate * frac);
      const int n = count(rng);
      for (int k = 0; k < n; ++k) {
        Detection d;
        d.frame = frame_index;
        d.x = r.x + uniform01(rng) * r.w;
        d.y = r.y + uniform01(rng) * r.h;
        d.w = 32.0;
        d.h = 32.0;
        d.confidence = 0.5 * uniform01(rng);
        d.object_id = -1;
        out.detections.push_back(d);
      }
    }
  }
  return out;
}

FrameGrid cell_labels(const std::vector<Detection>& boxes, int frame_w, int frame_h) {
  FrameGrid grid = FrameGrid::for_frame(frame_w, frame_h);
  for (const auto& b : boxes) {
    for (const auto& c : cells_intersecting(b, grid)) grid.at(c.col, c.row) = 1.0;
  }
  return grid;
}

FrameGrid proxy_scores(const std::vector<Detection>& frame_truth, int frame_w, int frame_h,
                       const ProxyProfile& profile, std::uint64_t seed) {
  FrameGrid grid = cell_labels(frame_truth, frame_w, frame_h);
  if (profile.flip_rate <= 0.0 && profile.spread <= 0.0) return grid;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      Rng rng(mix_seed(seed, 0xce11000000ULL + static_cast<std::uint64_t>(r) * grid.cols + c));
      const double u_flip = uniform01(rng);
      const double u_spread = uniform01(rng);
      double label = grid.at(c, r);
      if (u_flip < profile.flip_rate) label = 1.0 - label;
      const double off = u_spread * profile.spread;
      grid.at(c, r) = label > 0.5 ? 1.0 - off : off;
    }
  }
  return grid;
}

}  // namespace scopeflow

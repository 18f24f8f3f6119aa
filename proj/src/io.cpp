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

#include "scopeflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace scopeflow {

namespace {

constexpr int kFormatVersion = 1;

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidData(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidData(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

void check_format(const Json& j, const char* format) {
  const auto f = field<std::string>(j, "format");
  if (f != format) throw InvalidData("expected a '" + std::string(format) + "' file, got '" + f + "'");
  const int v = field<int>(j, "version");
  if (v != kFormatVersion) throw InvalidData("unsupported " + f + " version " + std::to_string(v));
}

Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }

Point2 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidData("points must be [x, y] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json points_json(const std::vector<Point2>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

std::vector<Point2> points_from(const Json& j) {
  if (!j.is_array()) throw InvalidData("expected a list of points");
  std::vector<Point2> out;
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

Json size_json(const WindowSize& s) { return Json::array({s.w, s.h}); }

WindowSize size_from(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw InvalidData("sizes must be [w, h] integer pairs");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

template <size_t N>
Json array_json(const std::array<double, N>& a) {
  Json out = Json::array();
  for (double v : a) out.push_back(v);
  return out;
}

template <size_t N>
std::array<double, N> array_from(const Json& j, const char* key) {
  const auto v = field<std::vector<double>>(j, key);
  if (v.size() != N) throw InvalidData(std::string("field '") + key + "' has the wrong length");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidData("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FileError("failed writing '" + path + "'");
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

Json to_json(const Detection& d) {
  Json j{{"frame", d.frame}, {"x", d.x}, {"y", d.y}, {"w", d.w}, {"h", d.h}};
  if (d.confidence != 1.0) j["confidence"] = d.confidence;
  if (d.object_id >= 0) j["object_id"] = d.object_id;
  return j;
}

Detection detection_from_json(const Json& j) {
  Detection d;
  d.frame = field<int>(j, "frame");
  d.x = field<double>(j, "x");
  d.y = field<double>(j, "y");
  d.w = field<double>(j, "w");
  d.h = field<double>(j, "h");
  d.confidence = field_or<double>(j, "confidence", 1.0);
  d.object_id = field_or<int>(j, "object_id", -1);
  if (!(d.w > 0.0) || !(d.h > 0.0)) throw InvalidData("detection boxes need positive size");
  if (d.confidence < 0.0 || d.confidence > 1.0) throw InvalidData("confidence outside [0, 1]");
  return d;
}

Json to_json(const Track& t) {
  Json dets = Json::array();
  for (const auto& d : t.detections) dets.push_back(to_json(d));
  return Json{{"id", t.id}, {"category", t.category}, {"detections", std::move(dets)}};
}

Track track_from_json(const Json& j) {
  Track t;
  t.id = field<int>(j, "id");
  t.category = field<std::string>(j, "category");
  const auto dets = field<Json>(j, "detections");
  if (!dets.is_array()) throw InvalidData("track detections must be a list");
  for (const auto& d : dets) {
    Detection det = detection_from_json(d);
    det.category = t.category;
    t.detections.push_back(det);
  }
  try {
    validate_track(t);
  } catch (const std::invalid_argument& e) {
    throw InvalidData(std::string("track ") + std::to_string(t.id) + ": " + e.what());
  }
  return t;
}

Json tracks_to_json(const std::vector<Track>& tracks) {
  Json a = Json::array();
  for (const auto& t : tracks) a.push_back(to_json(t));
  return a;
}

std::vector<Track> tracks_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidData("tracks must be a list");
  std::vector<Track> out;
  for (const auto& t : j) out.push_back(track_from_json(t));
  return out;
}

Json clip_tracks_to_json(const ClipTracks& tracks) {
  Json j = Json::object();
  for (const auto& [clip, ts] : tracks) j[clip] = tracks_to_json(ts);
  return Json{{"format", "scopeflow-tracks"}, {"version", kFormatVersion}, {"clips", j}};
}

ClipTracks clip_tracks_from_json(const Json& j) {
  check_format(j, "scopeflow-tracks");
  ClipTracks out;
  const auto clips = field<Json>(j, "clips");
  if (!clips.is_object()) throw InvalidData("'clips' must map clip ids to track lists");
  for (const auto& [clip, ts] : clips.items()) out[clip] = tracks_from_json(ts);
  return out;
}

// ---------------------------------------------------------------------------

Json to_json(const SceneSpec& s) {
  Json paths = Json::array();
  for (const auto& p : s.paths) {
    paths.push_back(Json{{"id", p.id},
                         {"waypoints", points_json(p.waypoints)},
                         {"speed_min", p.speed_min},
                         {"speed_max", p.speed_max},
                         {"lateral_jitter", p.lateral_jitter}});
  }
  return Json{{"frame_w", s.frame_w},
              {"frame_h", s.frame_h},
              {"fps", s.fps},
              {"duration", s.duration},
              {"clip_count", s.clip_count},
              {"object_rate", s.object_rate},
              {"dense_clip_fraction", s.dense_clip_fraction},
              {"dense_rate_multiplier", s.dense_rate_multiplier},
              {"size_min", s.size_min},
              {"size_max", s.size_max},
              {"pattern_radius", s.pattern_radius},
              {"category", s.category},
              {"rng_seed", s.rng_seed},
              {"paths", std::move(paths)}};
}

SceneSpec scene_spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidData("scene spec must be an object");
  SceneSpec s;
  s.frame_w = field_or<int>(j, "frame_w", s.frame_w);
  s.frame_h = field_or<int>(j, "frame_h", s.frame_h);
  // Paths default to the junction scene at the requested frame size.
  if (j.contains("paths")) {
    s.paths.clear();
    const auto paths = field<Json>(j, "paths");
    if (!paths.is_array()) throw InvalidData("'paths' must be a list");
    for (const auto& pj : paths) {
      PathSpec p;
      p.id = field<std::string>(pj, "id");
      p.waypoints = points_from(field<Json>(pj, "waypoints"));
      p.speed_min = field_or<double>(pj, "speed_min", p.speed_min);
      p.speed_max = field_or<double>(pj, "speed_max", p.speed_max);
      p.lateral_jitter = field_or<double>(pj, "lateral_jitter", p.lateral_jitter);
      s.paths.push_back(p);
    }
  } else {
    s.paths = default_scene(s.frame_w, s.frame_h).paths;
  }
  s.fps = field_or<int>(j, "fps", s.fps);
  s.duration = field_or<int>(j, "duration", s.duration);
  s.clip_count = field_or<int>(j, "clip_count", s.clip_count);
  s.object_rate = field_or<double>(j, "object_rate", s.object_rate);
  s.dense_clip_fraction = field_or<double>(j, "dense_clip_fraction", s.dense_clip_fraction);
  s.dense_rate_multiplier = field_or<double>(j, "dense_rate_multiplier", s.dense_rate_multiplier);
  s.size_min = field_or<double>(j, "size_min", s.size_min);
  s.size_max = field_or<double>(j, "size_max", s.size_max);
  s.pattern_radius = field_or<double>(j, "pattern_radius", s.pattern_radius);
  s.category = field_or<std::string>(j, "category", s.category);
  s.rng_seed = field_or<std::uint64_t>(j, "rng_seed", s.rng_seed);
  return s;
}

Json to_json(const SpatialPattern& p) {
  return Json{{"id", p.id},
              {"start_region", points_json(p.start_region)},
              {"end_region", points_json(p.end_region)}};
}

Json patterns_to_json(const std::vector<SpatialPattern>& patterns) {
  Json a = Json::array();
  for (const auto& p : patterns) a.push_back(to_json(p));
  return a;
}

std::vector<SpatialPattern> patterns_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidData("patterns must be a list");
  std::vector<SpatialPattern> out;
  for (const auto& pj : j) {
    SpatialPattern p{field<std::string>(pj, "id"), points_from(field<Json>(pj, "start_region")),
                     points_from(field<Json>(pj, "end_region"))};
    if (p.start_region.size() < 3 || p.end_region.size() < 3) {
      throw InvalidData("pattern '" + p.id + "' regions need at least three vertices");
    }
    out.push_back(std::move(p));
  }
  return out;
}

Json labels_to_json(const CountLabels& labels) {
  Json j = Json::object();
  for (const auto& [clip, counts] : labels) {
    Json c = Json::object();
    for (const auto& [pattern, n] : counts) c[pattern] = n;
    j[clip] = std::move(c);
  }
  return j;
}

CountLabels labels_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidData("labels must map clip ids to pattern counts");
  CountLabels out;
  for (const auto& [clip, counts] : j.items()) {
    if (!counts.is_object()) throw InvalidData("labels for clip '" + clip + "' must be an object");
    for (const auto& [pattern, n] : counts.items()) {
      if (!n.is_number_integer() || n.get<int>() < 0) {
        throw InvalidData("count for " + clip + "/" + pattern + " must be a non-negative integer");
      }
      out[clip][pattern] = n.get<int>();
    }
  }
  return out;
}

Json to_json(const SyntheticDataset& ds) {
  Json clips = Json::array();
  for (const auto& c : ds.clips) {
    Json frames = Json::array();
    for (const auto& f : c.frames) {
      Json ids = Json::array();
      for (const auto& d : f) ids.push_back(d.object_id);
      frames.push_back(std::move(ids));
    }
    Json counts = Json::object();
    for (const auto& [p, n] : c.counts) counts[p] = n;
    clips.push_back(Json{{"id", c.id},
                         {"tracks", tracks_to_json(c.tracks)},
                         {"frames", std::move(frames)},
                         {"counts", std::move(counts)}});
  }
  return Json{{"format", "scopeflow-dataset"},
              {"version", kFormatVersion},
              {"split", ds.split},
              {"spec", to_json(ds.spec)},
              {"patterns", patterns_to_json(ds.patterns)},
              {"clips", std::move(clips)}};
}

SyntheticDataset dataset_from_json(const Json& j) {
  check_format(j, "scopeflow-dataset");
  SyntheticDataset ds;
  ds.split = field<std::string>(j, "split");
  ds.spec = scene_spec_from_json(field<Json>(j, "spec"));
  ds.patterns = patterns_from_json(field<Json>(j, "patterns"));
  const auto clips = field<Json>(j, "clips");
  if (!clips.is_array()) throw InvalidData("'clips' must be a list");
  for (const auto& cj : clips) {
    Clip c;
    c.id = field<std::string>(cj, "id");
    c.tracks = tracks_from_json(field<Json>(cj, "tracks"));
    for (auto& t : c.tracks) {
      for (auto& d : t.detections) d.object_id = t.id;
    }
    try {
      c.frames = frames_from_tracks(c.tracks, ds.spec.duration);
    } catch (const std::invalid_argument& e) {
      throw InvalidData("clip '" + c.id + "': " + e.what());
    }
    const auto frames = field<Json>(cj, "frames");
    if (!frames.is_array() || frames.size() != c.frames.size()) {
      throw InvalidData("clip '" + c.id + "' frame list does not match its duration");
    }
    for (size_t f = 0; f < c.frames.size(); ++f) {
      std::vector<int> ids;
      for (const auto& d : c.frames[f]) ids.push_back(d.object_id);
      if (frames[f].get<std::vector<int>>() != ids) {
        throw InvalidData("clip '" + c.id + "' frame " + std::to_string(f) +
                          " disagrees with its tracks");
      }
    }
    const Json counts = field<Json>(cj, "counts");
    for (const auto& [p, n] : counts.items()) c.counts[p] = n.get<int>();
    ds.clips.push_back(std::move(c));
  }
  return ds;
}

// ---------------------------------------------------------------------------

Json to_json(const SimConfig& sim) {
  Json archs = Json::array();
  for (const auto& a : sim.architectures) {
    const auto& n = a.noise;
    Json noise{{"enabled", n.enabled},       {"size50", n.size50},
               {"slope", n.slope},           {"slope_hi", n.slope_hi},
               {"base_miss", n.base_miss},   {"jitter_px", n.jitter_px},
               {"false_positive_rate", n.false_positive_rate}};
    if (std::isfinite(n.size_hi50)) noise["size_hi50"] = n.size_hi50;
    archs.push_back(Json{{"id", a.id},
                         {"window_overhead", a.window_overhead},
                         {"full_frame_cost", a.full_frame_cost},
                         {"noise", std::move(noise)}});
  }
  Json proxies = Json::array();
  for (const auto& p : sim.proxies) {
    proxies.push_back(Json{{"id", p.id},
                           {"resolution", size_json(p.resolution)},
                           {"cost", p.cost},
                           {"flip_rate", p.flip_rate},
                           {"spread", p.spread}});
  }
  return Json{{"format", "scopeflow-sim"},
              {"version", kFormatVersion},
              {"architectures", std::move(archs)},
              {"proxies", std::move(proxies)},
              {"decode", {{"fixed", sim.decode.fixed}, {"per_full_frame", sim.decode.per_full_frame}}},
              {"track_cost_per_frame", sim.track_cost_per_frame},
              {"track_cost_per_pair", sim.track_cost_per_pair},
              {"refine_cost_per_track", sim.refine_cost_per_track}};
}

SimConfig sim_config_from_json(const Json& j) {
  check_format(j, "scopeflow-sim");
  SimConfig sim;
  for (const auto& aj : field<Json>(j, "architectures")) {
    Architecture a;
    a.id = field<std::string>(aj, "id");
    a.window_overhead = field<double>(aj, "window_overhead");
    a.full_frame_cost = field<double>(aj, "full_frame_cost");
    const auto nj = field<Json>(aj, "noise");
    a.noise.enabled = field<bool>(nj, "enabled");
    a.noise.size50 = field<double>(nj, "size50");
    a.noise.slope = field<double>(nj, "slope");
    a.noise.size_hi50 =
        field_or<double>(nj, "size_hi50", std::numeric_limits<double>::infinity());
    a.noise.slope_hi = field<double>(nj, "slope_hi");
    a.noise.base_miss = field<double>(nj, "base_miss");
    a.noise.jitter_px = field<double>(nj, "jitter_px");
    a.noise.false_positive_rate = field<double>(nj, "false_positive_rate");
    if (!(a.window_overhead > 0.0) || !(a.full_frame_cost > 0.0)) {
      throw InvalidData("architecture '" + a.id + "' needs positive costs");
    }
    sim.architectures.push_back(a);
  }
  for (const auto& pj : field<Json>(j, "proxies")) {
    ProxyProfile p;
    p.id = field<std::string>(pj, "id");
    p.resolution = size_from(field<Json>(pj, "resolution"));
    p.cost = field<double>(pj, "cost");
    p.flip_rate = field<double>(pj, "flip_rate");
    p.spread = field<double>(pj, "spread");
    if (!(p.cost > 0.0)) throw InvalidData("proxy '" + p.id + "' needs a positive cost");
    sim.proxies.push_back(p);
  }
  const auto dj = field<Json>(j, "decode");
  sim.decode = {field<double>(dj, "fixed"), field<double>(dj, "per_full_frame")};
  sim.track_cost_per_frame = field<double>(j, "track_cost_per_frame");
  sim.track_cost_per_pair = field<double>(j, "track_cost_per_pair");
  sim.refine_cost_per_track = field<double>(j, "refine_cost_per_track");
  if (sim.architectures.empty()) throw InvalidData("simulator config has no architectures");
  return sim;
}

Json to_json(const Configuration& c) {
  return Json{{"id", c.id()},
              {"arch", c.arch},
              {"det_res", size_json(c.det_res)},
              {"conf_threshold", c.conf_threshold},
              {"proxy_enabled", c.proxy_enabled},
              {"proxy_id", c.proxy_id},
              {"b_proxy", c.b_proxy},
              {"gap", c.gap},
              {"tracker", to_string(c.tracker)},
              {"refine", c.refine}};
}

Configuration configuration_from_json(const Json& j) {
  Configuration c;
  c.arch = field<std::string>(j, "arch");
  c.det_res = size_from(field<Json>(j, "det_res"));
  c.conf_threshold = field<double>(j, "conf_threshold");
  c.proxy_enabled = field<bool>(j, "proxy_enabled");
  c.proxy_id = field<std::string>(j, "proxy_id");
  c.b_proxy = field<double>(j, "b_proxy");
  c.gap = field<int>(j, "gap");
  try {
    c.tracker = tracker_kind_from_string(field<std::string>(j, "tracker"));
  } catch (const std::invalid_argument& e) {
    throw InvalidData(e.what());
  }
  c.refine = field<bool>(j, "refine");
  return c;
}

Json to_json(const LogisticScorer& scorer, const TrainReport& report) {
  const auto& w = scorer.weights();
  return Json{{"format", "scopeflow-scorer"},
              {"version", kFormatVersion},
              {"kind", scorer.kind()},
              {"frame", size_json(scorer.frame())},
              {"mean", array_json(w.mean)},
              {"scale", array_json(w.scale)},
              {"weights", array_json(w.weights)},
              {"bias", w.bias},
              {"report",
               {{"train_size", report.train_size},
                {"holdout_size", report.holdout_size},
                {"holdout_accuracy", report.holdout_accuracy},
                {"final_loss", report.epoch_losses.empty() ? 0.0 : report.epoch_losses.back()}}}};
}

LogisticScorer scorer_from_json(const Json& j) {
  check_format(j, "scopeflow-scorer");
  if (field<std::string>(j, "kind") != "learned") throw InvalidData("unknown scorer kind");
  LogisticWeights w;
  w.mean = array_from<kDesignDim>(j, "mean");
  w.scale = array_from<kDesignDim>(j, "scale");
  w.weights = array_from<kDesignDim>(j, "weights");
  w.bias = field<double>(j, "bias");
  for (double s : w.scale) {
    if (!(s > 0.0)) throw InvalidData("scorer scales must be positive");
  }
  return LogisticScorer(w, size_from(field<Json>(j, "frame")));
}

Json to_json(const RefinementModel& m) {
  Json clusters = Json::array();
  for (const auto& c : m.clusters) {
    clusters.push_back(
        Json{{"id", c.id}, {"member_count", c.member_count}, {"center", points_json(c.center)}});
  }
  Json cells = Json::array();
  for (const auto& [cell, ids] : m.index.cells()) {
    cells.push_back(Json{{"col", cell.first}, {"row", cell.second}, {"clusters", ids}});
  }
  return Json{{"format", "scopeflow-refinement"},
              {"version", kFormatVersion},
              {"eps", m.options.eps},
              {"min_pts", m.options.min_pts},
              {"k", m.options.k},
              {"clusters", std::move(clusters)},
              {"index", {{"cell_size", m.index.cell_size()}, {"cells", std::move(cells)}}}};
}

RefinementModel refinement_from_json(const Json& j) {
  check_format(j, "scopeflow-refinement");
  RefinementModel m;
  m.options.eps = field<double>(j, "eps");
  m.options.min_pts = field<int>(j, "min_pts");
  m.options.k = field<int>(j, "k");
  for (const auto& cj : field<Json>(j, "clusters")) {
    TrackCluster c;
    c.id = field<int>(cj, "id");
    c.member_count = field<int>(cj, "member_count");
    c.center = points_from(field<Json>(cj, "center"));
    if (c.id != static_cast<int>(m.clusters.size())) throw InvalidData("cluster ids must be 0..n-1");
    if (c.member_count < 1 || c.center.size() != static_cast<size_t>(kPathPoints)) {
      throw InvalidData("cluster " + std::to_string(c.id) + " is malformed");
    }
    m.clusters.push_back(std::move(c));
  }
  // The index is derived data; rebuild it rather than trusting the file.
  m.index = PathGridIndex(m.clusters, field<Json>(j, "index").value("cell_size", 32.0));
  return m;
}

Json to_json(const WindowSizeSet& sizes) {
  Json a = Json::array();
  for (const auto& s : sizes.sizes()) a.push_back(size_json(s));
  return Json{{"format", "scopeflow-window-sizes"},
              {"version", kFormatVersion},
              {"frame", size_json(sizes.frame())},
              {"sizes", std::move(a)}};
}

WindowSizeSet window_sizes_from_json(const Json& j) {
  check_format(j, "scopeflow-window-sizes");
  std::vector<WindowSize> sizes;
  for (const auto& s : field<Json>(j, "sizes")) sizes.push_back(size_from(s));
  try {
    return WindowSizeSet(sizes, size_from(field<Json>(j, "frame")));
  } catch (const std::invalid_argument& e) {
    throw InvalidData(e.what());
  }
}

Json to_json(const WindowPlan& plan) {
  Json rects = Json::array();
  for (const auto& r : plan.rects) rects.push_back(Json::array({r.x, r.y, r.w, r.h}));
  Json cells = Json::array();
  for (const auto& c : plan.covered_cells) cells.push_back(Json::array({c.col, c.row}));
  return Json{{"rects", std::move(rects)},
              {"covered_cells", std::move(cells)},
              {"full_frame_fallback", plan.fell_back_to_full_frame}};
}

Json to_json(const DetectionCache& cache) {
  Json entries = Json::array();
  for (const auto& e : cache.entries) {
    entries.push_back(Json{{"arch", e.arch},
                           {"res", size_json(e.res)},
                           {"time", e.time},
                           {"accuracy", e.accuracy}});
  }
  return Json{{"format", "scopeflow-detection-cache"},
              {"version", kFormatVersion},
              {"entries", std::move(entries)}};
}

DetectionCache detection_cache_from_json(const Json& j) {
  check_format(j, "scopeflow-detection-cache");
  DetectionCache cache;
  for (const auto& e : field<Json>(j, "entries")) {
    cache.entries.push_back({field<std::string>(e, "arch"), size_from(field<Json>(e, "res")),
                             field<double>(e, "time"), field<double>(e, "accuracy")});
  }
  return cache;
}

Json to_json(const RuntimeBreakdown& r) {
  return Json{{"decode", r.decode}, {"proxy", r.proxy},   {"detect", r.detect},
              {"track", r.track},   {"refine", r.refine}, {"total", r.total()}};
}

Json curve_to_json(const std::vector<CurvePoint>& curve, int trials) {
  Json points = Json::array();
  for (const auto& p : curve) {
    points.push_back(Json{{"id", p.config.id()},
                          {"module", p.module},
                          {"accuracy", p.accuracy},
                          {"runtime", p.runtime},
                          {"config", to_json(p.config)}});
  }
  return Json{{"format", "scopeflow-curve"},
              {"version", kFormatVersion},
              {"trials", trials},
              {"points", std::move(points)}};
}

std::vector<CurvePoint> curve_from_json(const Json& j) {
  check_format(j, "scopeflow-curve");
  std::vector<CurvePoint> out;
  for (const auto& p : field<Json>(j, "points")) {
    out.push_back({configuration_from_json(field<Json>(p, "config")), field<double>(p, "accuracy"),
                   field<double>(p, "runtime"), field<std::string>(p, "module")});
  }
  return out;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "runtime,accuracy,config_id\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,", p.runtime, p.accuracy);
    out << buf << p.config.id() << "\n";
  }
  return out.str();
}

}  // namespace scopeflow

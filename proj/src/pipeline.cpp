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

#include "scopeflow/pipeline.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "scopeflow/parallel.hpp"
#include "scopeflow/rng.hpp"

namespace scopeflow {

std::string to_string(TrackerKind kind) {
  return kind == TrackerKind::kSort ? "sort_heuristic" : "learned";
}

TrackerKind tracker_kind_from_string(const std::string& name) {
  if (name == "sort_heuristic" || name == "sort") return TrackerKind::kSort;
  if (name == "learned") return TrackerKind::kLearned;
  throw std::invalid_argument("unknown tracker kind '" + name + "'");
}

std::string Configuration::id() const {
  char buf[64];
  std::string out = arch + "@" + std::to_string(det_res.w) + "x" + std::to_string(det_res.h);
  std::snprintf(buf, sizeof(buf), "/c%.2f", conf_threshold);
  out += buf;
  if (proxy_enabled) {
    std::snprintf(buf, sizeof(buf), "/%s@%.3f", proxy_id.c_str(), b_proxy);
    out += buf;
  } else {
    out += "/noproxy";
  }
  out += "/g" + std::to_string(gap) + "/" + to_string(tracker);
  if (refine) out += "+refine";
  return out;
}

void validate(const Configuration& c, int max_gap) {
  if (c.arch.empty()) throw std::invalid_argument("configuration has no detector architecture");
  if (c.det_res.w < kCellSize || c.det_res.h < kCellSize || c.det_res.w % kCellSize != 0 ||
      c.det_res.h % kCellSize != 0) {
    throw std::invalid_argument("detector resolution must be a positive multiple of 32");
  }
  if (c.conf_threshold < 0.0 || c.conf_threshold > 1.0) {
    throw std::invalid_argument("confidence threshold must be in [0, 1]");
  }
  if (c.proxy_enabled && (c.b_proxy < 0.0 || c.b_proxy > 1.0)) {
    throw std::invalid_argument("b_proxy must be in [0, 1]");
  }
  if (c.gap < 1 || c.gap > max_gap || (c.gap & (c.gap - 1)) != 0) {
    throw std::invalid_argument("gap must be a power of two no larger than " +
                                std::to_string(max_gap));
  }
}

RuntimeBreakdown& RuntimeBreakdown::operator+=(const RuntimeBreakdown& o) {
  decode += o.decode;
  proxy += o.proxy;
  detect += o.detect;
  track += o.track;
  refine += o.refine;
  return *this;
}

PipelineModels basic_models(const SimConfig& sim, WindowSize frame, int max_gap) {
  return PipelineModels{CostModel(sim, frame.w, frame.h), WindowSizeSet::full_frame_only(frame),
                        std::nullopt, std::nullopt, max_gap};
}

std::uint64_t proxy_seed(std::uint64_t fs, const std::string& proxy_id) {
  return mix_seed(fs, hash_string(proxy_id));
}

ClipOutput run_clip(const SyntheticDataset& ds, int clip_index, const Configuration& config,
                    const PipelineModels& models) {
  validate(config, models.max_gap);
  const Clip& clip = ds.clips.at(static_cast<size_t>(clip_index));
  const CostModel& cm = models.costs;
  const WindowSize frame = cm.frame();
  const SimConfig& sim = cm.config();

  SortScorer sort_scorer;
  const MatchScorer* scorer = &sort_scorer;
  TrackerOptions options = sort_options();
  if (config.tracker == TrackerKind::kLearned) {
    if (!models.scorer) throw MissingModel("configuration needs a trained scorer");
    scorer = &*models.scorer;
    options = TrackerOptions{};
  }
  if (config.refine && !models.refinement) {
    throw MissingModel("configuration needs a refinement model");
  }

  const SimulatedDetector detector(sim.architecture(config.arch), config.det_res, frame.w,
                                   frame.h);
  const WindowCostTable costs = cm.window_costs(config.arch, config.det_res);
  const ProxyProfile* profile = config.proxy_enabled ? &sim.proxy(config.proxy_id) : nullptr;
  const std::vector<Rect> full{{0, 0, frame.w, frame.h}};

  ClipOutput out;
  out.clip_id = clip.id;
  OnlineTracker tracker(*scorer, options);
  const int duration = static_cast<int>(clip.frames.size());
  for (int f = 0; f < duration; f += config.gap) {
    const auto& truth = clip.frames[static_cast<size_t>(f)];
    const std::uint64_t fs = frame_seed(ds.seed(), clip_index, f);
    out.runtime.decode += cm.decode_time(config.det_res);

    std::vector<Rect> rects = full;
    if (profile) {
      out.runtime.proxy += profile->cost;
      const FrameGrid grid =
          proxy_scores(truth, frame.w, frame.h, *profile, proxy_seed(fs, profile->id));
      rects = group_cells(threshold(grid, config.b_proxy), models.sizes, costs).rects;
    }
    DetectResult det = detect(truth, f, rects, detector, costs, fs);
    out.runtime.detect += det.time;

    std::vector<Detection> kept;
    for (auto& d : det.detections) {
      if (d.confidence >= config.conf_threshold) kept.push_back(std::move(d));
    }
    const long pairs = tracker.step(kept, f);
    out.pairs_scored += pairs;
    out.runtime.track += sim.track_cost_per_frame + sim.track_cost_per_pair * pairs;
    ++out.frames_processed;
  }
  out.tracks = tracker.finish();

  if (config.refine) {
    for (auto& t : out.tracks) {
      t = scopeflow::refine(t, *models.refinement, duration).track;
      out.runtime.refine += sim.refine_cost_per_track;
    }
  }
  return out;
}

PipelineResult run_pipeline(const SyntheticDataset& ds, const Configuration& config,
                            const PipelineModels& models, int jobs) {
  PipelineResult result;
  result.clips.resize(ds.clips.size());
  parallel_for(static_cast<int>(ds.clips.size()), jobs,
               [&](int i) { result.clips[static_cast<size_t>(i)] = run_clip(ds, i, config, models); });
  for (const auto& c : result.clips) {
    result.runtime += c.runtime;
    result.predicted[c.clip_id] = predict_counts(c.tracks, ds.patterns);
  }
  result.accuracy = count_accuracy_from_counts(result.predicted, ds.labels());
  return result;
}

double identity_consistency(const std::vector<Track>& truth, const std::vector<Track>& output) {
  // object id -> output tracks containing it; output track -> objects in it.
  std::map<int, std::set<size_t>> tracks_of;
  std::vector<std::set<int>> objects_in(output.size());
  for (size_t i = 0; i < output.size(); ++i) {
    for (const auto& d : output[i].detections) {
      if (d.object_id < 0) continue;
      tracks_of[d.object_id].insert(i);
      objects_in[i].insert(d.object_id);
    }
  }
  int observed = 0;
  int recovered = 0;
  for (const auto& t : truth) {
    auto it = tracks_of.find(t.id);
    if (it == tracks_of.end()) continue;
    ++observed;
    if (it->second.size() == 1 && objects_in[*it->second.begin()].size() == 1) ++recovered;
  }
  return observed == 0 ? 1.0 : static_cast<double>(recovered) / observed;
}

}  // namespace scopeflow

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

// End-to-end execution of one configuration over a dataset.
//
// For every processed frame (0, g, 2g, ...) the pipeline decodes at the
// detector resolution, optionally runs the proxy and plans windows, runs the
// simulated detector inside the windows, drops low-confidence boxes and hands
// the rest to the tracker. Finished tracks are optionally refined. Every step
// charges simulated time to its module.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scopeflow/proxy_windows.hpp"
#include "scopeflow/refinement.hpp"
#include "scopeflow/scene_sim.hpp"
#include "scopeflow/tracker.hpp"

namespace scopeflow {

enum class TrackerKind { kSort, kLearned };

std::string to_string(TrackerKind kind);
// Throws std::invalid_argument for unknown names.
TrackerKind tracker_kind_from_string(const std::string& name);

struct Configuration {
  std::string arch;
  WindowSize det_res;
  double conf_threshold = 0.4;
  bool proxy_enabled = false;
  std::string proxy_id;
  double b_proxy = 0.5;
  int gap = 1;
  TrackerKind tracker = TrackerKind::kSort;
  bool refine = false;

  // Compact, human-readable and unique per parameter assignment.
  std::string id() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Throws std::invalid_argument on out-of-range parameters.
void validate(const Configuration& config, int max_gap);

struct RuntimeBreakdown {
  double decode = 0.0;
  double proxy = 0.0;
  double detect = 0.0;
  double track = 0.0;
  double refine = 0.0;

  double total() const { return decode + proxy + detect + track + refine; }
  RuntimeBreakdown& operator+=(const RuntimeBreakdown& o);
};

struct PipelineModels {
  CostModel costs;
  WindowSizeSet sizes;
  std::optional<LogisticScorer> scorer;
  std::optional<RefinementModel> refinement;
  int max_gap = 16;
};

// Models with only the full-frame window, no scorer and no refinement.
PipelineModels basic_models(const SimConfig& sim, WindowSize frame, int max_gap = 16);

struct ClipOutput {
  std::string clip_id;
  std::vector<Track> tracks;
  RuntimeBreakdown runtime;
  int frames_processed = 0;
  long pairs_scored = 0;
};

struct PipelineResult {
  std::vector<ClipOutput> clips;
  RuntimeBreakdown runtime;
  CountLabels predicted;
  double accuracy = 0.0;
};

class MissingModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seed for proxy noise on one frame, independent of the detector stream.
std::uint64_t proxy_seed(std::uint64_t frame_seed, const std::string& proxy_id);

ClipOutput run_clip(const SyntheticDataset& ds, int clip_index, const Configuration& config,
                    const PipelineModels& models);

// Runs every clip (in parallel when jobs > 1) and scores counts against the
// dataset's labels.
PipelineResult run_pipeline(const SyntheticDataset& ds, const Configuration& config,
                            const PipelineModels& models, int jobs = 1);

// Fraction of ground-truth tracks whose observed detections all ended up in
// one output track that holds no other object's detections. Ground-truth
// tracks never observed are skipped. Returns 1 when nothing was observed.
double identity_consistency(const std::vector<Track>& truth, const std::vector<Track>& output);

}  // namespace scopeflow

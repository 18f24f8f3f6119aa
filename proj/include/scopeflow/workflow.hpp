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

// Glue between the modules: model building from best-accuracy tracks on the
// training split, and the full tune run on the validation split.

#pragma once

#include <vector>

#include "scopeflow/pipeline.hpp"
#include "scopeflow/tuner.hpp"

namespace scopeflow {

struct WorkflowOptions {
  int max_gap = 16;
  int window_k = 3;
  int window_frame_stride = 10;
  int training_examples = 20000;
  int proxy_stride = 8;
  double conf_threshold = 0.4;
  std::uint64_t seed = 1;
  int jobs = 1;
  TrainOptions train;
  RefinementOptions refinement;
  TunerOptions tuner;
};

// Output tracks of one configuration, one list per clip.
std::vector<std::vector<Track>> tracks_by_clip(const SyntheticDataset& ds,
                                               const Configuration& config,
                                               const PipelineModels& models, int jobs);

// Per-frame detections of every `stride`-th frame, rebuilt from tracks.
std::vector<std::vector<Detection>> sampled_frames(const std::vector<std::vector<Track>>& tracks,
                                                   int duration, int stride);

TrainedScorer train_from_tracks(const std::vector<std::vector<Track>>& tracks, WindowSize frame,
                                const WorkflowOptions& options);

RefinementModel refinement_from_tracks(const std::vector<std::vector<Track>>& tracks,
                                       WindowSize frame, const WorkflowOptions& options);

WindowSizeSet window_sizes_from_tracks(const std::vector<std::vector<Track>>& tracks,
                                       const Configuration& theta_best, const CostModel& costs,
                                       int duration, const WorkflowOptions& options);

struct PreparedModels {
  ThetaBestResult theta_best;
  PipelineModels models;
  TrainReport scorer_report;
};

// θ_best on validation, then scorer, refinement index and window sizes from
// θ_best's tracks on the training split.
PreparedModels prepare_models(const SyntheticDataset& train, const SyntheticDataset& validation,
                              const SimConfig& sim, const WorkflowOptions& options);

// θ_best with the learned tracker and refinement switched on.
Configuration tuning_start(const Configuration& theta_best);

struct TuneRun {
  DetectionCache detection_cache;
  TuneResult result;
  int cache_trials = 0;
};

TuneRun run_tuning(const SyntheticDataset& validation, const PreparedModels& prepared,
                   const WorkflowOptions& options);

}  // namespace scopeflow

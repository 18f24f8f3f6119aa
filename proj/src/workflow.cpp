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

#include "scopeflow/workflow.hpp"

#include <map>

#include "scopeflow/parallel.hpp"
#include "scopeflow/rng.hpp"

namespace scopeflow {

std::vector<std::vector<Track>> tracks_by_clip(const SyntheticDataset& ds,
                                               const Configuration& config,
                                               const PipelineModels& models, int jobs) {
  std::vector<std::vector<Track>> out(ds.clips.size());
  parallel_for(static_cast<int>(ds.clips.size()), jobs, [&](int i) {
    out[static_cast<size_t>(i)] = run_clip(ds, i, config, models).tracks;
  });
  return out;
}

std::vector<std::vector<Detection>> sampled_frames(const std::vector<std::vector<Track>>& tracks,
                                                   int duration, int stride) {
  std::vector<std::vector<Detection>> out;
  for (const auto& clip : tracks) {
    std::map<int, std::vector<Detection>> by_frame;
    for (const auto& t : clip) {
      for (const auto& d : t.detections) by_frame[d.frame].push_back(d);
    }
    for (int f = 0; f < duration; f += stride) {
      auto it = by_frame.find(f);
      out.push_back(it == by_frame.end() ? std::vector<Detection>{} : it->second);
    }
  }
  return out;
}

TrainedScorer train_from_tracks(const std::vector<std::vector<Track>>& tracks, WindowSize frame,
                                const WorkflowOptions& options) {
  const GapSequence gaps(options.max_gap);
  const auto examples = sample_training_examples(tracks, gaps, options.training_examples,
                                                 mix_seed(options.seed, 0x7a41));
  return train_scorer(examples, frame, options.train);
}

RefinementModel refinement_from_tracks(const std::vector<std::vector<Track>>& tracks,
                                       WindowSize frame, const WorkflowOptions& options) {
  std::vector<Track> flat;
  for (const auto& clip : tracks) flat.insert(flat.end(), clip.begin(), clip.end());
  return build_refinement(flat, frame, options.refinement);
}

WindowSizeSet window_sizes_from_tracks(const std::vector<std::vector<Track>>& tracks,
                                       const Configuration& theta_best, const CostModel& costs,
                                       int duration, const WorkflowOptions& options) {
  const auto frames = sampled_frames(tracks, duration, options.window_frame_stride);
  const WindowCostTable table = costs.window_costs(theta_best.arch, theta_best.det_res);
  return select_window_sizes(frames, options.window_k, table, costs.frame()).sizes;
}

PreparedModels prepare_models(const SyntheticDataset& train, const SyntheticDataset& validation,
                              const SimConfig& sim, const WorkflowOptions& options) {
  const WindowSize frame{train.spec.frame_w, train.spec.frame_h};
  PipelineModels basic = basic_models(sim, frame, options.max_gap);
  PipelineEvaluator evaluate(validation, basic, options.jobs);
  PreparedModels out{select_theta_best(std::ref(evaluate), sim, frame, options.max_gap,
                                       options.conf_threshold),
                     basic, {}};
  const Configuration& best = out.theta_best.best.config;

  const auto train_tracks = tracks_by_clip(train, best, basic, options.jobs);
  TrainedScorer trained = train_from_tracks(train_tracks, frame, options);
  out.models.scorer = trained.scorer;
  out.scorer_report = trained.report;
  out.models.refinement = refinement_from_tracks(train_tracks, frame, options);
  out.models.sizes =
      window_sizes_from_tracks(train_tracks, best, out.models.costs, train.spec.duration, options);
  return out;
}

Configuration tuning_start(const Configuration& theta_best) {
  Configuration c = theta_best;
  c.tracker = TrackerKind::kLearned;
  c.refine = true;
  return c;
}

TuneRun run_tuning(const SyntheticDataset& validation, const PreparedModels& prepared,
                   const WorkflowOptions& options) {
  const Configuration& best = prepared.theta_best.best.config;
  PipelineEvaluator evaluate(validation, prepared.models, options.jobs);
  TuneRun run;
  run.detection_cache = build_detection_cache(std::ref(evaluate), best,
                                              prepared.models.costs.config(),
                                              prepared.models.costs.frame());
  run.cache_trials = evaluate.calls();
  const ProxyCache proxy_cache =
      build_proxy_cache(validation, best, prepared.models.costs, options.proxy_stride);
  const CandidateSource source(validation, prepared.models, run.detection_cache, proxy_cache,
                               options.tuner);
  PipelineEvaluator tune_eval(validation, prepared.models, options.jobs);
  run.result = tune(tuning_start(best), source, std::ref(tune_eval), options.tuner);
  return run;
}

}  // namespace scopeflow

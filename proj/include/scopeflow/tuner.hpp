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

// Speed-accuracy tuning.
//
// The tuner first finds the best-accuracy configuration by shrinking the
// detector resolution and then the frame rate while accuracy holds. Each
// module then caches what it needs to propose faster settings cheaply, and a
// greedy loop asks every module for a candidate about S faster than the
// current configuration, evaluates the candidates on validation data and
// adopts the most accurate one.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scopeflow/pipeline.hpp"

namespace scopeflow {

struct Evaluation {
  Configuration config;
  double accuracy = 0.0;
  RuntimeBreakdown runtime;

  double total() const { return runtime.total(); }
};

// Runs a configuration on validation data.
using Evaluator = std::function<Evaluation(const Configuration&)>;

// Evaluator over run_pipeline that counts how often it is called.
class PipelineEvaluator {
 public:
  PipelineEvaluator(const SyntheticDataset& ds, const PipelineModels& models, int jobs)
      : ds_(ds), models_(models), jobs_(jobs) {}
  Evaluation operator()(const Configuration& c);
  int calls() const { return calls_; }

 private:
  const SyntheticDataset& ds_;
  const PipelineModels& models_;
  int jobs_;
  int calls_ = 0;
};

// Native size, then 0.85x per dimension (rounded to multiples of 32) until
// a dimension would drop below 64 or the size stops changing.
std::vector<WindowSize> resolution_ladder(WindowSize native);

// n evenly spaced thresholds over [0, 1].
std::vector<double> threshold_ladder(int n = 20);

// Smallest power of two >= g / (1 - S); nullopt once beyond max_gap.
std::optional<int> next_gap(int g, double speedup, int max_gap);

struct ThetaBestResult {
  Evaluation best;
  std::vector<Evaluation> trials;  // in evaluation order
};

// Uses the most expensive architecture, no proxy, the SORT tracker and no
// refinement. Flat accuracy counts as non-decreasing; ties in the kept best
// go to the faster configuration.
ThetaBestResult select_theta_best(const Evaluator& evaluate, const SimConfig& sim,
                                  WindowSize native, int max_gap, double conf_threshold = 0.4);

struct DetectionCacheEntry {
  std::string arch;
  WindowSize res;
  double time = 0.0;
  double accuracy = 0.0;
};

struct DetectionCache {
  std::vector<DetectionCacheEntry> entries;

  // Throws CacheMissing when absent.
  const DetectionCacheEntry& at(const std::string& arch, WindowSize res) const;
};

// θ_best with (arch, res) replaced, for every architecture and ladder size.
DetectionCache build_detection_cache(const Evaluator& evaluate, const Configuration& theta_best,
                                     const SimConfig& sim, WindowSize native);

// Proxy scores at every proxy resolution plus θ_best's detections, for every
// `stride`-th frame of each clip.
ProxyCache build_proxy_cache(const SyntheticDataset& ds, const Configuration& theta_best,
                             const CostModel& costs, int stride);

struct TunerOptions {
  double speedup = 0.30;
  int max_iters = 12;
  int threshold_steps = 20;
  // Candidates whose measured runtime exceeds (1 - S + tolerance) of the
  // current one are discarded.
  double speedup_tolerance = 0.10;
};

// Per-module candidate generation against the caches.
class CandidateSource {
 public:
  CandidateSource(const SyntheticDataset& ds, const PipelineModels& models,
                  const DetectionCache& detection, const ProxyCache& proxy, TunerOptions options);

  std::optional<Configuration> next_detection(const Configuration& c) const;
  std::optional<Configuration> next_proxy(const Configuration& c) const;
  std::optional<Configuration> next_tracking(const Configuration& c) const;

  // Decode + proxy + planned detector time over the dataset, from caches.
  double estimated_runtime(const Configuration& c) const;
  // Proxy + planned detector time over the cached frames.
  RecallRuntime proxy_estimate(const Configuration& c, const std::string& proxy_id,
                               double b_proxy) const;
  // Detector time over the cached frames without a proxy.
  double full_frame_estimate(const Configuration& c) const;

  const TunerOptions& options() const { return options_; }

 private:
  const std::vector<RecallRuntime>& recall_table(const Configuration& c) const;

  const SyntheticDataset& ds_;
  const PipelineModels& models_;
  const DetectionCache& detection_;
  const ProxyCache& proxy_;
  TunerOptions options_;
  long processed_frames_g1_ = 0;
  std::vector<double> thresholds_;
  mutable std::map<std::pair<std::string, WindowSize>, std::vector<RecallRuntime>> recall_memo_;
};

struct CurvePoint {
  Configuration config;
  double accuracy = 0.0;
  double runtime = 0.0;
  std::string module;  // which module produced it ("start" for the first point)
};

struct TuneResult {
  std::vector<CurvePoint> curve;
  int trials = 0;
  int iterations = 0;
};

// Each module steps repeatedly until the cached estimate is at least S below
// the current configuration's, then the candidates are measured.
TuneResult tune(const Configuration& start, const CandidateSource& source,
                const Evaluator& evaluate, const TunerOptions& options);

}  // namespace scopeflow

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

// Reduced-rate multi-object tracking.
//
// The tracker keeps a set of active track prefixes. On every processed frame
// it scores each (prefix, detection) pair, solves the assignment, extends
// matched prefixes and opens a prefix per unmatched detection. Prefixes that
// go unmatched for more than `patience` processed frames are closed. The
// elapsed frame count since a prefix's last detection is part of every score,
// which is what lets one scorer work at any sampling gap.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scopeflow/geometry.hpp"
#include "scopeflow/hungarian.hpp"

namespace scopeflow {

struct TrackPrefix {
  int id = 0;
  std::vector<Detection> detections;
  std::vector<int> t_elapsed;  // t_elapsed[i] = gap before detections[i + 1]
  int misses = 0;

  const Detection& last() const { return detections.back(); }
  // Category comes from the first detection.
  Track to_track() const;
};

TrackPrefix make_prefix(int id, const std::vector<Detection>& detections);

// Gap sequence <1, 2, 4, ..., max_gap>.
class GapSequence {
 public:
  explicit GapSequence(int max_gap);
  const std::vector<int>& gaps() const { return gaps_; }
  int max_gap() const { return gaps_.back(); }
  bool contains(int g) const;

 private:
  std::vector<int> gaps_;
};

struct MatchFeatures {
  double delta_x = 0.0;  // position change / frame size / t_elapsed
  double delta_y = 0.0;
  double resid_x = 0.0;  // constant-velocity extrapolation error / frame size
  double resid_y = 0.0;
  double log_w_ratio = 0.0;
  double log_h_ratio = 0.0;
  double t_elapsed = 0.0;
  double prefix_length = 0.0;
  double resid_over_size = 0.0;  // extrapolation error in object sizes
  double extrapolated_iou = 0.0;
  // Same error using the mean velocity over the last few detections.
  double smoothed_resid_over_size = 0.0;
};

// Single-detection prefixes use zero velocity.
MatchFeatures extract_features(const TrackPrefix& prefix, const Detection& d, int t_elapsed,
                               WindowSize frame);

inline constexpr int kDesignDim = 11;
using DesignVector = std::array<double, kDesignDim>;

// Sign-free transform of the features fed to the logistic scorer.
DesignVector design_vector(const MatchFeatures& f);

class MatchScorer {
 public:
  virtual ~MatchScorer() = default;
  virtual double score(const TrackPrefix& prefix, const Detection& d, int t_elapsed) const = 0;
  virtual std::string kind() const = 0;
};

// IoU between the detection and the prefix's constant-velocity extrapolation.
class SortScorer : public MatchScorer {
 public:
  double score(const TrackPrefix& prefix, const Detection& d, int t_elapsed) const override;
  std::string kind() const override { return "sort_heuristic"; }
};

struct LogisticWeights {
  DesignVector mean{};
  DesignVector scale{};
  DesignVector weights{};
  double bias = 0.0;
};

class LogisticScorer : public MatchScorer {
 public:
  LogisticScorer(LogisticWeights weights, WindowSize frame) : w_(weights), frame_(frame) {}

  double score(const TrackPrefix& prefix, const Detection& d, int t_elapsed) const override;
  double score_design(const DesignVector& x) const;
  std::string kind() const override { return "learned"; }

  const LogisticWeights& weights() const { return w_; }
  WindowSize frame() const { return frame_; }

 private:
  LogisticWeights w_;
  WindowSize frame_;
};

enum class MatchStrategy { kHungarian, kGreedy };

struct TrackerOptions {
  double floor = 0.5;
  int patience = 2;
  MatchStrategy strategy = MatchStrategy::kHungarian;
};

// SORT-style options: greedy IoU matching.
TrackerOptions sort_options();

struct StepOutcome {
  std::vector<TrackPrefix> active;
  std::vector<TrackPrefix> closed;
  long pairs_scored = 0;
};

// One tracking step. `next_id` supplies ids for new prefixes. Throws
// std::invalid_argument if frame_index does not advance past every prefix.
StepOutcome step(std::vector<TrackPrefix> active, const std::vector<Detection>& detections,
                 int frame_index, const MatchScorer& scorer, const TrackerOptions& options,
                 int& next_id);

class OnlineTracker {
 public:
  OnlineTracker(const MatchScorer& scorer, TrackerOptions options)
      : scorer_(scorer), options_(options) {}

  long step(const std::vector<Detection>& detections, int frame_index);
  const std::vector<TrackPrefix>& active() const { return active_; }
  // Closed and still-active prefixes as tracks, ordered by id.
  std::vector<Track> finish() const;

 private:
  const MatchScorer& scorer_;
  TrackerOptions options_;
  std::vector<TrackPrefix> active_;
  std::vector<TrackPrefix> closed_;
  int next_id_ = 0;
};

using FrameSource = std::function<std::vector<Detection>(int frame)>;

struct TrackClipResult {
  std::vector<Track> tracks;
  long pairs_scored = 0;
  int frames_processed = 0;
};

// Processes frames 0, g, 2g, ... below clip_length.
TrackClipResult track_clip(int clip_length, int gap, const FrameSource& source,
                           const MatchScorer& scorer, const TrackerOptions& options);

// ---------------------------------------------------------------------------
// Scorer training

struct TrainingExample {
  std::vector<Detection> prefix;  // gap-subsampled
  Detection candidate;
  int t_elapsed = 1;
  int gap = 1;
  bool label = false;
};

// Greedy subsample starting at the first detection: each kept detection is
// at least `gap` frames after the previous kept one.
std::vector<Detection> subsample(const std::vector<Detection>& detections, int gap);

class DegenerateTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws DegenerateTrainingSet when fewer than two tracks are given or no
// track has two detections.
std::vector<TrainingExample> sample_training_examples(const std::vector<Track>& tracks,
                                                      const GapSequence& gaps, int count,
                                                      std::uint64_t seed);

// Same, over tracks grouped by clip; negatives never cross clips.
std::vector<TrainingExample> sample_training_examples(
    const std::vector<std::vector<Track>>& tracks_by_clip, const GapSequence& gaps, int count,
    std::uint64_t seed);

DesignVector example_design(const TrainingExample& ex, WindowSize frame);

// Mean cross-entropy (plus l2/2 |w|^2) of a logistic model over standardized
// rows, and its gradient. params = [weights..., bias].
struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossAndGradient logistic_loss(const std::vector<double>& params,
                              const std::vector<DesignVector>& rows,
                              const std::vector<int>& labels, double l2);

struct TrainOptions {
  int epochs = 400;
  double holdout_fraction = 0.2;
  double l2 = 1e-4;
  std::uint64_t seed = 7;
};

struct TrainReport {
  std::vector<double> epoch_losses;
  double holdout_accuracy = 0.0;
  int train_size = 0;
  int holdout_size = 0;
};

struct TrainedScorer {
  LogisticScorer scorer;
  TrainReport report;
};

// Full-batch gradient descent with a step size bounded by the loss's
// Lipschitz constant, so the training loss never increases.
TrainedScorer train_scorer(const std::vector<TrainingExample>& examples, WindowSize frame,
                           const TrainOptions& options = {});

}  // namespace scopeflow

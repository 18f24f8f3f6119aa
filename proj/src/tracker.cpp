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

#include "scopeflow/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "scopeflow/rng.hpp"

namespace scopeflow {

namespace {

constexpr int kSmoothingWindow = 5;

struct Velocity {
  double vx = 0.0;
  double vy = 0.0;
};

Velocity last_two_velocity(const std::vector<Detection>& dets) {
  if (dets.size() < 2) return {};
  const auto& a = dets[dets.size() - 2];
  const auto& b = dets.back();
  const double dt = std::max(1, b.frame - a.frame);
  return {(b.x - a.x) / dt, (b.y - a.y) / dt};
}

Velocity smoothed_velocity(const std::vector<Detection>& dets) {
  if (dets.size() < 2) return {};
  const size_t first = dets.size() > kSmoothingWindow ? dets.size() - kSmoothingWindow : 0;
  const auto& a = dets[first];
  const auto& b = dets.back();
  const double dt = std::max(1, b.frame - a.frame);
  return {(b.x - a.x) / dt, (b.y - a.y) / dt};
}

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

}  // namespace

Track TrackPrefix::to_track() const {
  Track t;
  t.id = id;
  t.category = detections.empty() ? "object" : detections.front().category;
  t.detections = detections;
  return t;
}

TrackPrefix make_prefix(int id, const std::vector<Detection>& detections) {
  TrackPrefix p;
  p.id = id;
  p.detections = detections;
  for (size_t i = 1; i < detections.size(); ++i) {
    p.t_elapsed.push_back(detections[i].frame - detections[i - 1].frame);
  }
  return p;
}

GapSequence::GapSequence(int max_gap) {
  if (max_gap < 1 || (max_gap & (max_gap - 1)) != 0) {
    throw std::invalid_argument("max gap must be a power of two");
  }
  for (int g = 1; g <= max_gap; g *= 2) gaps_.push_back(g);
}

bool GapSequence::contains(int g) const {
  return std::find(gaps_.begin(), gaps_.end(), g) != gaps_.end();
}

MatchFeatures extract_features(const TrackPrefix& prefix, const Detection& d, int t_elapsed,
                               WindowSize frame) {
  MatchFeatures f;
  const Detection& last = prefix.last();
  const double t = std::max(1, t_elapsed);
  const double fw = frame.w;
  const double fh = frame.h;

  const Velocity v = last_two_velocity(prefix.detections);
  const double px = last.x + v.vx * t;
  const double py = last.y + v.vy * t;

  f.delta_x = (d.x - last.x) / fw / t;
  f.delta_y = (d.y - last.y) / fh / t;
  f.resid_x = (d.x - px) / fw;
  f.resid_y = (d.y - py) / fh;
  f.log_w_ratio = std::log(d.w / last.w);
  f.log_h_ratio = std::log(d.h / last.h);
  f.t_elapsed = t_elapsed;
  f.prefix_length = static_cast<double>(prefix.detections.size());

  const double size = std::sqrt(last.w * last.h);
  f.resid_over_size = std::hypot(d.x - px, d.y - py) / size;
  Detection moved = last;
  moved.x = px;
  moved.y = py;
  f.extrapolated_iou = iou(moved, d);

  const Velocity sv = smoothed_velocity(prefix.detections);
  f.smoothed_resid_over_size =
      std::hypot(d.x - (last.x + sv.vx * t), d.y - (last.y + sv.vy * t)) / size;
  return f;
}

DesignVector design_vector(const MatchFeatures& f) {
  const double r = std::min(f.resid_over_size, 10.0);
  return {r,
          r * r,
          std::abs(f.resid_x),
          std::abs(f.resid_y),
          std::hypot(f.delta_x, f.delta_y),
          std::abs(f.log_w_ratio),
          std::abs(f.log_h_ratio),
          f.t_elapsed / 32.0,
          std::min(f.prefix_length, 16.0) / 16.0,
          f.extrapolated_iou,
          std::min(f.smoothed_resid_over_size, 10.0)};
}

double SortScorer::score(const TrackPrefix& prefix, const Detection& d, int t_elapsed) const {
  const Velocity v = last_two_velocity(prefix.detections);
  Detection moved = prefix.last();
  moved.x += v.vx * t_elapsed;
  moved.y += v.vy * t_elapsed;
  return iou(moved, d);
}

double LogisticScorer::score_design(const DesignVector& x) const {
  double s = w_.bias;
  for (int i = 0; i < kDesignDim; ++i) s += w_.weights[i] * (x[i] - w_.mean[i]) / w_.scale[i];
  return sigmoid(s);
}

double LogisticScorer::score(const TrackPrefix& prefix, const Detection& d, int t_elapsed) const {
  return score_design(design_vector(extract_features(prefix, d, t_elapsed, frame_)));
}

TrackerOptions sort_options() {
  TrackerOptions o;
  o.floor = 0.3;
  o.patience = 2;
  o.strategy = MatchStrategy::kGreedy;
  return o;
}

StepOutcome step(std::vector<TrackPrefix> active, const std::vector<Detection>& detections,
                 int frame_index, const MatchScorer& scorer, const TrackerOptions& options,
                 int& next_id) {
  for (const auto& p : active) {
    if (p.last().frame >= frame_index) {
      throw std::invalid_argument("tracking step does not advance past prefix " +
                                  std::to_string(p.id));
    }
  }
  const int n = static_cast<int>(active.size());
  const int m = static_cast<int>(detections.size());
  ScoreMatrix scores(n, m);
  for (int i = 0; i < n; ++i) {
    const int t = frame_index - active[i].last().frame;
    for (int j = 0; j < m; ++j) scores(i, j) = scorer.score(active[i], detections[j], t);
  }
  const Matching match = options.strategy == MatchStrategy::kHungarian
                              ? hungarian(scores, options.floor)
                              : greedy_match(scores, options.floor);

  StepOutcome out;
  out.pairs_scored = static_cast<long>(n) * m;
  for (const auto& [i, j] : match.pairs) {
    auto& p = active[i];
    Detection d = detections[j];
    d.frame = frame_index;
    p.t_elapsed.push_back(frame_index - p.last().frame);
    p.detections.push_back(d);
    p.misses = 0;
  }
  for (int i : match.unmatched_rows) ++active[i].misses;
  for (auto& p : active) {
    if (p.misses > options.patience) {
      out.closed.push_back(std::move(p));
    } else {
      out.active.push_back(std::move(p));
    }
  }
  for (int j : match.unmatched_cols) {
    Detection d = detections[j];
    d.frame = frame_index;
    out.active.push_back(make_prefix(next_id++, {d}));
  }
  return out;
}

long OnlineTracker::step(const std::vector<Detection>& detections, int frame_index) {
  StepOutcome o =
      scopeflow::step(std::move(active_), detections, frame_index, scorer_, options_, next_id_);
  active_ = std::move(o.active);
  for (auto& c : o.closed) closed_.push_back(std::move(c));
  return o.pairs_scored;
}

std::vector<Track> OnlineTracker::finish() const {
  std::vector<Track> out;
  out.reserve(closed_.size() + active_.size());
  for (const auto& p : closed_) out.push_back(p.to_track());
  for (const auto& p : active_) out.push_back(p.to_track());
  std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  return out;
}

TrackClipResult track_clip(int clip_length, int gap, const FrameSource& source,
                           const MatchScorer& scorer, const TrackerOptions& options) {
  if (gap < 1) throw std::invalid_argument("sampling gap must be >= 1");
  TrackClipResult out;
  OnlineTracker tracker(scorer, options);
  for (int f = 0; f < clip_length; f += gap) {
    out.pairs_scored += tracker.step(source(f), f);
    ++out.frames_processed;
  }
  out.tracks = tracker.finish();
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Detection> subsample(const std::vector<Detection>& detections, int gap) {
  std::vector<Detection> out;
  for (const auto& d : detections) {
    if (out.empty() || d.frame - out.back().frame >= gap) out.push_back(d);
  }
  return out;
}

std::vector<TrainingExample> sample_training_examples(const std::vector<Track>& tracks,
                                                      const GapSequence& gaps, int count,
                                                      std::uint64_t seed) {
  return sample_training_examples(std::vector<std::vector<Track>>{tracks}, gaps, count, seed);
}

std::vector<TrainingExample> sample_training_examples(
    const std::vector<std::vector<Track>>& tracks_by_clip, const GapSequence& gaps, int count,
    std::uint64_t seed) {
  // Flatten with a clip tag; frames are only comparable within a clip.
  std::vector<Track> tracks;
  std::vector<size_t> clip_of;
  for (size_t c = 0; c < tracks_by_clip.size(); ++c) {
    for (const auto& t : tracks_by_clip[c]) {
      tracks.push_back(t);
      clip_of.push_back(c);
    }
  }
  if (tracks.size() < 2) {
    throw DegenerateTrainingSet("need at least two tracks to form negative examples");
  }
  if (count <= 0) throw std::invalid_argument("example count must be positive");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].detections.size() >= 2) eligible.push_back(i);
  }
  if (eligible.empty()) throw DegenerateTrainingSet("no track has two detections");

  // (clip, frame) -> (track index, detection index)
  std::map<std::pair<size_t, int>, std::vector<std::pair<size_t, size_t>>> by_frame;
  for (size_t ti = 0; ti < tracks.size(); ++ti) {
    for (size_t di = 0; di < tracks[ti].detections.size(); ++di) {
      by_frame[{clip_of[ti], tracks[ti].detections[di].frame}].emplace_back(ti, di);
    }
  }

  Rng rng(seed);
  auto pick = [&](size_t n) { return static_cast<size_t>(uniform01(rng) * n); };

  std::vector<TrainingExample> out;
  out.reserve(static_cast<size_t>(count));
  long attempts = 0;
  const long max_attempts = 100L * count + 1000;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > max_attempts) {
      throw DegenerateTrainingSet("could not draw enough examples from the given tracks");
    }
    const size_t ti = eligible[pick(eligible.size())];
    const int g = gaps.gaps()[pick(gaps.gaps().size())];
    const auto sub = subsample(tracks[ti].detections, g);
    if (sub.size() < 2) continue;
    const size_t cut = 1 + pick(sub.size() - 1);

    TrainingExample ex;
    ex.gap = g;
    ex.prefix.assign(sub.begin(), sub.begin() + static_cast<std::ptrdiff_t>(cut));
    const Detection& positive = sub[cut];
    ex.label = uniform01(rng) < 0.5;
    if (ex.label) {
      ex.candidate = positive;
    } else {
      // Another track's detection from the same frame window.
      const int lo = ex.prefix.back().frame + 1;
      const int hi = positive.frame + g;
      const size_t clip = clip_of[ti];
      std::vector<const Detection*> pool;
      if (auto it = by_frame.find({clip, positive.frame}); it != by_frame.end()) {
        for (const auto& [oti, odi] : it->second) {
          if (oti != ti) pool.push_back(&tracks[oti].detections[odi]);
        }
      }
      if (pool.empty()) {
        for (auto it = by_frame.lower_bound({clip, lo});
             it != by_frame.end() && it->first <= std::make_pair(clip, hi); ++it) {
          for (const auto& [oti, odi] : it->second) {
            if (oti != ti) pool.push_back(&tracks[oti].detections[odi]);
          }
        }
      }
      if (!pool.empty()) {
        ex.candidate = *pool[pick(pool.size())];
      } else {
        const double angle = 2.0 * M_PI * uniform01(rng);
        const double dist = (2.0 + 3.0 * uniform01(rng)) * std::sqrt(positive.w * positive.h);
        ex.candidate = positive;
        ex.candidate.x += dist * std::cos(angle);
        ex.candidate.y += dist * std::sin(angle);
      }
    }
    ex.t_elapsed = ex.candidate.frame - ex.prefix.back().frame;
    if (ex.t_elapsed <= 0) continue;
    out.push_back(std::move(ex));
  }
  return out;
}

DesignVector example_design(const TrainingExample& ex, WindowSize frame) {
  return design_vector(extract_features(make_prefix(0, ex.prefix), ex.candidate, ex.t_elapsed,
                                        frame));
}

LossAndGradient logistic_loss(const std::vector<double>& params,
                              const std::vector<DesignVector>& rows,
                              const std::vector<int>& labels, double l2) {
  LossAndGradient out;
  out.gradient.assign(kDesignDim + 1, 0.0);
  const double n = static_cast<double>(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    double s = params[kDesignDim];
    for (int i = 0; i < kDesignDim; ++i) s += params[i] * rows[r][i];
    out.loss += softplus(s) - labels[r] * s;
    const double err = sigmoid(s) - labels[r];
    for (int i = 0; i < kDesignDim; ++i) out.gradient[i] += err * rows[r][i];
    out.gradient[kDesignDim] += err;
  }
  out.loss /= n;
  for (auto& g : out.gradient) g /= n;
  for (int i = 0; i < kDesignDim; ++i) {
    out.loss += 0.5 * l2 * params[i] * params[i];
    out.gradient[i] += l2 * params[i];
  }
  return out;
}

TrainedScorer train_scorer(const std::vector<TrainingExample>& examples, WindowSize frame,
                           const TrainOptions& options) {
  if (examples.empty()) throw DegenerateTrainingSet("no training examples");
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const size_t holdout = static_cast<size_t>(
      std::floor(options.holdout_fraction * static_cast<double>(examples.size())));
  const size_t train_n = examples.size() - holdout;

  std::vector<DesignVector> rows;
  std::vector<int> labels;
  for (size_t k = 0; k < train_n; ++k) {
    rows.push_back(example_design(examples[order[k]], frame));
    labels.push_back(examples[order[k]].label ? 1 : 0);
  }
  const int positives = std::accumulate(labels.begin(), labels.end(), 0);
  if (positives == 0 || positives == static_cast<int>(labels.size())) {
    throw DegenerateTrainingSet("training examples carry a single label");
  }

  LogisticWeights w;
  for (int i = 0; i < kDesignDim; ++i) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[i];
    mean /= static_cast<double>(rows.size());
    double var = 0.0;
    for (const auto& r : rows) var += (r[i] - mean) * (r[i] - mean);
    var /= static_cast<double>(rows.size());
    w.mean[i] = mean;
    w.scale[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  double trace = 1.0;
  for (auto& r : rows) {
    for (int i = 0; i < kDesignDim; ++i) {
      r[i] = (r[i] - w.mean[i]) / w.scale[i];
      trace += r[i] * r[i] / static_cast<double>(rows.size());
    }
  }
  const double lipschitz = 0.25 * trace + options.l2;
  const double lr = 1.0 / lipschitz;

  std::vector<double> params(kDesignDim + 1, 0.0);
  TrainReport report;
  for (int e = 0; e < options.epochs; ++e) {
    const auto lg = logistic_loss(params, rows, labels, options.l2);
    report.epoch_losses.push_back(lg.loss);
    for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * lg.gradient[i];
  }
  report.epoch_losses.push_back(logistic_loss(params, rows, labels, options.l2).loss);

  for (int i = 0; i < kDesignDim; ++i) w.weights[i] = params[i];
  w.bias = params[kDesignDim];
  LogisticScorer scorer(w, frame);

  // Held-out accuracy; fall back to training accuracy without a holdout.
  const size_t eval_begin = holdout > 0 ? train_n : 0;
  const size_t eval_end = holdout > 0 ? examples.size() : train_n;
  int correct = 0;
  for (size_t k = eval_begin; k < eval_end; ++k) {
    const auto& ex = examples[order[k]];
    const bool predicted = scorer.score_design(example_design(ex, frame)) >= 0.5;
    if (predicted == ex.label) ++correct;
  }
  report.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(eval_end - eval_begin);
  report.train_size = static_cast<int>(train_n);
  report.holdout_size = static_cast<int>(holdout);
  return {scorer, report};
}

}  // namespace scopeflow

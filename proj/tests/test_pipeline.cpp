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

#include <gtest/gtest.h>

#include <set>

#include "scopeflow/pipeline.hpp"
#include "scopeflow/workflow.hpp"
#include "test_util.hpp"

namespace scopeflow {
namespace {

using testing::line_track;

const WindowSize kFrame{640, 352};

SyntheticDataset small_dataset(const std::string& split, int clips = 6) {
  SceneSpec spec = default_scene();
  spec.clip_count = clips;
  spec.duration = 150;
  return generate(spec, split);
}

Configuration full_rate(const std::string& arch = "det-large") {
  Configuration c;
  c.arch = arch;
  c.det_res = kFrame;
  return c;
}

// Scorer and refinement model fit on ground-truth tracks of a training split.
PipelineModels trained_models(const SimConfig& sim) {
  const SyntheticDataset train = small_dataset("train");
  std::vector<std::vector<Track>> tracks;
  for (const auto& c : train.clips) tracks.push_back(c.tracks);
  WorkflowOptions o;
  o.training_examples = 3000;
  PipelineModels m = basic_models(sim, kFrame);
  m.scorer = train_from_tracks(tracks, kFrame, o).scorer;
  m.refinement = refinement_from_tracks(tracks, kFrame, o);
  return m;
}

TEST(Configuration, IdIsUniquePerParameter) {
  std::set<std::string> ids;
  Configuration base = full_rate();
  ids.insert(base.id());
  Configuration c = base;
  c.arch = "det-small";
  ids.insert(c.id());
  c = base;
  c.det_res = {544, 288};
  ids.insert(c.id());
  c = base;
  c.conf_threshold = 0.5;
  ids.insert(c.id());
  c = base;
  c.proxy_enabled = true;
  c.proxy_id = "proxy-64x64";
  ids.insert(c.id());
  c.b_proxy = 0.25;
  ids.insert(c.id());
  c = base;
  c.gap = 4;
  ids.insert(c.id());
  c = base;
  c.tracker = TrackerKind::kLearned;
  ids.insert(c.id());
  c.refine = true;
  ids.insert(c.id());
  EXPECT_EQ(ids.size(), 9u);
  EXPECT_EQ(base.id(), "det-large@640x352/c0.40/noproxy/g1/sort_heuristic");
}

TEST(Configuration, Validate) {
  EXPECT_NO_THROW(validate(full_rate(), 16));
  Configuration c = full_rate();
  c.gap = 3;
  EXPECT_THROW(validate(c, 16), std::invalid_argument);
  c.gap = 32;
  EXPECT_THROW(validate(c, 16), std::invalid_argument);
  c = full_rate();
  c.det_res = {100, 352};
  EXPECT_THROW(validate(c, 16), std::invalid_argument);
  c = full_rate();
  c.arch.clear();
  EXPECT_THROW(validate(c, 16), std::invalid_argument);
  c = full_rate();
  c.conf_threshold = 1.5;
  EXPECT_THROW(validate(c, 16), std::invalid_argument);
  c = full_rate();
  c.proxy_enabled = true;
  c.b_proxy = -0.1;
  EXPECT_THROW(validate(c, 16), std::invalid_argument);
}

TEST(TrackerKind, RoundTrip) {
  for (TrackerKind k : {TrackerKind::kSort, TrackerKind::kLearned}) {
    EXPECT_EQ(tracker_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(tracker_kind_from_string("kalman"), std::invalid_argument);
}

TEST(RunPipeline, MissingModels) {
  const SyntheticDataset ds = small_dataset("validation", 1);
  const PipelineModels basic = basic_models(default_sim_config(640, 352), kFrame);
  Configuration c = full_rate();
  c.tracker = TrackerKind::kLearned;
  EXPECT_THROW(run_pipeline(ds, c, basic), MissingModel);
  c = full_rate();
  c.refine = true;
  EXPECT_THROW(run_pipeline(ds, c, basic), MissingModel);
}

TEST(RunPipeline, NoiselessFullRateIsExact) {
  const SyntheticDataset ds = small_dataset("validation");
  const SimConfig sim = noiseless(default_sim_config(640, 352));
  const PipelineResult r = run_pipeline(ds, full_rate(), basic_models(sim, kFrame));
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  for (size_t i = 0; i < ds.clips.size(); ++i) {
    EXPECT_DOUBLE_EQ(identity_consistency(ds.clips[i].tracks, r.clips[i].tracks), 1.0);
  }
}

TEST(RunPipeline, RuntimeMatchesCostModel) {
  const SyntheticDataset ds = small_dataset("validation");
  const SimConfig sim = default_sim_config(640, 352);
  const PipelineModels models = trained_models(sim);
  Configuration c = full_rate("det-small");
  c.det_res = {448, 256};
  c.proxy_enabled = true;
  c.proxy_id = sim.proxies[1].id;
  c.b_proxy = 0.5;
  c.gap = 2;
  c.tracker = TrackerKind::kLearned;
  c.refine = true;
  const PipelineResult r = run_pipeline(ds, c, models);
  RuntimeBreakdown sum;
  for (size_t i = 0; i < r.clips.size(); ++i) {
    const ClipOutput& o = r.clips[i];
    EXPECT_EQ(o.frames_processed, (static_cast<int>(ds.clips[i].frames.size()) + 1) / 2);
    EXPECT_NEAR(o.runtime.decode, o.frames_processed * models.costs.decode_time(c.det_res), 1e-9);
    EXPECT_NEAR(o.runtime.proxy, o.frames_processed * sim.proxies[1].cost, 1e-9);
    EXPECT_NEAR(o.runtime.track,
                o.frames_processed * sim.track_cost_per_frame +
                    static_cast<double>(o.pairs_scored) * sim.track_cost_per_pair,
                1e-9);
    EXPECT_NEAR(o.runtime.refine, static_cast<double>(o.tracks.size()) * sim.refine_cost_per_track,
                1e-9);
    sum += o.runtime;
  }
  EXPECT_NEAR(r.runtime.total(), sum.total(), 1e-9);
  EXPECT_NEAR(r.runtime.total(),
              r.runtime.decode + r.runtime.proxy + r.runtime.detect + r.runtime.track +
                  r.runtime.refine,
              1e-9);
}

TEST(RunPipeline, AllCellsPositiveMatchesNoProxy) {
  // Every cell of a spread proxy scores above zero, so the plan covers the
  // whole frame and the noiseless detector sees exactly what it sees without
  // a proxy. Only the charged time differs.
  const SyntheticDataset ds = small_dataset("validation", 3);
  SimConfig sim = noiseless(default_sim_config(640, 352));
  sim.proxies[0].spread = 0.3;
  const PipelineModels models = basic_models(sim, kFrame);
  const Configuration off = full_rate();
  Configuration on = off;
  on.proxy_enabled = true;
  on.proxy_id = sim.proxies[0].id;
  on.b_proxy = 0.0;
  const PipelineResult a = run_pipeline(ds, off, models);
  const PipelineResult b = run_pipeline(ds, on, models);
  for (size_t i = 0; i < a.clips.size(); ++i) {
    ASSERT_EQ(a.clips[i].tracks.size(), b.clips[i].tracks.size());
    for (size_t t = 0; t < a.clips[i].tracks.size(); ++t) {
      const auto& x = a.clips[i].tracks[t].detections;
      const auto& y = b.clips[i].tracks[t].detections;
      ASSERT_EQ(x.size(), y.size());
      for (size_t k = 0; k < x.size(); ++k) {
        EXPECT_EQ(x[k].frame, y[k].frame);
        EXPECT_EQ(x[k].x, y[k].x);
        EXPECT_EQ(x[k].y, y[k].y);
        EXPECT_EQ(x[k].w, y[k].w);
        EXPECT_EQ(x[k].h, y[k].h);
      }
    }
  }
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_NE(a.runtime.total(), b.runtime.total());
  EXPECT_GT(b.runtime.proxy, 0.0);
  EXPECT_EQ(a.runtime.proxy, 0.0);
}

TEST(RunPipeline, JobsDoNotChangeResults) {
  const SyntheticDataset ds = small_dataset("validation");
  const SimConfig sim = default_sim_config(640, 352);
  const PipelineModels models = trained_models(sim);
  Configuration c = full_rate();
  c.gap = 4;
  c.tracker = TrackerKind::kLearned;
  c.refine = true;
  const PipelineResult a = run_pipeline(ds, c, models, 1);
  const PipelineResult b = run_pipeline(ds, c, models, 4);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.runtime.total(), b.runtime.total());
  EXPECT_EQ(a.predicted, b.predicted);
}

TEST(IdentityConsistency, Cases) {
  auto tagged = [](Track t, int object) {
    for (auto& d : t.detections) d.object_id = object;
    return t;
  };
  const Track a = tagged(line_track({0, 0}, {100, 0}, 10, 0, 0), 0);
  const Track b = tagged(line_track({0, 50}, {100, 50}, 10, 1, 0), 1);
  EXPECT_DOUBLE_EQ(identity_consistency({a, b}, {a, b}), 1.0);
  EXPECT_DOUBLE_EQ(identity_consistency({a, b}, {}), 1.0);
  // a is split in two; b is intact.
  Track a1 = a, a2 = a;
  a1.detections.resize(5);
  a2.detections.erase(a2.detections.begin(), a2.detections.begin() + 5);
  EXPECT_DOUBLE_EQ(identity_consistency({a, b}, {a1, a2, b}), 0.5);
  // A merged track counts against both objects.
  Track merged = a;
  merged.detections.insert(merged.detections.end(), b.detections.begin(), b.detections.end());
  EXPECT_DOUBLE_EQ(identity_consistency({a, b}, {merged}), 0.0);
}

}  // namespace
}  // namespace scopeflow

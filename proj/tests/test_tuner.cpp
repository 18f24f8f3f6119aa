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

#include <algorithm>
#include <cmath>

#include "scopeflow/tuner.hpp"
#include "scopeflow/workflow.hpp"
#include "test_util.hpp"

namespace scopeflow {
namespace {

const WindowSize kFrame{640, 352};

TEST(ResolutionLadder, ShrinksByFifteenPercent) {
  const auto ladder = resolution_ladder(kFrame);
  ASSERT_GE(ladder.size(), 4u);
  EXPECT_EQ(ladder[0], kFrame);
  EXPECT_EQ(ladder[1], (WindowSize{544, 288}));
  for (size_t i = 1; i < ladder.size(); ++i) {
    EXPECT_EQ(ladder[i].w % 32, 0);
    EXPECT_EQ(ladder[i].h % 32, 0);
    EXPECT_GE(ladder[i].w, 64);
    EXPECT_GE(ladder[i].h, 64);
    EXPECT_LT(ladder[i].area(), ladder[i - 1].area());
    // Each step is the previous size scaled by 0.85 and rounded to 32.
    EXPECT_EQ(ladder[i].w, static_cast<int>(std::lround(ladder[i - 1].w * 0.85 / 32)) * 32);
    EXPECT_EQ(ladder[i].h, static_cast<int>(std::lround(ladder[i - 1].h * 0.85 / 32)) * 32);
  }
}

TEST(ThresholdLadder, EvenlySpaced) {
  const auto t = threshold_ladder(20);
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 1.0);
  for (size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] - t[i - 1], 1.0 / 19.0, 1e-12);
}

TEST(NextGap, Formula) {
  EXPECT_EQ(next_gap(1, 0.3, 16), 2);
  EXPECT_EQ(next_gap(2, 0.3, 16), 4);
  EXPECT_EQ(next_gap(4, 0.3, 16), 8);
  EXPECT_EQ(next_gap(4, 0.6, 32), 16);
  EXPECT_EQ(next_gap(16, 0.3, 16), std::nullopt);
  EXPECT_EQ(next_gap(8, 0.3, 8), std::nullopt);
}

// Evaluator over a closed-form accuracy surface; runtime is proportional to
// processed pixels.
Evaluator surface(std::function<double(WindowSize, int)> acc, int* calls = nullptr) {
  return [acc, calls](const Configuration& c) {
    if (calls) ++*calls;
    Evaluation e;
    e.config = c;
    e.accuracy = acc(c.det_res, c.gap);
    e.runtime.detect = static_cast<double>(c.det_res.area()) / c.gap;
    return e;
  };
}

TEST(SelectThetaBest, FlatAccuracyKeepsShrinking) {
  const SimConfig sim = default_sim_config(640, 352);
  const auto ladder = resolution_ladder(kFrame);
  const ThetaBestResult r =
      select_theta_best(surface([](WindowSize, int) { return 0.9; }), sim, kFrame, 16);
  // Every ladder size and every gap gets tried; ties go to the faster setting.
  EXPECT_EQ(r.trials.size(), ladder.size() + 4);
  EXPECT_EQ(r.best.config.det_res, ladder.back());
  EXPECT_EQ(r.best.config.gap, 16);
  EXPECT_EQ(r.best.config.arch, "det-large");
  EXPECT_FALSE(r.best.config.proxy_enabled);
  EXPECT_EQ(r.best.config.tracker, TrackerKind::kSort);
}

TEST(SelectThetaBest, PeakedAccuracySelectsPeak) {
  const SimConfig sim = default_sim_config(640, 352);
  const auto ladder = resolution_ladder(kFrame);
  const WindowSize peak = ladder[2];
  auto acc = [peak](WindowSize r, int g) {
    return (1.0 - std::abs(static_cast<double>(r.area() - peak.area())) / 1e6) - 0.01 * (g - 1);
  };
  const ThetaBestResult r = select_theta_best(surface(acc), sim, kFrame, 16);
  // Exhaustive check over the ladder at gap 1.
  WindowSize best = ladder[0];
  for (const auto& s : ladder) {
    if (acc(s, 1) > acc(best, 1)) best = s;
  }
  EXPECT_EQ(r.best.config.det_res, best);
  EXPECT_EQ(r.best.config.gap, 1);
  // Search stops right after the first strict decrease.
  EXPECT_EQ(r.trials.size(), 4u + 1u);
}

TEST(SelectThetaBest, RateSearchStopsAtFirstDrop) {
  const SimConfig sim = default_sim_config(640, 352);
  auto acc = [](WindowSize r, int g) { return (r == kFrame ? 1.0 : 0.5) - (g > 4 ? 0.1 : 0.0); };
  const ThetaBestResult r = select_theta_best(surface(acc), sim, kFrame, 16);
  EXPECT_EQ(r.best.config.det_res, kFrame);
  EXPECT_EQ(r.best.config.gap, 4);
  // Resolution: native + one drop. Gap: 2, 4, 8 (drop).
  EXPECT_EQ(r.trials.size(), 2u + 3u);
}

TEST(SelectThetaBest, RateInvariantReachesMaxGap) {
  const SimConfig sim = default_sim_config(640, 352);
  auto acc = [](WindowSize r, int) { return r == kFrame ? 1.0 : 0.5; };
  for (int max_gap : {1, 4, 16}) {
    const ThetaBestResult r = select_theta_best(surface(acc), sim, kFrame, max_gap);
    EXPECT_EQ(r.best.config.gap, max_gap);
  }
}

// Small mixed sparse/dense scenario shared by the integration tests.
SceneSpec scenario_spec() {
  SceneSpec spec = default_scene();
  spec.clip_count = 8;
  spec.duration = 200;
  spec.dense_clip_fraction = 0.3;
  spec.dense_rate_multiplier = 4.0;
  return spec;
}

WorkflowOptions scenario_options() {
  WorkflowOptions o;
  o.training_examples = 6000;
  return o;
}

struct Scenario {
  SyntheticDataset train = generate(scenario_spec(), "train");
  SyntheticDataset val = generate(scenario_spec(), "validation");
  SimConfig sim = default_sim_config(640, 352);
  WorkflowOptions options = scenario_options();
  PreparedModels prepared = prepare_models(train, val, sim, options);
};

const Scenario& scenario() {
  static const Scenario s;
  return s;
}

TEST(DetectionCache, EntriesMatchDirectEvaluation) {
  const Scenario& s = scenario();
  const Configuration& best = s.prepared.theta_best.best.config;
  const PipelineModels basic = basic_models(s.sim, kFrame);
  PipelineEvaluator evaluate(s.val, basic, 1);
  const DetectionCache cache = build_detection_cache(std::ref(evaluate), best, s.sim, kFrame);
  const auto ladder = resolution_ladder(kFrame);
  EXPECT_EQ(cache.entries.size(), s.sim.architectures.size() * ladder.size());
  for (const auto& e : cache.entries) {
    Configuration c = best;
    c.arch = e.arch;
    c.det_res = e.res;
    const PipelineResult direct = run_pipeline(s.val, c, basic);
    EXPECT_DOUBLE_EQ(e.accuracy, direct.accuracy);
    EXPECT_DOUBLE_EQ(e.time, direct.runtime.total());
  }
  EXPECT_DOUBLE_EQ(cache.at(best.arch, best.det_res).accuracy,
                   s.prepared.theta_best.best.accuracy);
  for (const auto& arch : s.sim.architectures) {
    for (size_t i = 1; i < ladder.size(); ++i) {
      EXPECT_LT(cache.at(arch.id, ladder[i]).time, cache.at(arch.id, ladder[i - 1]).time);
    }
  }
  EXPECT_THROW(cache.at("det-large", {96, 96 + 32 * 7}), CacheMissing);
}

TEST(CandidateSource, NextDetectionRules) {
  const Scenario& s = scenario();
  DetectionCache cache;
  cache.entries = {{"det-large", {640, 352}, 100.0, 1.0},
                   {"det-large", {544, 288}, 75.0, 0.99},
                   {"det-large", {448, 256}, 65.0, 0.9},
                   {"det-small", {640, 352}, 60.0, 0.8},
                   {"det-small", {544, 288}, 50.0, 0.9},
                   {"det-small", {448, 256}, 40.0, 0.7}};
  const ProxyCache proxy;
  const CandidateSource src(s.val, s.prepared.models, cache, proxy, {});
  Configuration c = s.prepared.theta_best.best.config;
  c.arch = "det-large";
  c.det_res = kFrame;
  // t <= 70 qualifies: alpha 0.9 at t=65 and t=50 tie, the faster wins.
  const auto n = src.next_detection(c);
  ASSERT_TRUE(n);
  EXPECT_EQ(n->arch, "det-small");
  EXPECT_EQ(n->det_res, (WindowSize{544, 288}));
  c.arch = "det-small";
  c.det_res = {448, 256};
  EXPECT_FALSE(src.next_detection(c));
}

TEST(CandidateSource, NextProxyMatchesExhaustiveScan) {
  const Scenario& s = scenario();
  const Configuration best = s.prepared.theta_best.best.config;
  const ProxyCache proxy = build_proxy_cache(s.val, best, s.prepared.models.costs, 8);
  const DetectionCache dc;
  const CandidateSource src(s.val, s.prepared.models, dc, proxy, {});
  const WindowCostTable costs = s.prepared.models.costs.window_costs(best.arch, best.det_res);
  const double full_frame = s.prepared.models.costs.window_cost(best.arch, best.det_res, kFrame);

  for (Configuration c : {best, [&] {
                            Configuration p = best;
                            p.proxy_enabled = true;
                            p.proxy_id = proxy.proxy_ids[0];
                            p.b_proxy = threshold_ladder(20)[3];
                            return p;
                          }()}) {
    const double current =
        c.proxy_enabled
            ? recall_runtime(proxy, c.proxy_id, c.b_proxy, s.prepared.models.sizes, costs).runtime
            : static_cast<double>(proxy.frames.size()) * full_frame;
    std::optional<std::tuple<double, double, std::string, double>> want;
    for (const auto& pid : proxy.proxy_ids) {
      for (double b : threshold_ladder(20)) {
        const RecallRuntime rr = recall_runtime(proxy, pid, b, s.prepared.models.sizes, costs);
        if (rr.runtime > 0.7 * current) continue;
        if (!want || rr.recall > std::get<0>(*want) ||
            (rr.recall == std::get<0>(*want) && rr.runtime < std::get<1>(*want))) {
          want = std::make_tuple(rr.recall, rr.runtime, pid, b);
        }
      }
    }
    const auto got = src.next_proxy(c);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_TRUE(got->proxy_enabled);
      EXPECT_EQ(got->proxy_id, std::get<2>(*want));
      EXPECT_EQ(got->b_proxy, std::get<3>(*want));
    }
  }
}

TEST(CandidateSource, NextTracking) {
  const Scenario& s = scenario();
  const DetectionCache dc;
  const ProxyCache pc;
  const CandidateSource src(s.val, s.prepared.models, dc, pc, {});
  Configuration c = s.prepared.theta_best.best.config;
  c.gap = 4;
  EXPECT_EQ(src.next_tracking(c)->gap, 8);
  c.gap = s.prepared.models.max_gap;
  EXPECT_FALSE(src.next_tracking(c));
}

TEST(Tune, AllExhaustedGivesSinglePoint) {
  const Scenario& s = scenario();
  PipelineModels models = s.prepared.models;
  models.max_gap = 1;
  Configuration start = tuning_start(s.prepared.theta_best.best.config);
  start.gap = 1;
  DetectionCache dc;
  dc.entries = {{start.arch, start.det_res, 10.0, 1.0}};
  const ProxyCache pc;
  const CandidateSource src(s.val, models, dc, pc, {});
  int calls = 0;
  const TuneResult r = tune(start, src, surface([](WindowSize, int) { return 1.0; }, &calls), {});
  ASSERT_EQ(r.curve.size(), 1u);
  EXPECT_EQ(r.curve[0].config, start);
  EXPECT_EQ(r.trials, 1);
  EXPECT_EQ(calls, 1);
}

TEST(Tune, CurveShapeAndTrialCount) {
  const Scenario& s = scenario();
  const TuneRun run = run_tuning(s.val, s.prepared, s.options);
  const auto& curve = run.result.curve;
  ASSERT_GE(curve.size(), 2u);
  EXPECT_EQ(curve[0].config, tuning_start(s.prepared.theta_best.best.config));
  for (size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LT(curve[i].runtime, curve[i - 1].runtime);
    EXPECT_LE(curve[i].runtime, (1.0 - 0.3 + 0.1) * curve[i - 1].runtime);
    EXPECT_GT(curve[i].runtime, 0.0);
  }
  // One start evaluation plus at most one per module per iteration.
  EXPECT_LE(run.result.trials, 1 + 3 * run.result.iterations);
  EXPECT_LE(run.result.iterations, s.options.tuner.max_iters);
}

TEST(Tune, Deterministic) {
  const Scenario& s = scenario();
  WorkflowOptions o = s.options;
  o.tuner.max_iters = 4;
  const TuneRun a = run_tuning(s.val, s.prepared, o);
  o.jobs = 3;
  const TuneRun b = run_tuning(s.val, s.prepared, o);
  ASSERT_EQ(a.result.curve.size(), b.result.curve.size());
  for (size_t i = 0; i < a.result.curve.size(); ++i) {
    EXPECT_EQ(a.result.curve[i].config, b.result.curve[i].config);
    EXPECT_EQ(a.result.curve[i].accuracy, b.result.curve[i].accuracy);
    EXPECT_EQ(a.result.curve[i].runtime, b.result.curve[i].runtime);
  }
}

}  // namespace
}  // namespace scopeflow

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

#include "scopeflow/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scopeflow {

Evaluation PipelineEvaluator::operator()(const Configuration& c) {
  ++calls_;
  const PipelineResult r = run_pipeline(ds_, c, models_, jobs_);
  return {c, r.accuracy, r.runtime};
}

std::vector<WindowSize> resolution_ladder(WindowSize native) {
  std::vector<WindowSize> out{native};
  for (;;) {
    const WindowSize cur = out.back();
    auto shrink = [](int v) {
      return static_cast<int>(std::lround(v * 0.85 / kCellSize)) * kCellSize;
    };
    const WindowSize next{shrink(cur.w), shrink(cur.h)};
    if (next.w < 64 || next.h < 64 || next == cur) break;
    out.push_back(next);
  }
  return out;
}

std::vector<double> threshold_ladder(int n) {
  if (n < 2) throw std::invalid_argument("threshold ladder needs at least two steps");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(static_cast<double>(i) / (n - 1));
  return out;
}

std::optional<int> next_gap(int g, double speedup, int max_gap) {
  if (speedup <= 0.0 || speedup >= 1.0) throw std::invalid_argument("speedup must be in (0, 1)");
  const double target = g / (1.0 - speedup);
  int next = 1;
  while (next < target - 1e-12) next *= 2;
  if (next > max_gap || next <= g) return std::nullopt;
  return next;
}

namespace {

bool better(const Evaluation& a, const Evaluation& b) {
  return a.accuracy > b.accuracy || (a.accuracy == b.accuracy && a.total() < b.total());
}

}  // namespace

ThetaBestResult select_theta_best(const Evaluator& evaluate, const SimConfig& sim,
                                  WindowSize native, int max_gap, double conf_threshold) {
  if (sim.architectures.empty()) throw std::invalid_argument("no detector architectures");
  const auto reference = std::max_element(
      sim.architectures.begin(), sim.architectures.end(),
      [](const Architecture& a, const Architecture& b) { return a.full_frame_cost < b.full_frame_cost; });

  ThetaBestResult out;
  Configuration c;
  c.arch = reference->id;
  c.conf_threshold = conf_threshold;
  c.gap = 1;
  c.tracker = TrackerKind::kSort;

  const auto ladder = resolution_ladder(native);
  c.det_res = ladder.front();
  Evaluation prev = evaluate(c);
  out.trials.push_back(prev);
  out.best = prev;
  for (size_t i = 1; i < ladder.size(); ++i) {
    c.det_res = ladder[i];
    Evaluation e = evaluate(c);
    out.trials.push_back(e);
    if (e.accuracy < prev.accuracy) break;
    prev = e;
    if (better(e, out.best)) out.best = e;
  }

  c = out.best.config;
  prev = out.best;
  for (int g = 2; g <= max_gap; g *= 2) {
    c.gap = g;
    Evaluation e = evaluate(c);
    out.trials.push_back(e);
    if (e.accuracy < prev.accuracy) break;
    prev = e;
    if (better(e, out.best)) out.best = e;
  }
  return out;
}

const DetectionCacheEntry& DetectionCache::at(const std::string& arch, WindowSize res) const {
  for (const auto& e : entries) {
    if (e.arch == arch && e.res == res) return e;
  }
  throw CacheMissing("no detection cache entry for " + arch + "@" + std::to_string(res.w) + "x" +
                     std::to_string(res.h));
}

DetectionCache build_detection_cache(const Evaluator& evaluate, const Configuration& theta_best,
                                     const SimConfig& sim, WindowSize native) {
  DetectionCache cache;
  const auto ladder = resolution_ladder(native);
  for (const auto& a : sim.architectures) {
    for (const auto& r : ladder) {
      Configuration c = theta_best;
      c.arch = a.id;
      c.det_res = r;
      const Evaluation e = evaluate(c);
      cache.entries.push_back({a.id, r, e.total(), e.accuracy});
    }
  }
  return cache;
}

ProxyCache build_proxy_cache(const SyntheticDataset& ds, const Configuration& theta_best,
                             const CostModel& costs, int stride) {
  if (stride < 1) throw std::invalid_argument("proxy cache stride must be >= 1");
  const SimConfig& sim = costs.config();
  const WindowSize frame = costs.frame();
  ProxyCache cache;
  for (const auto& p : sim.proxies) {
    cache.proxy_ids.push_back(p.id);
    cache.proxy_costs.push_back(p.cost);
  }
  const SimulatedDetector detector(sim.architecture(theta_best.arch), theta_best.det_res, frame.w,
                                   frame.h);
  const WindowCostTable table = costs.window_costs(theta_best.arch, theta_best.det_res);
  const std::vector<Rect> full{{0, 0, frame.w, frame.h}};
  for (size_t ci = 0; ci < ds.clips.size(); ++ci) {
    const Clip& clip = ds.clips[ci];
    for (size_t f = 0; f < clip.frames.size(); f += static_cast<size_t>(stride)) {
      const auto& truth = clip.frames[f];
      const std::uint64_t fs = frame_seed(ds.seed(), static_cast<int>(ci), static_cast<int>(f));
      ProxyFrameCache entry;
      for (const auto& p : sim.proxies) {
        entry.grids.push_back(proxy_scores(truth, frame.w, frame.h, p, proxy_seed(fs, p.id)));
      }
      for (auto& d : detect(truth, static_cast<int>(f), full, detector, table, fs).detections) {
        if (d.confidence >= theta_best.conf_threshold) entry.reference_detections.push_back(d);
      }
      cache.frames.push_back(std::move(entry));
    }
  }
  return cache;
}

// ---------------------------------------------------------------------------

CandidateSource::CandidateSource(const SyntheticDataset& ds, const PipelineModels& models,
                                 const DetectionCache& detection, const ProxyCache& proxy,
                                 TunerOptions options)
    : ds_(ds),
      models_(models),
      detection_(detection),
      proxy_(proxy),
      options_(options),
      thresholds_(threshold_ladder(options.threshold_steps)) {
  if (options.speedup <= 0.0 || options.speedup >= 1.0) {
    throw std::invalid_argument("speedup must be in (0, 1)");
  }
  for (const auto& c : ds.clips) processed_frames_g1_ += static_cast<long>(c.frames.size());
}

const std::vector<RecallRuntime>& CandidateSource::recall_table(const Configuration& c) const {
  const auto key = std::make_pair(c.arch, c.det_res);
  auto it = recall_memo_.find(key);
  if (it != recall_memo_.end()) return it->second;
  const WindowCostTable costs = models_.costs.window_costs(c.arch, c.det_res);
  std::vector<RecallRuntime> table;
  for (const auto& pid : proxy_.proxy_ids) {
    for (double b : thresholds_) {
      table.push_back(recall_runtime(proxy_, pid, b, models_.sizes, costs));
    }
  }
  return recall_memo_.emplace(key, std::move(table)).first->second;
}

RecallRuntime CandidateSource::proxy_estimate(const Configuration& c, const std::string& proxy_id,
                                              double b_proxy) const {
  const auto pit = std::find(proxy_.proxy_ids.begin(), proxy_.proxy_ids.end(), proxy_id);
  const auto bit = std::find(thresholds_.begin(), thresholds_.end(), b_proxy);
  if (pit != proxy_.proxy_ids.end() && bit != thresholds_.end()) {
    const size_t i = static_cast<size_t>(pit - proxy_.proxy_ids.begin()) * thresholds_.size() +
                     static_cast<size_t>(bit - thresholds_.begin());
    return recall_table(c)[i];
  }
  return recall_runtime(proxy_, proxy_id, b_proxy, models_.sizes,
                        models_.costs.window_costs(c.arch, c.det_res));
}

double CandidateSource::full_frame_estimate(const Configuration& c) const {
  const WindowSize frame = models_.costs.frame();
  return static_cast<double>(proxy_.frames.size()) *
         models_.costs.window_cost(c.arch, c.det_res, frame);
}

double CandidateSource::estimated_runtime(const Configuration& c) const {
  long frames = 0;
  for (const auto& clip : ds_.clips) {
    const long n = static_cast<long>(clip.frames.size());
    frames += (n + c.gap - 1) / c.gap;
  }
  const double cached = static_cast<double>(std::max<size_t>(1, proxy_.frames.size()));
  const double per_frame_detect =
      c.proxy_enabled ? proxy_estimate(c, c.proxy_id, c.b_proxy).runtime / cached
                      : full_frame_estimate(c) / cached;
  return static_cast<double>(frames) * (models_.costs.decode_time(c.det_res) + per_frame_detect);
}

std::optional<Configuration> CandidateSource::next_detection(const Configuration& c) const {
  const DetectionCacheEntry& cur = detection_.at(c.arch, c.det_res);
  const DetectionCacheEntry* pick = nullptr;
  for (const auto& e : detection_.entries) {
    if (e.time > (1.0 - options_.speedup) * cur.time) continue;
    if (pick == nullptr || e.accuracy > pick->accuracy ||
        (e.accuracy == pick->accuracy && e.time < pick->time)) {
      pick = &e;
    }
  }
  if (pick == nullptr) return std::nullopt;
  Configuration out = c;
  out.arch = pick->arch;
  out.det_res = pick->res;
  return out;
}

std::optional<Configuration> CandidateSource::next_proxy(const Configuration& c) const {
  if (proxy_.frames.empty()) return std::nullopt;
  const double current = c.proxy_enabled ? proxy_estimate(c, c.proxy_id, c.b_proxy).runtime
                                         : full_frame_estimate(c);
  const double limit = (1.0 - options_.speedup) * current;
  const auto& table = recall_table(c);
  std::optional<size_t> pick;
  for (size_t i = 0; i < table.size(); ++i) {
    if (table[i].runtime > limit) continue;
    if (!pick || table[i].recall > table[*pick].recall ||
        (table[i].recall == table[*pick].recall && table[i].runtime < table[*pick].runtime)) {
      pick = i;
    }
  }
  if (!pick) return std::nullopt;
  Configuration out = c;
  out.proxy_enabled = true;
  out.proxy_id = proxy_.proxy_ids[*pick / thresholds_.size()];
  out.b_proxy = thresholds_[*pick % thresholds_.size()];
  return out;
}

std::optional<Configuration> CandidateSource::next_tracking(const Configuration& c) const {
  const auto g = next_gap(c.gap, options_.speedup, models_.max_gap);
  if (!g) return std::nullopt;
  Configuration out = c;
  out.gap = *g;
  return out;
}

TuneResult tune(const Configuration& start, const CandidateSource& source,
                const Evaluator& evaluate, const TunerOptions& options) {
  TuneResult out;
  Evaluation cur = evaluate(start);
  ++out.trials;
  out.curve.push_back({start, cur.accuracy, cur.total(), "start"});

  using Step = std::optional<Configuration> (CandidateSource::*)(const Configuration&) const;
  const std::pair<const char*, Step> modules[] = {
      {"detection", &CandidateSource::next_detection},
      {"proxy", &CandidateSource::next_proxy},
      {"tracking", &CandidateSource::next_tracking},
  };

  for (int iter = 0; iter < options.max_iters; ++iter) {
    const double target = (1.0 - options.speedup) * source.estimated_runtime(cur.config);
    std::vector<std::pair<const char*, Configuration>> candidates;
    for (const auto& [name, step] : modules) {
      std::optional<Configuration> last;
      for (auto next = (source.*step)(cur.config); next; next = (source.*step)(*next)) {
        last = next;
        if (source.estimated_runtime(*next) <= target) break;
      }
      if (!last || *last == cur.config) continue;
      const bool duplicate = std::any_of(candidates.begin(), candidates.end(),
                                         [&](const auto& p) { return p.second == *last; });
      if (!duplicate) candidates.emplace_back(name, *last);
    }
    if (candidates.empty()) break;
    ++out.iterations;

    const double ceiling = (1.0 - options.speedup + options.speedup_tolerance) * cur.total();
    std::optional<Evaluation> adopted;
    const char* adopted_module = nullptr;
    for (const auto& [name, config] : candidates) {
      Evaluation e = evaluate(config);
      ++out.trials;
      if (!(e.total() < cur.total()) || e.total() > ceiling) continue;
      if (!adopted || better(e, *adopted)) {
        adopted = e;
        adopted_module = name;
      }
    }
    if (!adopted) break;
    cur = *adopted;
    out.curve.push_back({cur.config, cur.accuracy, cur.total(), adopted_module});
  }
  return out;
}

}  // namespace scopeflow

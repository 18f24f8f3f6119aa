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

#include "scopeflow/cli.hpp"

#include <cstdio>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "scopeflow/io.hpp"
#include "scopeflow/parallel.hpp"
#include "scopeflow/rng.hpp"
#include "scopeflow/workflow.hpp"

namespace scopeflow {

namespace {

class UnknownConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 1;
  int jobs = default_jobs();
  std::string sim_path;
  bool noiseless = false;
  int max_gap = 16;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sim", c.sim_path, "Simulator/cost-model JSON (default: built-in)");
  cmd->add_flag("--noiseless", c.noiseless, "Disable detector and proxy noise");
  cmd->add_option("--max-gap", c.max_gap, "Largest sampling gap (power of two)")
      ->capture_default_str();
}

SimConfig load_sim(const Common& c, WindowSize frame) {
  SimConfig sim = c.sim_path.empty() ? default_sim_config(frame.w, frame.h)
                                     : sim_config_from_json(read_json_file(c.sim_path));
  return c.noiseless ? noiseless(sim) : sim;
}

WindowSize frame_of(const SyntheticDataset& ds) { return {ds.spec.frame_w, ds.spec.frame_h}; }

SyntheticDataset load_dataset(const std::string& path) {
  return dataset_from_json(read_json_file(path));
}

Configuration load_config(const std::string& path) {
  const Json j = read_json_file(path);
  // Accept either a bare configuration or a select-best output file.
  return configuration_from_json(j.contains("config") ? j.at("config") : j);
}

WorkflowOptions workflow_options(const Common& c) {
  WorkflowOptions o;
  o.seed = c.seed;
  o.jobs = c.jobs;
  o.max_gap = c.max_gap;
  o.train.seed = mix_seed(c.seed, 0x77);
  return o;
}

struct ModelPaths {
  std::string sizes;
  std::string scorer;
  std::string refinement;
};

void add_model_paths(CLI::App* cmd, ModelPaths& m) {
  cmd->add_option("--sizes", m.sizes, "Window-size set JSON (from `plan select`)");
  cmd->add_option("--scorer", m.scorer, "Trained scorer JSON (from `train-scorer`)");
  cmd->add_option("--refinement", m.refinement, "Refinement model JSON (from `refine build`)");
}

PipelineModels load_models(const Common& c, const ModelPaths& m, WindowSize frame) {
  PipelineModels models = basic_models(load_sim(c, frame), frame, c.max_gap);
  if (!m.sizes.empty()) models.sizes = window_sizes_from_json(read_json_file(m.sizes));
  if (!m.scorer.empty()) models.scorer = scorer_from_json(read_json_file(m.scorer));
  if (!m.refinement.empty()) models.refinement = refinement_from_json(read_json_file(m.refinement));
  if (models.sizes.frame() != frame) throw InvalidData("window sizes were built for another frame size");
  return models;
}

// Names the file a configuration needs before anything runs.
void require_models(const Configuration& c, const PipelineModels& models) {
  if (c.tracker == TrackerKind::kLearned && !models.scorer) {
    throw MissingModel("configuration '" + c.id() + "' needs --scorer");
  }
  if (c.refine && !models.refinement) {
    throw MissingModel("configuration '" + c.id() + "' needs --refinement");
  }
}

ClipTracks clip_tracks(const PipelineResult& r) {
  ClipTracks out;
  for (const auto& c : r.clips) out[c.clip_id] = c.tracks;
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Polygon parse_region(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw InvalidData("region must be x0,y0,x1,y1");
    }
  }
  if (v.size() != 4 || v[2] <= v[0] || v[3] <= v[1]) throw InvalidData("region must be x0,y0,x1,y1");
  return rectangle_polygon(v[0], v[1], v[2], v[3]);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video pre-processing pipeline with speed-accuracy tuning over a simulated scene",
               "scopeflow"};
  app.require_subcommand(1);
  std::function<void()> action;

  // generate -----------------------------------------------------------------
  Common gen_c;
  std::string gen_spec, gen_split = "train", gen_out, gen_labels, gen_patterns;
  int gen_clips = 0;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset split");
  add_common(gen, gen_c);
  gen->add_option("--spec", gen_spec, "Scene spec JSON (default: junction scene)");
  gen->add_option("--split", gen_split, "Split name; seeds each split independently")
      ->capture_default_str();
  gen->add_option("--clips", gen_clips, "Override clip count");
  gen->add_option("--out", gen_out, "Dataset JSON")->required();
  gen->add_option("--labels-out", gen_labels, "Count labels JSON");
  gen->add_option("--patterns-out", gen_patterns, "Patterns JSON");
  gen->callback([&] {
    action = [&] {
      SceneSpec spec = gen_spec.empty() ? default_scene()
                                        : scene_spec_from_json(read_json_file(gen_spec));
      if (gen->count("--seed") > 0) spec.rng_seed = gen_c.seed;
      if (gen_clips > 0) spec.clip_count = gen_clips;
      const SyntheticDataset ds = generate(spec, gen_split);
      write_json_file(gen_out, to_json(ds));
      if (!gen_labels.empty()) write_json_file(gen_labels, labels_to_json(ds.labels()));
      if (!gen_patterns.empty()) write_json_file(gen_patterns, patterns_to_json(ds.patterns));
      size_t tracks = 0;
      for (const auto& c : ds.clips) tracks += c.tracks.size();
      out << "generated " << ds.clips.size() << " clips, " << tracks << " objects -> " << gen_out
          << "\n";
    };
  });

  // select-best --------------------------------------------------------------
  Common sb_c;
  std::string sb_val, sb_out, sb_trials;
  double sb_conf = 0.4;
  auto* sb = app.add_subcommand("select-best", "Find the best-accuracy configuration");
  add_common(sb, sb_c);
  sb->add_option("--validation", sb_val, "Validation dataset JSON")->required();
  sb->add_option("--out", sb_out, "Configuration JSON")->required();
  sb->add_option("--trials-out", sb_trials, "CSV of every evaluated configuration");
  sb->add_option("--conf", sb_conf, "Detector confidence threshold")->capture_default_str();
  sb->callback([&] {
    action = [&] {
      const SyntheticDataset val = load_dataset(sb_val);
      const SimConfig sim = load_sim(sb_c, frame_of(val));
      const PipelineModels models = basic_models(sim, frame_of(val), sb_c.max_gap);
      PipelineEvaluator evaluate(val, models, sb_c.jobs);
      const ThetaBestResult r =
          select_theta_best(std::ref(evaluate), sim, frame_of(val), sb_c.max_gap, sb_conf);
      write_json_file(sb_out, Json{{"config", to_json(r.best.config)},
                                   {"accuracy", r.best.accuracy},
                                   {"runtime", r.best.total()}});
      if (!sb_trials.empty()) {
        std::vector<CurvePoint> trials;
        for (const auto& t : r.trials) trials.push_back({t.config, t.accuracy, t.total(), "trial"});
        write_text_file(sb_trials, curve_to_csv(trials));
      }
      out << "best " << r.best.config.id() << " accuracy " << fmt("%.4f", r.best.accuracy)
          << " runtime " << fmt("%.1f", r.best.total()) << "\n";
    };
  });

  // train-scorer -------------------------------------------------------------
  Common ts_c;
  std::string ts_train, ts_best, ts_out;
  int ts_examples = 20000, ts_epochs = 400;
  auto* ts = app.add_subcommand("train-scorer", "Train the match scorer on best-config tracks");
  add_common(ts, ts_c);
  ts->add_option("--train", ts_train, "Training dataset JSON")->required();
  ts->add_option("--best", ts_best, "Best configuration JSON")->required();
  ts->add_option("--out", ts_out, "Scorer JSON")->required();
  ts->add_option("--examples", ts_examples, "Training examples to sample")->capture_default_str();
  ts->add_option("--epochs", ts_epochs, "Gradient descent epochs")->capture_default_str();
  ts->callback([&] {
    action = [&] {
      const SyntheticDataset train = load_dataset(ts_train);
      const Configuration best = load_config(ts_best);
      const PipelineModels models = basic_models(load_sim(ts_c, frame_of(train)), frame_of(train),
                                                 ts_c.max_gap);
      WorkflowOptions o = workflow_options(ts_c);
      o.training_examples = ts_examples;
      o.train.epochs = ts_epochs;
      const auto tracks = tracks_by_clip(train, best, models, ts_c.jobs);
      const TrainedScorer t = train_from_tracks(tracks, frame_of(train), o);
      write_json_file(ts_out, to_json(t.scorer, t.report));
      out << "trained on " << t.report.train_size << " examples, held-out accuracy "
          << fmt("%.4f", t.report.holdout_accuracy) << "\n";
    };
  });

  // plan ---------------------------------------------------------------------
  auto* plan = app.add_subcommand("plan", "Window-size selection and per-frame plans");
  plan->require_subcommand(1);
  Common ps_c;
  std::string ps_train, ps_best, ps_out;
  int ps_k = 3, ps_stride = 10;
  auto* ps = plan->add_subcommand("select", "Choose the window-size set");
  add_common(ps, ps_c);
  ps->add_option("--train", ps_train, "Training dataset JSON")->required();
  ps->add_option("--best", ps_best, "Best configuration JSON")->required();
  ps->add_option("--out", ps_out, "Window-size JSON")->required();
  ps->add_option("--k", ps_k, "Number of sizes including the full frame")->capture_default_str();
  ps->add_option("--frame-stride", ps_stride, "Use every n-th frame")->capture_default_str();
  ps->callback([&] {
    action = [&] {
      const SyntheticDataset train = load_dataset(ps_train);
      const Configuration best = load_config(ps_best);
      const PipelineModels models = basic_models(load_sim(ps_c, frame_of(train)), frame_of(train),
                                                 ps_c.max_gap);
      WorkflowOptions o = workflow_options(ps_c);
      o.window_k = ps_k;
      o.window_frame_stride = ps_stride;
      const auto tracks = tracks_by_clip(train, best, models, ps_c.jobs);
      const WindowSizeSet sizes =
          window_sizes_from_tracks(tracks, best, models.costs, train.spec.duration, o);
      write_json_file(ps_out, to_json(sizes));
      out << "window sizes:";
      for (const auto& s : sizes.sizes()) out << " " << s.w << "x" << s.h;
      out << "\n";
    };
  });
  Common pd_c;
  ModelPaths pd_m;
  std::string pd_ds, pd_config, pd_clip, pd_out;
  auto* pd = plan->add_subcommand("dump", "Write the proxy window plan of every processed frame");
  add_common(pd, pd_c);
  add_model_paths(pd, pd_m);
  pd->add_option("--dataset", pd_ds, "Dataset JSON")->required();
  pd->add_option("--config", pd_config, "Configuration JSON with the proxy enabled")->required();
  pd->add_option("--clip", pd_clip, "Clip id")->required();
  pd->add_option("--out", pd_out, "Plan JSON")->required();
  pd->callback([&] {
    action = [&] {
      const SyntheticDataset ds = load_dataset(pd_ds);
      const Configuration c = load_config(pd_config);
      const PipelineModels models = load_models(pd_c, pd_m, frame_of(ds));
      if (!c.proxy_enabled) throw InvalidData("configuration does not use the proxy");
      int ci = -1;
      for (size_t i = 0; i < ds.clips.size(); ++i) {
        if (ds.clips[i].id == pd_clip) ci = static_cast<int>(i);
      }
      if (ci < 0) throw InvalidData("no clip '" + pd_clip + "' in dataset");
      const auto& profile = models.costs.config().proxy(c.proxy_id);
      const WindowCostTable costs = models.costs.window_costs(c.arch, c.det_res);
      Json frames = Json::array();
      const auto& clip = ds.clips[static_cast<size_t>(ci)];
      for (int f = 0; f < static_cast<int>(clip.frames.size()); f += c.gap) {
        const std::uint64_t fs = frame_seed(ds.seed(), ci, f);
        const FrameGrid grid = proxy_scores(clip.frames[static_cast<size_t>(f)], ds.spec.frame_w,
                                            ds.spec.frame_h, profile, proxy_seed(fs, profile.id));
        const WindowPlan p = group_cells(threshold(grid, c.b_proxy), models.sizes, costs);
        Json pj = to_json(p);
        pj["frame"] = f;
        pj["est_time"] = est_time(p.rects, costs);
        frames.push_back(std::move(pj));
      }
      write_json_file(pd_out, Json{{"clip", pd_clip},
                                   {"config", to_json(c)},
                                   {"sizes", to_json(models.sizes)},
                                   {"frames", std::move(frames)}});
      out << "wrote plans for clip " << pd_clip << " -> " << pd_out << "\n";
    };
  });

  // refine -------------------------------------------------------------------
  auto* ref = app.add_subcommand("refine", "Endpoint refinement model");
  ref->require_subcommand(1);
  Common rb_c;
  std::string rb_train, rb_best, rb_out;
  RefinementOptions rb_opts;
  auto* rb = ref->add_subcommand("build", "Cluster best-config training tracks");
  add_common(rb, rb_c);
  rb->add_option("--train", rb_train, "Training dataset JSON")->required();
  rb->add_option("--best", rb_best, "Best configuration JSON")->required();
  rb->add_option("--out", rb_out, "Refinement model JSON")->required();
  rb->add_option("--eps", rb_opts.eps, "DBSCAN radius in pixels (default 5% of diagonal)");
  rb->add_option("--min-pts", rb_opts.min_pts, "DBSCAN min points")->capture_default_str();
  rb->add_option("--k", rb_opts.k, "Cluster multiplicity to keep")->capture_default_str();
  rb->callback([&] {
    action = [&] {
      const SyntheticDataset train = load_dataset(rb_train);
      const Configuration best = load_config(rb_best);
      const PipelineModels models = basic_models(load_sim(rb_c, frame_of(train)), frame_of(train),
                                                 rb_c.max_gap);
      WorkflowOptions o = workflow_options(rb_c);
      o.refinement = rb_opts;
      const auto tracks = tracks_by_clip(train, best, models, rb_c.jobs);
      const RefinementModel m = refinement_from_tracks(tracks, frame_of(train), o);
      write_json_file(rb_out, to_json(m));
      out << "built " << m.clusters.size() << " clusters over " << m.index.cells().size()
          << " index cells\n";
    };
  });
  Common ri_c;
  std::string ri_model, ri_out;
  auto* ri = ref->add_subcommand("inspect", "Summarize a refinement model");
  add_common(ri, ri_c);
  ri->add_option("--model", ri_model, "Refinement model JSON")->required();
  ri->add_option("--out", ri_out, "Write the summary JSON here instead of stdout");
  ri->callback([&] {
    action = [&] {
      const RefinementModel m = refinement_from_json(read_json_file(ri_model));
      Json clusters = Json::array();
      for (const auto& c : m.clusters) {
        clusters.push_back(Json{{"id", c.id},
                                {"member_count", c.member_count},
                                {"start", {c.center.front().x, c.center.front().y}},
                                {"end", {c.center.back().x, c.center.back().y}}});
      }
      const Json summary{{"cluster_count", m.clusters.size()},
                         {"index_cells", m.index.cells().size()},
                         {"eps", m.options.eps},
                         {"min_pts", m.options.min_pts},
                         {"k", m.options.k},
                         {"clusters", std::move(clusters)}};
      if (ri_out.empty()) {
        out << summary.dump(2) << "\n";
      } else {
        write_json_file(ri_out, summary);
      }
    };
  });
  Common ra_c;
  std::string ra_model, ra_tracks, ra_ds, ra_out;
  auto* ra = ref->add_subcommand("apply", "Refine a tracks file");
  add_common(ra, ra_c);
  ra->add_option("--model", ra_model, "Refinement model JSON")->required();
  ra->add_option("--tracks", ra_tracks, "Tracks JSON")->required();
  ra->add_option("--dataset", ra_ds, "Dataset JSON (clip lengths)")->required();
  ra->add_option("--out", ra_out, "Refined tracks JSON")->required();
  ra->callback([&] {
    action = [&] {
      const RefinementModel m = refinement_from_json(read_json_file(ra_model));
      const SyntheticDataset ds = load_dataset(ra_ds);
      ClipTracks tracks = clip_tracks_from_json(read_json_file(ra_tracks));
      int extended = 0;
      for (auto& [clip, ts] : tracks) {
        for (auto& t : ts) {
          const RefineResult r = refine(t, m, ds.spec.duration);
          extended += (r.extended_start ? 1 : 0) + (r.extended_end ? 1 : 0);
          t = r.track;
        }
      }
      write_json_file(ra_out, clip_tracks_to_json(tracks));
      out << "extended " << extended << " track ends\n";
    };
  });

  // cache --------------------------------------------------------------------
  Common ca_c;
  std::string ca_val, ca_best, ca_out;
  auto* ca = app.add_subcommand("cache", "Build the detection cache over architectures x sizes");
  add_common(ca, ca_c);
  ca->add_option("--validation", ca_val, "Validation dataset JSON")->required();
  ca->add_option("--best", ca_best, "Best configuration JSON")->required();
  ca->add_option("--out", ca_out, "Detection cache JSON")->required();
  ca->callback([&] {
    action = [&] {
      const SyntheticDataset val = load_dataset(ca_val);
      const Configuration best = load_config(ca_best);
      const SimConfig sim = load_sim(ca_c, frame_of(val));
      const PipelineModels models = basic_models(sim, frame_of(val), ca_c.max_gap);
      PipelineEvaluator evaluate(val, models, ca_c.jobs);
      const DetectionCache cache =
          build_detection_cache(std::ref(evaluate), best, sim, frame_of(val));
      write_json_file(ca_out, to_json(cache));
      out << "cached " << cache.entries.size() << " detector settings\n";
    };
  });

  // tune ---------------------------------------------------------------------
  Common tu_c;
  ModelPaths tu_m;
  std::string tu_val, tu_best, tu_cache, tu_csv, tu_json;
  TunerOptions tu_opts;
  int tu_stride = 8;
  auto* tu = app.add_subcommand("tune", "Greedy speed-accuracy tuning");
  add_common(tu, tu_c);
  add_model_paths(tu, tu_m);
  tu->add_option("--validation", tu_val, "Validation dataset JSON")->required();
  tu->add_option("--best", tu_best, "Best configuration JSON")->required();
  tu->add_option("--cache", tu_cache, "Detection cache JSON (built when omitted)");
  tu->add_option("--speedup", tu_opts.speedup, "Target speedup per step")->capture_default_str();
  tu->add_option("--max-iters", tu_opts.max_iters, "Iteration limit")->capture_default_str();
  tu->add_option("--proxy-stride", tu_stride, "Cache every n-th frame for the proxy module")
      ->capture_default_str();
  tu->add_option("--out-csv", tu_csv, "Curve CSV")->required();
  tu->add_option("--out-json", tu_json, "Curve JSON")->required();
  tu->callback([&] {
    action = [&] {
      const SyntheticDataset val = load_dataset(tu_val);
      const Configuration best = load_config(tu_best);
      PreparedModels prepared{{}, load_models(tu_c, tu_m, frame_of(val)), {}};
      require_models(tuning_start(best), prepared.models);
      prepared.theta_best.best.config = best;
      WorkflowOptions o = workflow_options(tu_c);
      o.tuner = tu_opts;
      o.proxy_stride = tu_stride;
      TuneRun run;
      if (tu_cache.empty()) {
        run = run_tuning(val, prepared, o);
      } else {
        run.detection_cache = detection_cache_from_json(read_json_file(tu_cache));
        const ProxyCache pc = build_proxy_cache(val, best, prepared.models.costs, tu_stride);
        const CandidateSource source(val, prepared.models, run.detection_cache, pc, tu_opts);
        PipelineEvaluator evaluate(val, prepared.models, tu_c.jobs);
        run.result = tune(tuning_start(best), source, std::ref(evaluate), tu_opts);
      }
      write_text_file(tu_csv, curve_to_csv(run.result.curve));
      write_json_file(tu_json, curve_to_json(run.result.curve, run.result.trials));
      out << "curve of " << run.result.curve.size() << " points from " << run.result.trials
          << " trials\n";
      for (const auto& p : run.result.curve) {
        out << "  " << fmt("%12.1f", p.runtime) << "  " << fmt("%.4f", p.accuracy) << "  "
            << p.config.id() << "\n";
      }
    };
  });

  // pipeline -----------------------------------------------------------------
  Common pl_c;
  ModelPaths pl_m;
  std::string pl_ds, pl_curve, pl_id, pl_config, pl_tracks, pl_report;
  auto* pl = app.add_subcommand("pipeline", "Run one configuration over a dataset");
  add_common(pl, pl_c);
  add_model_paths(pl, pl_m);
  pl->add_option("--dataset", pl_ds, "Dataset JSON")->required();
  auto* pl_cfg_opt = pl->add_option("--config", pl_config, "Configuration JSON");
  pl->add_option("--curve", pl_curve, "Curve JSON (with --config-id)")->excludes(pl_cfg_opt);
  pl->add_option("--config-id", pl_id, "Configuration id from the curve");
  pl->add_option("--tracks-out", pl_tracks, "Tracks JSON")->required();
  pl->add_option("--report-out", pl_report, "Runtime and accuracy report JSON")->required();
  pl->callback([&] {
    action = [&] {
      Configuration config;
      if (!pl_config.empty()) {
        config = load_config(pl_config);
      } else if (!pl_curve.empty() && !pl_id.empty()) {
        bool found = false;
        for (const auto& p : curve_from_json(read_json_file(pl_curve))) {
          if (p.config.id() == pl_id) {
            config = p.config;
            found = true;
          }
        }
        if (!found) throw UnknownConfig("no configuration '" + pl_id + "' in " + pl_curve);
      } else {
        throw CLI::ValidationError("pipeline needs --config or --curve with --config-id");
      }
      const SyntheticDataset ds = load_dataset(pl_ds);
      const PipelineModels models = load_models(pl_c, pl_m, frame_of(ds));
      require_models(config, models);
      const PipelineResult r = run_pipeline(ds, config, models, pl_c.jobs);
      write_json_file(pl_tracks, clip_tracks_to_json(clip_tracks(r)));
      Json clips = Json::array();
      for (const auto& c : r.clips) {
        clips.push_back(Json{{"clip", c.clip_id},
                             {"tracks", c.tracks.size()},
                             {"frames_processed", c.frames_processed},
                             {"runtime", to_json(c.runtime)}});
      }
      write_json_file(pl_report, Json{{"config", to_json(config)},
                                      {"accuracy", r.accuracy},
                                      {"runtime", to_json(r.runtime)},
                                      {"clips", std::move(clips)}});
      out << config.id() << " accuracy " << fmt("%.4f", r.accuracy) << " runtime "
          << fmt("%.1f", r.runtime.total()) << "\n";
    };
  });

  // eval ---------------------------------------------------------------------
  Common ev_c;
  ModelPaths ev_m;
  std::string ev_ds, ev_labels, ev_patterns, ev_tracks, ev_curve, ev_out;
  auto* ev = app.add_subcommand("eval", "Count accuracy of tracks, or of every curve point");
  add_common(ev, ev_c);
  add_model_paths(ev, ev_m);
  ev->add_option("--dataset", ev_ds, "Dataset JSON (labels, patterns, and clips for --curve)");
  ev->add_option("--labels", ev_labels, "Labels JSON (instead of --dataset)");
  ev->add_option("--patterns", ev_patterns, "Patterns JSON (instead of --dataset)");
  auto* ev_tr_opt = ev->add_option("--tracks", ev_tracks, "Tracks JSON");
  ev->add_option("--curve", ev_curve, "Curve JSON; every point is run on --dataset")
      ->excludes(ev_tr_opt);
  ev->add_option("--out", ev_out, "Report JSON (tracks) or curve CSV (curve)")->required();
  ev->callback([&] {
    action = [&] {
      if (!ev_tracks.empty()) {
        CountLabels labels;
        std::vector<SpatialPattern> patterns;
        if (!ev_ds.empty()) {
          const SyntheticDataset ds = load_dataset(ev_ds);
          labels = ds.labels();
          patterns = ds.patterns;
        } else if (!ev_labels.empty() && !ev_patterns.empty()) {
          labels = labels_from_json(read_json_file(ev_labels));
          patterns = patterns_from_json(read_json_file(ev_patterns));
        } else {
          throw CLI::ValidationError("eval needs --dataset or both --labels and --patterns");
        }
        const ClipTracks tracks = clip_tracks_from_json(read_json_file(ev_tracks));
        const double acc = count_accuracy(tracks, patterns, labels);
        Json per_clip = Json::object();
        for (const auto& [clip, ts] : tracks) {
          per_clip[clip] = Json{{"predicted", predict_counts(ts, patterns)},
                                {"truth", labels.at(clip)}};
        }
        write_json_file(ev_out, Json{{"accuracy", acc}, {"clips", std::move(per_clip)}});
        out << "accuracy " << fmt("%.4f", acc) << "\n";
      } else if (!ev_curve.empty()) {
        if (ev_ds.empty()) throw CLI::ValidationError("eval --curve needs --dataset");
        const SyntheticDataset ds = load_dataset(ev_ds);
        const PipelineModels models = load_models(ev_c, ev_m, frame_of(ds));
        std::vector<CurvePoint> points;
        for (const auto& p : curve_from_json(read_json_file(ev_curve))) {
          require_models(p.config, models);
          const PipelineResult r = run_pipeline(ds, p.config, models, ev_c.jobs);
          points.push_back({p.config, r.accuracy, r.runtime.total(), p.module});
        }
        write_text_file(ev_out, curve_to_csv(points));
        for (const auto& p : points) {
          out << "  " << fmt("%12.1f", p.runtime) << "  " << fmt("%.4f", p.accuracy) << "  "
              << p.config.id() << "\n";
        }
      } else {
        throw CLI::ValidationError("eval needs --tracks or --curve");
      }
    };
  });

  // query --------------------------------------------------------------------
  auto* qu = app.add_subcommand("query", "Queries over extracted tracks");
  qu->require_subcommand(1);
  Common ql_c;
  std::string ql_tracks, ql_region, ql_out;
  LimitQuery ql_q;
  auto* ql = qu->add_subcommand("limit", "Frames with at least N tracks in a region");
  add_common(ql, ql_c);
  ql->add_option("--tracks", ql_tracks, "Tracks JSON")->required();
  ql->add_option("--region", ql_region, "Axis-aligned region x0,y0,x1,y1")->required();
  ql->add_option("--min-count", ql_q.min_count, "Minimum tracks in region")->capture_default_str();
  ql->add_option("--spacing", ql_q.spacing, "Minimum frames between results")
      ->capture_default_str();
  ql->add_option("--limit", ql_q.limit, "Maximum results per clip")->capture_default_str();
  ql->add_option("--out", ql_out, "Result JSON {clip: [frames]}")->required();
  ql->callback([&] {
    action = [&] {
      ql_q.region = parse_region(ql_region);
      const ClipTracks tracks = clip_tracks_from_json(read_json_file(ql_tracks));
      Json result = Json::object();
      size_t total = 0;
      for (const auto& [clip, ts] : tracks) {
        const auto frames = limit_query(ts, ql_q);
        total += frames.size();
        result[clip] = frames;
      }
      write_json_file(ql_out, result);
      out << total << " frames across " << tracks.size() << " clips\n";
    };
  });

  std::vector<std::string> argv_storage{"scopeflow"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const UnknownConfig& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnknownConfig;
  } catch (const MissingModel& e) {
    err << "error: missing prerequisite: " << e.what() << "\n";
    return kExitMissingPrerequisite;
  } catch (const CacheMissing& e) {
    err << "error: missing prerequisite: " << e.what() << "\n";
    return kExitMissingPrerequisite;
  } catch (const MissingLabels& e) {
    err << "error: missing prerequisite: " << e.what() << "\n";
    return kExitMissingPrerequisite;
  } catch (const InvalidData& e) {
    err << "error: invalid data: " << e.what() << "\n";
    return kExitInvalidData;
  } catch (const MissingCostEntry& e) {
    err << "error: invalid data: " << e.what() << "\n";
    return kExitInvalidData;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid data: " << e.what() << "\n";
    return kExitInvalidData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace scopeflow

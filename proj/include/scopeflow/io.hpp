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

// JSON/CSV file formats. Every reader validates what it loads and throws
// InvalidData with the offending field named; missing or unreadable files
// raise FileError.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "scopeflow/pipeline.hpp"
#include "scopeflow/tuner.hpp"

namespace scopeflow {

using Json = nlohmann::ordered_json;

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json_file(const std::string& path);
// Two-space indented, trailing newline.
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

Json to_json(const Detection& d);
Detection detection_from_json(const Json& j);
Json to_json(const Track& t);
Track track_from_json(const Json& j);
Json tracks_to_json(const std::vector<Track>& tracks);
std::vector<Track> tracks_from_json(const Json& j);

// {clip_id: [tracks]}
using ClipTracks = std::map<std::string, std::vector<Track>>;
Json clip_tracks_to_json(const ClipTracks& tracks);
ClipTracks clip_tracks_from_json(const Json& j);

Json to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const Json& j);

Json to_json(const SpatialPattern& p);
Json patterns_to_json(const std::vector<SpatialPattern>& patterns);
std::vector<SpatialPattern> patterns_from_json(const Json& j);

Json labels_to_json(const CountLabels& labels);
CountLabels labels_from_json(const Json& j);

Json to_json(const SyntheticDataset& ds);
SyntheticDataset dataset_from_json(const Json& j);

Json to_json(const SimConfig& sim);
SimConfig sim_config_from_json(const Json& j);

Json to_json(const Configuration& c);
Configuration configuration_from_json(const Json& j);

Json to_json(const LogisticScorer& scorer, const TrainReport& report);
LogisticScorer scorer_from_json(const Json& j);

Json to_json(const RefinementModel& model);
RefinementModel refinement_from_json(const Json& j);

Json to_json(const WindowSizeSet& sizes);
WindowSizeSet window_sizes_from_json(const Json& j);
Json to_json(const WindowPlan& plan);

Json to_json(const DetectionCache& cache);
DetectionCache detection_cache_from_json(const Json& j);

Json to_json(const RuntimeBreakdown& r);
Json curve_to_json(const std::vector<CurvePoint>& curve, int trials);
std::vector<CurvePoint> curve_from_json(const Json& j);
// Header "runtime,accuracy,config_id".
std::string curve_to_csv(const std::vector<CurvePoint>& curve);

}  // namespace scopeflow

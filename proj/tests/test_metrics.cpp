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

#include "scopeflow/metrics.hpp"
#include "test_util.hpp"

namespace scopeflow {
namespace {

using testing::line_track;

SpatialPattern west_to_east() {
  return {"w2e", rectangle_polygon(0, 0, 50, 100), rectangle_polygon(250, 0, 300, 100)};
}

TEST(PointInPolygon, InsideOutsideAndEdges) {
  const Polygon sq = rectangle_polygon(0, 0, 10, 10);
  EXPECT_TRUE(point_in_polygon({5, 5}, sq));
  EXPECT_FALSE(point_in_polygon({15, 5}, sq));
  EXPECT_TRUE(point_in_polygon({0, 5}, sq));
  EXPECT_TRUE(point_in_polygon({10, 10}, sq));
  EXPECT_TRUE(point_in_polygon({5, 10}, sq));
  EXPECT_FALSE(point_in_polygon({10.001, 10}, sq));
}

TEST(PointInPolygon, ConcaveEvenOdd) {
  // U shape: notch between x in (3,7), y < 7.
  const Polygon u{{0, 0}, {3, 0}, {3, 7}, {7, 7}, {7, 0}, {10, 0}, {10, 10}, {0, 10}};
  EXPECT_TRUE(point_in_polygon({1, 1}, u));
  EXPECT_FALSE(point_in_polygon({5, 3}, u));
  EXPECT_TRUE(point_in_polygon({5, 8}, u));
}

TEST(MatchPattern, DirectionMatters) {
  const Track forward = line_track({20, 50}, {280, 50}, 10);
  const Track backward = line_track({280, 50}, {20, 50}, 10);
  EXPECT_TRUE(match_pattern(forward, west_to_east()));
  EXPECT_FALSE(match_pattern(backward, west_to_east()));
  EXPECT_TRUE(match_pattern(line_track({50, 100}, {250, 0}, 5), west_to_east()));  // corners
}

TEST(CountAgreement, Formula) {
  EXPECT_DOUBLE_EQ(count_agreement(7, 10), 0.7);
  EXPECT_DOUBLE_EQ(count_agreement(13, 10), 0.7);
  EXPECT_DOUBLE_EQ(count_agreement(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(count_agreement(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(count_agreement(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(count_agreement(30, 10), 0.0);
}

TEST(CountAccuracy, PerfectAndMeanOfMeans) {
  const CountLabels truth{{"a", {{"p", 10}, {"q", 4}}}, {"b", {{"p", 0}, {"q", 2}}}};
  EXPECT_DOUBLE_EQ(count_accuracy_from_counts(truth, truth), 1.0);
  const CountLabels pred{{"a", {{"p", 7}, {"q", 4}}}, {"b", {{"p", 0}, {"q", 1}}}};
  EXPECT_DOUBLE_EQ(count_accuracy_from_counts(pred, truth), ((0.7 + 1.0) / 2 + (1.0 + 0.5) / 2) / 2);
}

TEST(CountAccuracy, FromTracks) {
  const std::vector<SpatialPattern> patterns{west_to_east()};
  std::map<std::string, std::vector<Track>> tracks;
  tracks["c0"] = {line_track({20, 50}, {280, 50}, 10), line_track({280, 50}, {20, 50}, 10)};
  EXPECT_DOUBLE_EQ(count_accuracy(tracks, patterns, {{"c0", {{"w2e", 1}}}}), 1.0);
  EXPECT_DOUBLE_EQ(count_accuracy(tracks, patterns, {{"c0", {{"w2e", 2}}}}), 0.5);
}

TEST(CountAccuracy, MissingLabelsThrow) {
  const CountLabels truth{{"a", {{"p", 1}}}};
  EXPECT_THROW(count_accuracy_from_counts({{"zzz", {{"p", 1}}}}, truth), MissingLabels);
  EXPECT_THROW(count_accuracy_from_counts({}, truth), MissingLabels);
}

TEST(CountAccuracy, PropertyBoundedAndExactIffEqual) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    CountLabels truth, pred;
    bool equal = true;
    for (int c = 0; c < 3; ++c) {
      for (int p = 0; p < 3; ++p) {
        const std::string clip = "c" + std::to_string(c), pat = "p" + std::to_string(p);
        const int t = testing::uniform_int(rng, 0, 6);
        const int q = uniform01(rng) < 0.8 ? t : testing::uniform_int(rng, 0, 6);
        truth[clip][pat] = t;
        pred[clip][pat] = q;
        equal &= t == q;
      }
    }
    const double acc = count_accuracy_from_counts(pred, truth);
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
    EXPECT_EQ(acc == 1.0, equal);
  }
}

// Exhaustive scan over every frame of the clip.
std::vector<int> limit_oracle(const std::vector<Track>& tracks, const LimitQuery& q, int frames) {
  std::vector<std::tuple<int, int>> candidates;  // (-min duration, frame)
  for (int f = 0; f < frames; ++f) {
    int count = 0;
    int min_dur = 1 << 30;
    for (const auto& t : tracks) {
      if (t.detections.size() < 2) continue;
      for (const auto& d : t.detections) {
        if (d.frame == f && point_in_polygon(d.center(), q.region)) {
          ++count;
          min_dur = std::min(min_dur, t.last().frame - t.first().frame);
        }
      }
    }
    if (count >= q.min_count) candidates.emplace_back(-min_dur, f);
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<int> out;
  for (const auto& [neg, f] : candidates) {
    if (static_cast<int>(out.size()) == q.limit) break;
    bool ok = true;
    for (int g : out) ok &= std::abs(g - f) >= q.spacing;
    if (ok) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Track> random_tracks(Rng& rng, int n, int frames) {
  std::vector<Track> out;
  for (int i = 0; i < n; ++i) {
    const int len = testing::uniform_int(rng, 1, 80);
    const int start = testing::uniform_int(rng, 0, frames - len);
    const Point2 a{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    const Point2 b{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    Track t = line_track(a, b, len, i, start);
    // Thin out some detections, as a reduced-rate tracker would.
    if (uniform01(rng) < 0.5 && t.detections.size() > 2) {
      std::vector<Detection> kept;
      for (size_t k = 0; k < t.detections.size(); k += 3) kept.push_back(t.detections[k]);
      t.detections = kept;
    }
    out.push_back(t);
  }
  return out;
}

TEST(LimitQuery, NothingQualifies) {
  LimitQuery q;
  q.region = rectangle_polygon(0, 0, 640, 352);
  EXPECT_TRUE(limit_query({line_track({0, 0}, {10, 10}, 5)}, q).empty());
}

TEST(LimitQuery, IgnoresSingleDetectionTracks) {
  LimitQuery q;
  q.region = rectangle_polygon(0, 0, 640, 352);
  q.min_count = 2;
  const std::vector<Track> tracks{line_track({5, 5}, {5, 5}, 1, 0, 3),
                                  line_track({9, 9}, {10, 10}, 5, 1, 0)};
  EXPECT_TRUE(limit_query(tracks, q).empty());
}

TEST(LimitQuery, PropertyMatchesFullScan) {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tracks = random_tracks(rng, testing::uniform_int(rng, 0, 30), 300);
    LimitQuery q;
    const double y0 = testing::uniform(rng, 0, 200);
    q.region = rectangle_polygon(0, y0, 640, y0 + testing::uniform(rng, 50, 352));
    q.min_count = testing::uniform_int(rng, 1, 5);
    q.spacing = testing::uniform_int(rng, 1, 60);
    q.limit = testing::uniform_int(rng, 1, 20);
    const auto got = limit_query(tracks, q);
    EXPECT_EQ(got, limit_oracle(tracks, q, 300));
    EXPECT_LE(static_cast<int>(got.size()), q.limit);
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    for (size_t i = 1; i < got.size(); ++i) EXPECT_GE(got[i] - got[i - 1], q.spacing);
  }
}

}  // namespace
}  // namespace scopeflow

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

#include "scopeflow/refinement.hpp"
#include "test_util.hpp"

namespace scopeflow {
namespace {

using testing::line_track;
using testing::track_through;

const WindowSize kFrame{640, 352};

TEST(TrackDistance, IdenticalIsZero) {
  const Track t = track_through({{0, 0}, {30, 10}, {50, 60}});
  EXPECT_EQ(track_distance(t, t), 0.0);
}

TEST(TrackDistance, ParallelOffset) {
  const Track a = line_track({0, 0}, {200, 0}, 17);
  const Track b = line_track({0, 5}, {200, 5}, 9);
  EXPECT_NEAR(track_distance(a, b), 5.0, 1e-12);
}

TEST(TrackDistance, DirectSummation) {
  const Track a = track_through({{0, 0}, {100, 0}, {100, 100}});
  const Track b = track_through({{10, 10}, {60, 80}});
  // a walks 200 px over an L; b is a straight 86.02 px line.
  double sum = 0.0;
  const double lb = std::hypot(50.0, 70.0);
  for (int i = 0; i < 20; ++i) {
    const double s = 200.0 * i / 19.0;
    const Point2 pa = s <= 100 ? Point2{s, 0} : Point2{100, s - 100};
    const double u = lb * i / 19.0 / lb;
    const Point2 pb{10 + 50 * u, 10 + 70 * u};
    sum += std::hypot(pa.x - pb.x, pa.y - pb.y);
  }
  EXPECT_NEAR(track_distance(a, b), sum / 20.0, 1e-9);
}

TEST(TrackDistance, PropertySymmetricNonNegative) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> pa, pb;
    for (int i = 0; i < testing::uniform_int(rng, 2, 6); ++i) {
      pa.push_back({testing::uniform(rng, 0, 600), testing::uniform(rng, 0, 300)});
    }
    for (int i = 0; i < testing::uniform_int(rng, 2, 6); ++i) {
      pb.push_back({testing::uniform(rng, 0, 600), testing::uniform(rng, 0, 300)});
    }
    const double d = track_distance(track_through(pa), track_through(pb));
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, track_distance(track_through(pb), track_through(pa)), 1e-9);
  }
}

TEST(TrackDistance, ShortTrackThrows) {
  EXPECT_THROW(track_distance(track_through({{0, 0}}), track_through({{0, 0}, {1, 1}})),
               UnrefinableTrack);
}

Path path_of(const Track& t) { return resample_path(t, kPathPoints); }

TEST(Dbscan, OneTrackIsOneCluster) {
  const std::vector<Path> p{path_of(line_track({0, 0}, {100, 0}, 5))};
  const DbscanResult db = dbscan(p, 10.0, 2);
  const auto clusters = build_clusters(p, db);
  EXPECT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].member_count, 1);
}

TEST(Dbscan, TwoSeparatedGroups) {
  std::vector<Path> p;
  for (int i = 0; i < 4; ++i) p.push_back(path_of(line_track({0, i * 1.0}, {300, i * 1.0}, 10)));
  for (int i = 0; i < 3; ++i) {
    p.push_back(path_of(line_track({0, 200 + i * 1.0}, {300, 250 + i * 1.0}, 10)));
  }
  const DbscanResult db = dbscan(p, 10.0, 2);
  EXPECT_EQ(db.cluster_count, 2);
  EXPECT_EQ(db.labels, (std::vector<int>{0, 0, 0, 0, 1, 1, 1}));
}

// Textbook DBSCAN over an explicit seed set, distances from whole tracks.
std::vector<int> reference_dbscan(const std::vector<Track>& tracks, double eps, int min_pts) {
  const int n = static_cast<int>(tracks.size());
  auto range = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j) {
      if (track_distance(tracks[i], tracks[j]) <= eps) out.push_back(j);
    }
    return out;
  };
  const int undefined = -2, noise = -1;
  std::vector<int> label(n, undefined);
  int c = 0;
  for (int p = 0; p < n; ++p) {
    if (label[p] != undefined) continue;
    const auto nb = range(p);
    if (static_cast<int>(nb.size()) < min_pts) {
      label[p] = noise;
      continue;
    }
    label[p] = c;
    std::vector<int> seeds;
    for (int q : nb) {
      if (q != p) seeds.push_back(q);
    }
    for (size_t k = 0; k < seeds.size(); ++k) {
      const int q = seeds[k];
      if (label[q] == noise) label[q] = c;
      if (label[q] != undefined) continue;
      label[q] = c;
      const auto nq = range(q);
      if (static_cast<int>(nq.size()) >= min_pts) {
        for (int r : nq) {
          if (std::find(seeds.begin(), seeds.end(), r) == seeds.end()) seeds.push_back(r);
        }
      }
    }
    ++c;
  }
  return label;
}

TEST(Dbscan, PropertyMatchesReference) {
  Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = testing::uniform_int(rng, 1, 40);
    // A few route templates plus jitter so that clusters, borders and noise all occur.
    std::vector<std::pair<Point2, Point2>> routes;
    for (int r = 0; r < 4; ++r) {
      routes.push_back({{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)},
                        {testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)}});
    }
    std::vector<Track> tracks;
    for (int i = 0; i < n; ++i) {
      const auto& [a, b] = routes[static_cast<size_t>(testing::uniform_int(rng, 0, 3))];
      const double jitter = uniform01(rng) < 0.2 ? 60.0 : 12.0;
      const Point2 a2{a.x + testing::uniform(rng, -jitter, jitter),
                      a.y + testing::uniform(rng, -jitter, jitter)};
      const Point2 b2{b.x + testing::uniform(rng, -jitter, jitter),
                      b.y + testing::uniform(rng, -jitter, jitter)};
      tracks.push_back(line_track(a2, b2, testing::uniform_int(rng, 2, 12), i));
    }
    std::vector<Path> paths;
    for (const auto& t : tracks) paths.push_back(path_of(t));
    const double eps = testing::uniform(rng, 5, 30);
    const int min_pts = testing::uniform_int(rng, 1, 4);
    const DbscanResult db = dbscan(paths, eps, min_pts);
    const auto want = reference_dbscan(tracks, eps, min_pts);
    EXPECT_EQ(db.labels, want);
    EXPECT_EQ(db.cluster_count, want.empty() ? 0 : *std::max_element(want.begin(), want.end()) + 1);
  }
}

TEST(Dbscan, NonPositiveEpsThrows) {
  EXPECT_THROW(dbscan({}, 0.0, 2), std::invalid_argument);
}

TEST(ClusterCenter, SingleMember) {
  const Path p = path_of(track_through({{0, 0}, {40, 10}, {80, 80}}));
  EXPECT_EQ(cluster_center({p}), p);
}

TEST(ClusterCenter, MirroredTracksGiveMidline) {
  const Path a = path_of(line_track({0, 10}, {100, 10}, 5));
  const Path b = path_of(line_track({0, -10}, {100, -10}, 5));
  for (const auto& p : cluster_center({a, b})) EXPECT_NEAR(p.y, 0.0, 1e-12);
}

TEST(ClusterCenter, PointwiseMean) {
  const std::vector<Path> m{path_of(track_through({{0, 0}, {30, 0}})),
                            path_of(track_through({{0, 3}, {0, 30}})),
                            path_of(track_through({{9, 9}, {9, 39}, {39, 39}}))};
  const Path c = cluster_center(m);
  ASSERT_EQ(c.size(), static_cast<size_t>(kPathPoints));
  for (size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c[i].x, (m[0][i].x + m[1][i].x + m[2][i].x) / 3.0, 1e-12);
    EXPECT_NEAR(c[i].y, (m[0][i].y + m[1][i].y + m[2][i].y) / 3.0, 1e-12);
  }
}

TEST(BuildClusters, PartitionWithNoiseSingletons) {
  Rng rng(8);
  std::vector<Path> paths;
  for (int i = 0; i < 25; ++i) {
    paths.push_back(path_of(line_track({testing::uniform(rng, 0, 100), 0},
                                       {testing::uniform(rng, 0, 100), 300}, 6)));
  }
  const DbscanResult db = dbscan(paths, 12.0, 3);
  const auto clusters = build_clusters(paths, db);
  int members = 0;
  int noise = 0;
  for (int l : db.labels) noise += l < 0 ? 1 : 0;
  for (size_t i = 0; i < clusters.size(); ++i) {
    EXPECT_EQ(clusters[i].id, static_cast<int>(i));
    members += clusters[i].member_count;
  }
  EXPECT_EQ(members, 25);
  EXPECT_EQ(static_cast<int>(clusters.size()), db.cluster_count + noise);
}

// Cells whose closed square meets the segment (Liang-Barsky clip per cell).
std::set<std::pair<int, int>> segment_oracle(Point2 a, Point2 b, double cs) {
  std::set<std::pair<int, int>> out;
  const int c0 = static_cast<int>(std::floor(std::min(a.x, b.x) / cs)) - 1;
  const int c1 = static_cast<int>(std::floor(std::max(a.x, b.x) / cs)) + 1;
  const int r0 = static_cast<int>(std::floor(std::min(a.y, b.y) / cs)) - 1;
  const int r1 = static_cast<int>(std::floor(std::max(a.y, b.y) / cs)) + 1;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      double t0 = 0.0, t1 = 1.0;
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double p[] = {-dx, dx, -dy, dy};
      const double q[] = {a.x - c * cs, (c + 1) * cs - a.x, a.y - r * cs, (r + 1) * cs - a.y};
      bool hit = true;
      for (int k = 0; k < 4 && hit; ++k) {
        if (p[k] == 0) {
          hit = q[k] >= 0;
        } else {
          const double t = q[k] / p[k];
          if (p[k] < 0) t0 = std::max(t0, t);
          else t1 = std::min(t1, t);
        }
      }
      if (hit && t0 <= t1) out.insert({c, r});
    }
  }
  return out;
}

TEST(SegmentCells, PropertyMatchesClipOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const Point2 a{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    Point2 b{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    if (trial % 4 == 0) b = {a.x + testing::uniform(rng, -40, 40), a.y};  // horizontal
    const auto got = segment_cells(a, b, 32.0);
    const std::set<std::pair<int, int>> got_set(got.begin(), got.end());
    EXPECT_EQ(got_set.size(), got.size());
    EXPECT_EQ(got_set, segment_oracle(a, b, 32.0));
  }
}

TEST(PathGridIndex, NearFindsNeighborhood) {
  TrackCluster c;
  c.id = 4;
  c.center = path_of(line_track({16, 16}, {300, 16}, 10));
  const PathGridIndex idx({c});
  EXPECT_EQ(idx.near({40, 60}), std::vector<int>{4});   // one row below
  EXPECT_TRUE(idx.near({40, 110}).empty());             // three rows below
  EXPECT_TRUE(PathGridIndex().empty());
}

TEST(WeightedMedian, LowerMiddle) {
  EXPECT_EQ(weighted_median({{1.0, 1}, {2.0, 1}}), 1.0);
  EXPECT_EQ(weighted_median({{5.0, 1}, {1.0, 1}, {3.0, 1}}), 3.0);
  EXPECT_EQ(weighted_median({{1.0, 1}, {2.0, 5}, {9.0, 1}}), 2.0);
  EXPECT_EQ(weighted_median({{10.0, 3}, {0.0, 1}}), 10.0);
}

// Reference tracks along one straight route, with a little lateral spread.
std::vector<Track> route_tracks(Point2 a, Point2 b, int n, int first_id) {
  std::vector<Track> out;
  for (int i = 0; i < n; ++i) {
    const double off = (i - n / 2) * 1.5;
    out.push_back(line_track({a.x, a.y + off}, {b.x, b.y + off}, 60, first_id + i));
  }
  return out;
}

Track middle_half(const Track& t) {
  Track out = t;
  const size_t n = t.detections.size();
  out.detections.assign(t.detections.begin() + static_cast<long>(n / 4),
                        t.detections.begin() + static_cast<long>(n - n / 4));
  return out;
}

TEST(Refine, EmptyIndexLeavesTrack) {
  const Track t = line_track({100, 100}, {200, 100}, 10, 0, 20);
  const RefineResult r = refine(t, RefinementModel{}, 300);
  EXPECT_TRUE(r.no_candidates);
  EXPECT_EQ(r.track, t);
}

TEST(Refine, TruncatedTrackRecoversEndpoints) {
  auto ref = route_tracks({20, 60}, {620, 300}, 12, 0);
  auto other = route_tracks({620, 40}, {40, 40}, 12, 100);
  ref.insert(ref.end(), other.begin(), other.end());
  const RefinementModel model = build_refinement(ref, kFrame);
  ASSERT_GE(model.clusters.size(), 2u);
  for (const Track& full : {ref[3], ref[15]}) {
    Track cut = middle_half(full);
    for (auto& d : cut.detections) d.frame += 100;
    const RefineResult r = refine(cut, model, 400);
    EXPECT_TRUE(r.extended_start);
    EXPECT_TRUE(r.extended_end);
    EXPECT_LE(distance(r.track.first().center(), full.first().center()), 32.0);
    EXPECT_LE(distance(r.track.last().center(), full.last().center()), 32.0);
    // Interior untouched.
    ASSERT_EQ(r.track.detections.size(), cut.detections.size() + 2);
    for (size_t i = 0; i < cut.detections.size(); ++i) {
      EXPECT_EQ(r.track.detections[i + 1], cut.detections[i]);
    }
    validate_track(r.track);
  }
}

TEST(Refine, FullLengthTrackMovesLittle) {
  const auto ref = route_tracks({20, 60}, {620, 300}, 12, 0);
  const RefinementModel model = build_refinement(ref, kFrame);
  Track t = ref[5];
  for (auto& d : t.detections) d.frame += 50;
  const RefineResult r = refine(t, model, 400);
  EXPECT_LE(distance(r.track.first().center(), t.first().center()), 32.0);
  EXPECT_LE(distance(r.track.last().center(), t.last().center()), 32.0);
}

TEST(Refine, SingleCandidateUsesCenterExactly) {
  const auto ref = route_tracks({20, 60}, {620, 60}, 3, 0);
  RefinementOptions o;
  o.min_pts = 2;
  const RefinementModel model = build_refinement(ref, kFrame, o);
  ASSERT_EQ(model.clusters.size(), 1u);
  Track cut = middle_half(ref[1]);
  for (auto& d : cut.detections) d.frame += 40;
  const RefineResult r = refine(cut, model, 400);
  ASSERT_TRUE(r.extended_start);
  EXPECT_EQ(r.track.first().center(), model.clusters[0].center.front());
  EXPECT_EQ(r.track.last().center(), model.clusters[0].center.back());
}

TEST(Refine, ClampsToClipBounds) {
  const auto ref = route_tracks({20, 60}, {620, 60}, 3, 0);
  const RefinementModel model = build_refinement(ref, kFrame);
  // Starts at frame 0: nothing may be prepended.
  const Track cut = middle_half(ref[1]);
  Track shifted = cut;
  for (auto& d : shifted.detections) d.frame -= cut.first().frame;
  const int len = shifted.last().frame + 3;
  const RefineResult r = refine(shifted, model, len);
  EXPECT_FALSE(r.extended_start);
  ASSERT_TRUE(r.extended_end);
  EXPECT_LE(r.track.last().frame, len - 1);
  EXPECT_EQ(r.track.detections.size(), shifted.detections.size() + 1);
}

TEST(Refine, PropertyCountAndInterior) {
  Rng rng(91);
  std::vector<Track> ref;
  for (int r = 0; r < 5; ++r) {
    const Point2 a{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    const Point2 b{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    auto t = route_tracks(a, b, 6, r * 10);
    ref.insert(ref.end(), t.begin(), t.end());
  }
  const RefinementModel model = build_refinement(ref, kFrame);
  for (int trial = 0; trial < 100; ++trial) {
    const Point2 a{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    const Point2 b{testing::uniform(rng, 0, 640), testing::uniform(rng, 0, 352)};
    const int start = testing::uniform_int(rng, 0, 100);
    const Track t = line_track(a, b, testing::uniform_int(rng, 2, 30), 0, start);
    const RefineResult r = refine(t, model, 300);
    const size_t added = r.track.detections.size() - t.detections.size();
    EXPECT_LE(added, 2u);
    EXPECT_EQ(added, static_cast<size_t>(r.extended_start) + static_cast<size_t>(r.extended_end));
    const size_t off = r.extended_start ? 1 : 0;
    for (size_t i = 0; i < t.detections.size(); ++i) {
      EXPECT_EQ(r.track.detections[i + off], t.detections[i]);
    }
    validate_track(r.track);
    EXPECT_GE(r.track.first().frame, 0);
    EXPECT_LE(r.track.last().frame, 299);
  }
}

}  // namespace
}  // namespace scopeflow

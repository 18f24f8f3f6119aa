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

#include "scopeflow/hungarian.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace scopeflow {

namespace {

Matching finish(const ScoreMatrix& scores, std::vector<int> col_of_row, double floor) {
  Matching m;
  std::vector<bool> col_used(static_cast<size_t>(scores.cols()), false);
  for (int r = 0; r < scores.rows(); ++r) {
    const int c = col_of_row[r];
    if (c >= 0 && scores(r, c) >= floor) {
      m.pairs.emplace_back(r, c);
      col_used[c] = true;
    } else {
      m.unmatched_rows.push_back(r);
    }
  }
  for (int c = 0; c < scores.cols(); ++c) {
    if (!col_used[c]) m.unmatched_cols.push_back(c);
  }
  return m;
}

}  // namespace

Matching hungarian(const ScoreMatrix& scores, double floor) {
  const int rows = scores.rows();
  const int cols = scores.cols();
  std::vector<int> col_of_row(static_cast<size_t>(rows), -1);
  if (rows == 0 || cols == 0) return finish(scores, col_of_row, floor);

  // Work on the orientation with n <= m, minimising negated scores.
  const bool transpose = rows > cols;
  const int n = transpose ? cols : rows;
  const int m = transpose ? rows : cols;
  auto cost = [&](int i, int j) { return transpose ? -scores(j, i) : -scores(i, j); };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transpose) {
      col_of_row[j - 1] = p[j] - 1;
    } else {
      col_of_row[p[j] - 1] = j - 1;
    }
  }
  return finish(scores, col_of_row, floor);
}

Matching greedy_match(const ScoreMatrix& scores, double floor) {
  std::vector<std::tuple<double, int, int>> entries;
  for (int r = 0; r < scores.rows(); ++r) {
    for (int c = 0; c < scores.cols(); ++c) {
      if (scores(r, c) >= floor) entries.emplace_back(scores(r, c), r, c);
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<int> col_of_row(static_cast<size_t>(scores.rows()), -1);
  std::vector<bool> col_used(static_cast<size_t>(scores.cols()), false);
  for (const auto& [s, r, c] : entries) {
    if (col_of_row[r] >= 0 || col_used[c]) continue;
    col_of_row[r] = c;
    col_used[c] = true;
  }
  return finish(scores, col_of_row, floor);
}

}  // namespace scopeflow

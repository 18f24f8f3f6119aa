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

#pragma once

#include <utility>
#include <vector>

namespace scopeflow {

// Dense row-major score matrix; rows are track prefixes, columns detections.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// Maximum-total-score assignment of min(rows, cols) pairs (O(n^3) shortest
// augmenting path with potentials); pairs scoring below `floor` are then
// released as unmatched.
Matching hungarian(const ScoreMatrix& scores, double floor);

// Greedy highest-score-first assignment with the same floor rule.
Matching greedy_match(const ScoreMatrix& scores, double floor);

}  // namespace scopeflow

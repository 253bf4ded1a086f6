// core/include/convsent/alignment.hpp
//
// Dynamic time warping between two feature sequences under three local
// distance metrics.

// Copyright 2026  Convsent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CONVSENT_ALIGNMENT_HPP_
#define CONVSENT_ALIGNMENT_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convsent/errors.hpp"
#include "convsent/features.hpp"

namespace convsent {

struct DimensionMismatch : Error {
  using Error::Error;
};

struct EmptySequence : Error {
  using Error::Error;
};

enum class DistanceMetric { Euclidean, Canberra, Correlation };

DistanceMetric parse_metric(const std::string& name);
const char* to_string(DistanceMetric metric);

struct DtwResult {
  double distance = 0.0;
  // Warping path from (0,0) to (n-1,m-1); each step advances i, j or both
  // by exactly 1.
  std::vector<std::pair<std::size_t, std::size_t>> path;
  // distance divided by the number of path entries.
  double normalized_distance = 0.0;
};

// Euclidean: sqrt(sum (a_i-b_i)^2).
// Canberra:  sum |a_i-b_i| / (|a_i|+|b_i|), 0/0 terms count as 0.
// Correlation: 1 - Pearson(a, b); zero-variance vectors give distance 1.
double local_distance(std::span<const double> a, std::span<const double> b,
                      DistanceMetric metric);

// Full-matrix DTW: D(i,j) = d(i,j) + min(D(i-1,j), D(i,j-1), D(i-1,j-1)),
// D(0,0) = d(0,0). Argmin ties prefer the diagonal, then (i-1,j), then
// (i,j-1), so paths are deterministic.
DtwResult dtw_distance(const MfccMatrix& seq_a, const MfccMatrix& seq_b,
                       DistanceMetric metric);

// Same recurrence restricted to the band |i*m/n - j| <= radius. The band is
// widened to max(radius, |n-m|) so the corner cells stay reachable; the
// result is always >= the exact DTW distance.
DtwResult windowed_dtw(const MfccMatrix& seq_a, const MfccMatrix& seq_b,
                       DistanceMetric metric, std::size_t radius);

}  // namespace convsent

#endif  // CONVSENT_ALIGNMENT_HPP_

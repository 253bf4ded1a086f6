// core/src/alignment.cpp

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

#include "convsent/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace convsent {

DistanceMetric parse_metric(const std::string& name) {
  if (name == "euclidean") return DistanceMetric::Euclidean;
  if (name == "canberra") return DistanceMetric::Canberra;
  if (name == "correlation") return DistanceMetric::Correlation;
  throw Error("unknown distance metric: " + name);
}

const char* to_string(DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::Euclidean:
      return "euclidean";
    case DistanceMetric::Canberra:
      return "canberra";
    case DistanceMetric::Correlation:
      return "correlation";
  }
  return "unknown";
}

double local_distance(std::span<const double> a, std::span<const double> b,
                      DistanceMetric metric) {
  if (a.size() != b.size() || a.empty())
    throw DimensionMismatch("vectors must share a dimension >= 1");
  switch (metric) {
    case DistanceMetric::Euclidean: {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    case DistanceMetric::Canberra: {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::abs(a[i]) + std::abs(b[i]);
        if (denom > 0.0) acc += std::abs(a[i] - b[i]) / denom;
      }
      return acc;
    }
    case DistanceMetric::Correlation: {
      const double n = static_cast<double>(a.size());
      double mean_a = 0.0, mean_b = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
      }
      mean_a /= n;
      mean_b /= n;
      double cov = 0.0, var_a = 0.0, var_b = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
      }
      if (var_a <= 0.0 || var_b <= 0.0) return 1.0;  // uncorrelated by convention
      const double pearson = cov / std::sqrt(var_a * var_b);
      return std::clamp(1.0 - pearson, 0.0, 2.0);
    }
  }
  throw Error("unreachable metric");
}

namespace {

enum class Step : std::uint8_t { None, Diagonal, Up, Left };

DtwResult run_dtw(const MfccMatrix& seq_a, const MfccMatrix& seq_b,
                  DistanceMetric metric, bool banded, std::size_t radius) {
  const std::size_t n = seq_a.n_frames();
  const std::size_t m = seq_b.n_frames();
  if (n == 0 || m == 0) throw EmptySequence("both sequences must be non-empty");
  if (seq_a.n_coeffs() != seq_b.n_coeffs())
    throw DimensionMismatch("sequences must share a coefficient dimension");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n * m, inf);
  std::vector<Step> from(n * m, Step::None);

  // Effective band radius: widened so the (n-1, m-1) corner stays inside
  // the band around the diagonal j = i*m/n.
  const std::size_t r =
      banded ? std::max(radius, n > m ? n - m : m - n)
             : std::max(n, m);

  for (std::size_t i = 0; i < n; ++i) {
    const double center = static_cast<double>(i) * static_cast<double>(m) /
                          static_cast<double>(n);
    const double lo_f = std::floor(center) - static_cast<double>(r);
    const std::size_t lo =
        lo_f <= 0.0 ? 0 : static_cast<std::size_t>(lo_f);
    const std::size_t hi = std::min(
        m - 1,
        static_cast<std::size_t>(std::ceil(center) + static_cast<double>(r)));
    for (std::size_t j = lo; j <= hi; ++j) {
      const double d =
          local_distance(seq_a.coeffs[i], seq_b.coeffs[j], metric);
      if (i == 0 && j == 0) {
        cost[0] = d;
        continue;
      }
      double best = inf;
      Step step = Step::None;
      if (i > 0 && j > 0 && cost[(i - 1) * m + (j - 1)] < best) {
        best = cost[(i - 1) * m + (j - 1)];
        step = Step::Diagonal;
      }
      if (i > 0 && cost[(i - 1) * m + j] < best) {
        best = cost[(i - 1) * m + j];
        step = Step::Up;
      }
      if (j > 0 && cost[i * m + (j - 1)] < best) {
        best = cost[i * m + (j - 1)];
        step = Step::Left;
      }
      if (step == Step::None) continue;  // unreachable band cell
      cost[i * m + j] = best + d;
      from[i * m + j] = step;
    }
  }

  DtwResult result;
  result.distance = cost[(n - 1) * m + (m - 1)];
  std::size_t i = n - 1, j = m - 1;
  result.path.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (from[i * m + j]) {
      case Step::Diagonal:
        --i;
        --j;
        break;
      case Step::Up:
        --i;
        break;
      case Step::Left:
        --j;
        break;
      case Step::None:
        throw Error("internal: broken DTW backtrace");
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  result.normalized_distance =
      result.distance / static_cast<double>(result.path.size());
  return result;
}

}  // namespace

DtwResult dtw_distance(const MfccMatrix& seq_a, const MfccMatrix& seq_b,
                       DistanceMetric metric) {
  return run_dtw(seq_a, seq_b, metric, /*banded=*/false, 0);
}

DtwResult windowed_dtw(const MfccMatrix& seq_a, const MfccMatrix& seq_b,
                       DistanceMetric metric, std::size_t radius) {
  return run_dtw(seq_a, seq_b, metric, /*banded=*/true, radius);
}

}  // namespace convsent

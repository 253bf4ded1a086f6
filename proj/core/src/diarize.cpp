// core/src/diarize.cpp

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

#include "convsent/diarize.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace convsent {

const char* to_string(Speaker speaker) {
  return speaker == Speaker::Speaker1 ? "Speaker1" : "Speaker2";
}

DistanceMatrix pairwise_distance_matrix(const std::vector<MfccMatrix>& features,
                                        DistanceMetric metric) {
  const std::size_t n = features.size();
  if (n < 2) throw TooFewChunks("need at least 2 chunks, got " + std::to_string(n));
  DistanceMatrix matrix;
  matrix.size = n;
  matrix.values.assign(n * n, 0.0);
  matrix.chunk_ids.reserve(n);
  for (const MfccMatrix& f : features) matrix.chunk_ids.push_back(f.chunk_id);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d =
          dtw_distance(features[i], features[j], metric).normalized_distance;
      matrix.values[i * n + j] = d;
      matrix.values[j * n + i] = d;
    }
  }
  return matrix;
}

SpeakerLabeling discriminate_speakers(const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size;
  if (n < 2) throw TooFewChunks("need at least 2 chunks, got " + std::to_string(n));

  // Exact 2-medoids: every pair (a, b) with a < b is a candidate; ascending
  // enumeration with a strict improvement test keeps the lexicographically
  // smallest minimizer.
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best_a = 0, best_b = 1;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == a || i == b) continue;  // medoids sit in their own cluster
        cost += std::min(matrix.at(i, a), matrix.at(i, b));
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_a = a;
        best_b = b;
      }
    }
  }

  std::vector<bool> in_cluster_a(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == best_a)
      in_cluster_a[i] = true;
    else if (i == best_b)
      in_cluster_a[i] = false;
    else
      in_cluster_a[i] = matrix.at(i, best_a) <= matrix.at(i, best_b);
  }

  // The cluster holding the temporally first chunk is Speaker1.
  const bool first_in_a = in_cluster_a[0];
  SpeakerLabeling labeling;
  labeling.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    labeling.labels.push_back(in_cluster_a[i] == first_in_a ? Speaker::Speaker1
                                                            : Speaker::Speaker2);
  }
  const std::size_t s1_medoid = first_in_a ? best_a : best_b;
  const std::size_t s2_medoid = first_in_a ? best_b : best_a;
  labeling.medoid_ids = {matrix.chunk_ids[s1_medoid], matrix.chunk_ids[s2_medoid]};
  labeling.total_cost = best_cost;
  return labeling;
}

SpeakerLabeling diarize_chunks(const std::vector<MfccMatrix>& features,
                               DistanceMetric metric) {
  return discriminate_speakers(pairwise_distance_matrix(features, metric));
}

double evaluate_speaker_accuracy(const SpeakerLabeling& predicted,
                                 const std::vector<Speaker>& reference) {
  if (predicted.labels.size() != reference.size())
    throw LengthMismatch("predicted and reference label counts differ");
  const std::size_t n = reference.size();
  if (n == 0) return 100.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (predicted.labels[i] == reference[i]) ++same;
  const std::size_t best = std::max(same, n - same);
  return 100.0 * static_cast<double>(best) / static_cast<double>(n);
}

std::vector<SweepPoint> feature_count_sweep(const std::vector<Chunk>& chunks,
                                            const std::vector<Speaker>& reference,
                                            DistanceMetric metric,
                                            const MfccConfig& cfg) {
  // One full-width computation; each sweep step truncates to the leading
  // coefficients (DCT coefficient k does not depend on how many are kept).
  MfccConfig full = cfg;
  full.n_mfcc = cfg.n_filters;
  std::vector<MfccMatrix> features;
  features.reserve(chunks.size());
  for (const Chunk& chunk : chunks) features.push_back(compute_mfcc(chunk, full));

  std::vector<SweepPoint> points;
  points.reserve(static_cast<std::size_t>(cfg.n_filters));
  std::vector<MfccMatrix> truncated = features;
  for (int n = 1; n <= cfg.n_filters; ++n) {
    for (std::size_t c = 0; c < features.size(); ++c) {
      for (std::size_t row = 0; row < features[c].coeffs.size(); ++row) {
        truncated[c].coeffs[row].assign(
            features[c].coeffs[row].begin(),
            features[c].coeffs[row].begin() + n);
      }
    }
    const SpeakerLabeling labeling = diarize_chunks(truncated, metric);
    points.push_back(SweepPoint{static_cast<std::size_t>(n),
                                evaluate_speaker_accuracy(labeling, reference)});
  }
  return points;
}

}  // namespace convsent

// core/include/convsent/diarize.hpp
//
// Unsupervised two-speaker diarization: pairwise DTW distances between
// chunk feature matrices, exact 2-medoids clustering, and the feature-count
// sweep used to pick the MFCC dimensionality.

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

#ifndef CONVSENT_DIARIZE_HPP_
#define CONVSENT_DIARIZE_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "convsent/alignment.hpp"
#include "convsent/audio.hpp"
#include "convsent/errors.hpp"
#include "convsent/features.hpp"

namespace convsent {

struct TooFewChunks : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

enum class Speaker { Speaker1 = 1, Speaker2 = 2 };

const char* to_string(Speaker speaker);

// Symmetric pairwise matrix of normalized DTW distances; diagonal is 0.
struct DistanceMatrix {
  std::size_t size = 0;
  std::vector<double> values;          // row-major, size*size entries
  std::vector<std::size_t> chunk_ids;  // id of the chunk behind each row

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

struct SpeakerLabeling {
  std::vector<Speaker> labels;  // one per chunk, chunk order
  std::pair<std::size_t, std::size_t> medoid_ids{0, 0};
  double total_cost = 0.0;
};

struct SweepPoint {
  std::size_t n_features = 0;
  double accuracy_percent = 0.0;
};

DistanceMatrix pairwise_distance_matrix(const std::vector<MfccMatrix>& features,
                                        DistanceMetric metric);

// Exact 2-medoids: evaluates every medoid pair (a, b) with a < b and keeps
// the lexicographically smallest pair attaining the minimum total cost.
// Non-medoid chunks join the nearer medoid (ties toward a); each medoid
// always joins its own cluster, so both clusters are non-empty. Speaker1 is
// the cluster containing chunk 0. Requires >= 2 chunks.
SpeakerLabeling discriminate_speakers(const DistanceMatrix& matrix);

SpeakerLabeling diarize_chunks(const std::vector<MfccMatrix>& features,
                               DistanceMetric metric);

// Percentage of positions whose predicted speaker matches the reference
// under the better of the two label permutations.
double evaluate_speaker_accuracy(const SpeakerLabeling& predicted,
                                 const std::vector<Speaker>& reference);

// Re-runs diarization with the leading n coefficients for every n in
// [1, cfg.n_filters], truncating one full-width MFCC computation rather
// than recomputing the features each time.
std::vector<SweepPoint> feature_count_sweep(const std::vector<Chunk>& chunks,
                                            const std::vector<Speaker>& reference,
                                            DistanceMetric metric,
                                            const MfccConfig& cfg);

}  // namespace convsent

#endif  // CONVSENT_DIARIZE_HPP_

// core/include/convsent/features.hpp
//
// Mel-frequency cepstral coefficients: mel scale, triangular filterbank,
// DCT-II and the per-chunk MFCC pipeline.

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

#ifndef CONVSENT_FEATURES_HPP_
#define CONVSENT_FEATURES_HPP_

#include <cstddef>
#include <vector>

#include "convsent/audio.hpp"
#include "convsent/errors.hpp"

namespace convsent {

struct InvalidConfig : Error {
  using Error::Error;
};

struct ChunkTooShort : Error {
  using Error::Error;
};

struct InvalidLength : Error {
  using Error::Error;
};

struct NegativeFrequency : Error {
  using Error::Error;
};

struct NegativeMel : Error {
  using Error::Error;
};

struct MfccConfig {
  int n_mfcc = 13;
  int n_filters = 26;
  int fft_size = 512;  // power of two, >= frame length in samples
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  double fmin_hz = 300.0;
  double fmax_hz = 5000.0;
  double pre_emphasis = 0.97;
  double log_floor = 1e-10;

  std::size_t frame_len_samples(int sample_rate_hz) const;
  std::size_t hop_samples(int sample_rate_hz) const;
};

// Triangular filters on FFT power bins, centered uniformly on the mel scale.
struct MelFilterBank {
  // n_filters rows of fft_size/2 + 1 non-negative weights.
  std::vector<std::vector<double>> weights;
  std::vector<double> center_hz;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;
  int sample_rate_hz = 0;
};

// Feature sequence for one chunk: n_frames rows of n_mfcc coefficients.
struct MfccMatrix {
  std::vector<std::vector<double>> coeffs;
  std::size_t chunk_id = 0;

  std::size_t n_frames() const { return coeffs.size(); }
  std::size_t n_coeffs() const { return coeffs.empty() ? 0 : coeffs[0].size(); }
};

// m = 2595 * log10(1 + f/700). Linear below 1 kHz, logarithmic above.
double hz_to_mel(double f_hz);

// Exact inverse of hz_to_mel: f = 700 * (10^(m/2595) - 1).
double mel_to_hz(double mel);

// Places n_filters + 2 edge points uniformly between mel(fmin) and mel(fmax),
// maps them back to Hz and snaps them to FFT bins. Adjacent snapped edges must
// stay distinct, otherwise the configuration is rejected.
MelFilterBank build_mel_filterbank(const MfccConfig& cfg, int sample_rate_hz);

// Orthonormal DCT-II, first n_out coefficients.
std::vector<double> dct_ii(const std::vector<double>& v, std::size_t n_out);

// Linear (pre-log) filterbank energies, n_frames x n_filters. Exposed so the
// spectral stage can be inspected independently of the cepstral one.
std::vector<std::vector<double>> compute_filterbank_energies(
    const Chunk& chunk, const MfccConfig& cfg);

// Pre-emphasis -> framing -> Hamming window -> |DFT|^2 -> filterbank energies
// -> log (floored at cfg.log_floor) -> DCT-II, first n_mfcc coefficients.
MfccMatrix compute_mfcc(const Chunk& chunk, const MfccConfig& cfg);

}  // namespace convsent

#endif  // CONVSENT_FEATURES_HPP_

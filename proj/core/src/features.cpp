// core/src/features.cpp

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

#include "convsent/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace convsent {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_config(const MfccConfig& cfg, int sample_rate_hz) {
  if (sample_rate_hz <= 0) throw InvalidConfig("sample rate must be positive");
  if (cfg.n_filters < 1) throw InvalidConfig("n_filters must be >= 1");
  if (cfg.n_mfcc < 1 || cfg.n_mfcc > cfg.n_filters)
    throw InvalidConfig("n_mfcc must satisfy 1 <= n_mfcc <= n_filters");
  if (cfg.frame_ms <= 0.0 || cfg.hop_ms <= 0.0)
    throw InvalidConfig("frame_ms and hop_ms must be positive");
  if (cfg.fmin_hz < 0.0 || cfg.fmin_hz >= cfg.fmax_hz)
    throw InvalidConfig("need 0 <= fmin_hz < fmax_hz");
  if (cfg.fmax_hz > sample_rate_hz / 2.0)
    throw InvalidConfig("fmax_hz exceeds the Nyquist frequency");
  if (!is_power_of_two(cfg.fft_size))
    throw InvalidConfig("fft_size must be a power of two");
  if (static_cast<std::size_t>(cfg.fft_size) <
      cfg.frame_len_samples(sample_rate_hz))
    throw InvalidConfig("fft_size smaller than the frame length");
  if (cfg.log_floor <= 0.0) throw InvalidConfig("log_floor must be positive");
}

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> hamming_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi *
                                  static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

}  // namespace

std::size_t MfccConfig::frame_len_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(
      std::lround(frame_ms * sample_rate_hz / 1000.0));
}

std::size_t MfccConfig::hop_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(std::lround(hop_ms * sample_rate_hz / 1000.0));
}

double hz_to_mel(double f_hz) {
  if (f_hz < 0.0) throw NegativeFrequency("frequency must be non-negative");
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) {
  if (mel < 0.0) throw NegativeMel("mel value must be non-negative");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterBank build_mel_filterbank(const MfccConfig& cfg, int sample_rate_hz) {
  validate_config(cfg, sample_rate_hz);
  const std::size_t n_bins = static_cast<std::size_t>(cfg.fft_size) / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.fmax_hz);

  // n_filters + 2 edge points, uniform in mel, snapped to FFT bin indices.
  std::vector<std::size_t> edge_bins(static_cast<std::size_t>(cfg.n_filters) + 2);
  for (std::size_t p = 0; p < edge_bins.size(); ++p) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(p) /
                                    static_cast<double>(cfg.n_filters + 1);
    const double hz = mel_to_hz(mel);
    edge_bins[p] = static_cast<std::size_t>(
        std::floor(hz * cfg.fft_size / sample_rate_hz));
  }
  for (std::size_t p = 0; p + 1 < edge_bins.size(); ++p) {
    if (edge_bins[p] >= edge_bins[p + 1])
      throw InvalidConfig(
          "mel filter edges collide after FFT-bin snapping; increase fft_size "
          "or reduce n_filters");
  }

  MelFilterBank bank;
  bank.fmin_hz = cfg.fmin_hz;
  bank.fmax_hz = cfg.fmax_hz;
  bank.sample_rate_hz = sample_rate_hz;
  bank.weights.assign(static_cast<std::size_t>(cfg.n_filters),
                      std::vector<double>(n_bins, 0.0));
  bank.center_hz.resize(static_cast<std::size_t>(cfg.n_filters));
  for (int f = 0; f < cfg.n_filters; ++f) {
    const std::size_t left = edge_bins[static_cast<std::size_t>(f)];
    const std::size_t center = edge_bins[static_cast<std::size_t>(f) + 1];
    const std::size_t right = edge_bins[static_cast<std::size_t>(f) + 2];
    bank.center_hz[static_cast<std::size_t>(f)] =
        static_cast<double>(center) * sample_rate_hz / cfg.fft_size;
    auto& row = bank.weights[static_cast<std::size_t>(f)];
    for (std::size_t b = left + 1; b <= center; ++b)
      row[b] = static_cast<double>(b - left) / static_cast<double>(center - left);
    for (std::size_t b = center + 1; b < right; ++b)
      row[b] = static_cast<double>(right - b) / static_cast<double>(right - center);
  }
  return bank;
}

std::vector<double> dct_ii(const std::vector<double>& v, std::size_t n_out) {
  const std::size_t n = v.size();
  if (n == 0) throw InvalidLength("dct_ii input must be non-empty");
  if (n_out < 1 || n_out > n)
    throw InvalidLength("dct_ii needs 1 <= n_out <= input length");
  std::vector<double> out(n_out, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += v[i] * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                             static_cast<double>(k) / (2.0 * static_cast<double>(n)));
    }
    const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                : std::sqrt(2.0 / static_cast<double>(n));
    out[k] = scale * acc;
  }
  return out;
}

std::vector<std::vector<double>> compute_filterbank_energies(
    const Chunk& chunk, const MfccConfig& cfg) {
  validate_config(cfg, chunk.sample_rate_hz);
  const std::size_t frame_len = cfg.frame_len_samples(chunk.sample_rate_hz);
  const std::size_t hop = cfg.hop_samples(chunk.sample_rate_hz);
  if (chunk.samples.size() < frame_len)
    throw ChunkTooShort("chunk " + std::to_string(chunk.id) + " has " +
                        std::to_string(chunk.samples.size()) +
                        " samples, need " + std::to_string(frame_len));

  std::vector<double> emphasized(chunk.samples.size());
  emphasized[0] = chunk.samples[0];
  for (std::size_t i = 1; i < chunk.samples.size(); ++i)
    emphasized[i] = chunk.samples[i] - cfg.pre_emphasis * chunk.samples[i - 1];

  const MelFilterBank bank = build_mel_filterbank(cfg, chunk.sample_rate_hz);
  const std::vector<double> window = hamming_window(frame_len);
  const std::size_t n_frames = (emphasized.size() - frame_len) / hop + 1;
  const std::size_t n_bins = static_cast<std::size_t>(cfg.fft_size) / 2 + 1;

  std::vector<std::vector<double>> energies(
      n_frames, std::vector<double>(static_cast<std::size_t>(cfg.n_filters), 0.0));
  std::vector<std::complex<double>> buf;
  std::vector<double> power(n_bins);
  for (std::size_t k = 0; k < n_frames; ++k) {
    buf.assign(static_cast<std::size_t>(cfg.fft_size), {0.0, 0.0});
    for (std::size_t i = 0; i < frame_len; ++i)
      buf[i] = emphasized[k * hop + i] * window[i];
    fft_radix2(buf);
    for (std::size_t b = 0; b < n_bins; ++b) power[b] = std::norm(buf[b]);
    for (int f = 0; f < cfg.n_filters; ++f) {
      const auto& row = bank.weights[static_cast<std::size_t>(f)];
      double acc = 0.0;
      for (std::size_t b = 0; b < n_bins; ++b) acc += row[b] * power[b];
      energies[k][static_cast<std::size_t>(f)] = acc;
    }
  }
  return energies;
}

MfccMatrix compute_mfcc(const Chunk& chunk, const MfccConfig& cfg) {
  const std::vector<std::vector<double>> energies =
      compute_filterbank_energies(chunk, cfg);
  MfccMatrix mfcc;
  mfcc.chunk_id = chunk.id;
  mfcc.coeffs.reserve(energies.size());
  std::vector<double> log_energies(static_cast<std::size_t>(cfg.n_filters));
  for (const auto& frame : energies) {
    for (std::size_t f = 0; f < frame.size(); ++f)
      log_energies[f] = std::log(std::max(frame[f], cfg.log_floor));
    mfcc.coeffs.push_back(
        dct_ii(log_energies, static_cast<std::size_t>(cfg.n_mfcc)));
  }
  return mfcc;
}

}  // namespace convsent

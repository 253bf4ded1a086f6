// core/include/convsent/audio.hpp
//
// WAV loading, signal framing and energy-based voice activity detection.

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

#ifndef CONVSENT_AUDIO_HPP_
#define CONVSENT_AUDIO_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "convsent/errors.hpp"

namespace convsent {

// Input is not 16-bit linear PCM mono.
struct UnsupportedFormat : Error {
  using Error::Error;
};

// Truncated or malformed RIFF/WAVE container.
struct CorruptFile : Error {
  using Error::Error;
};

struct SpanOutOfRange : Error {
  using Error::Error;
};

// Mono signal with samples normalized to [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Fixed-length analysis windows. Trailing samples that do not fill a whole
// frame are discarded.
struct FrameSequence {
  std::vector<std::vector<double>> frames;
  std::size_t frame_len = 0;
  std::size_t hop = 0;
};

// Half-open sample range [start_sample, end_sample).
struct ChunkSpan {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;

  std::size_t length() const { return end_sample - start_sample; }
  bool operator==(const ChunkSpan&) const = default;
};

// One voiced segment. Ids are assigned 0..n-1 in temporal order.
struct Chunk {
  std::size_t id = 0;
  ChunkSpan span;
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  double start_s() const {
    return static_cast<double>(span.start_sample) / sample_rate_hz;
  }
  double end_s() const {
    return static_cast<double>(span.end_sample) / sample_rate_hz;
  }
};

struct VadConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  // A frame is voiced when its energy reaches this multiple of the noise
  // floor (10th percentile of all frame energies).
  double energy_threshold_factor = 3.0;
  double min_voiced_ms = 200.0;
  // Voiced runs separated by at most this many low-energy frames are merged.
  int hangover_frames = 5;
};

// Reads a RIFF/WAVE file holding 16-bit linear PCM mono. Samples are
// normalized to [-1, 1) by division by 32768.
AudioSignal load_wav(const std::string& path);

// Same contract as load_wav, operating on an in-memory container.
AudioSignal decode_wav(const std::vector<std::uint8_t>& bytes);

// Serializes to a 16-bit PCM mono WAV. decode_wav(encode_wav(s)) == s for
// signals whose samples came from 16-bit PCM.
std::vector<std::uint8_t> encode_wav(const AudioSignal& signal);
void write_wav(const AudioSignal& signal, const std::string& path);

// Frame k covers samples [k*hop, k*hop + frame_len). A signal shorter than
// frame_len yields zero frames.
FrameSequence frame_signal(const AudioSignal& signal, std::size_t frame_len,
                           std::size_t hop);

// Mean-square energy of each analysis frame under the cfg framing.
std::vector<double> frame_energies(const AudioSignal& signal,
                                   const VadConfig& cfg);

// factor times the 10th-percentile frame energy. Never below a small absolute
// floor, so digital silence is never voiced.
double energy_threshold(const std::vector<double>& energies, double factor);

// Returns disjoint voiced spans, sorted by start, each at least
// min_voiced_ms long.
std::vector<ChunkSpan> detect_voice_activity(const AudioSignal& signal,
                                             const VadConfig& cfg);

// Slices the signal at the given spans. Sample values are copied verbatim.
std::vector<Chunk> extract_chunks(const AudioSignal& signal,
                                  const std::vector<ChunkSpan>& spans);

}  // namespace convsent

#endif  // CONVSENT_AUDIO_HPP_

// core/src/audio.cpp

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

#include "convsent/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace convsent {

namespace {

constexpr double kMinEnergyThreshold = 1e-9;

std::uint16_t read_u16(const std::vector<std::uint8_t>& b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

void append_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

void append_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

bool chunk_id_is(const std::vector<std::uint8_t>& b, std::size_t off,
                 const char* id) {
  return std::memcmp(b.data() + off, id, 4) == 0;
}

}  // namespace

AudioSignal decode_wav(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) throw CorruptFile("file too small for a RIFF header");
  if (!chunk_id_is(bytes, 0, "RIFF")) throw CorruptFile("missing RIFF magic");
  if (!chunk_id_is(bytes, 8, "WAVE")) throw CorruptFile("missing WAVE form type");

  bool have_fmt = false;
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, off + 4);
    const std::size_t body = off + 8;
    if (body + size > bytes.size()) throw CorruptFile("chunk size exceeds file");
    if (chunk_id_is(bytes, off, "fmt ")) {
      if (size < 16) throw CorruptFile("fmt chunk too small");
      format_tag = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = read_u32(bytes, body + 4);
      bits_per_sample = read_u16(bytes, body + 14);
      have_fmt = true;
    } else if (chunk_id_is(bytes, off, "data")) {
      if (!have_fmt) throw CorruptFile("data chunk precedes fmt chunk");
      data = bytes.data() + body;
      data_size = size;
      break;
    }
    // Skip unknown chunks; RIFF pads odd-sized chunks to even offsets.
    off = body + size + (size % 2);
  }

  if (!have_fmt) throw CorruptFile("missing fmt chunk");
  if (data == nullptr) throw CorruptFile("missing data chunk");
  if (format_tag != 1) throw UnsupportedFormat("only linear PCM is supported");
  if (channels != 1) throw UnsupportedFormat("only mono input is supported");
  if (bits_per_sample != 16)
    throw UnsupportedFormat("only 16-bit samples are supported");
  if (sample_rate == 0) throw CorruptFile("zero sample rate");
  if (data_size % 2 != 0) throw CorruptFile("odd PCM data size");

  AudioSignal signal;
  signal.sample_rate_hz = static_cast<int>(sample_rate);
  signal.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    const std::uint16_t raw =
        static_cast<std::uint16_t>(data[2 * i] | (data[2 * i + 1] << 8));
    signal.samples[i] = static_cast<std::int16_t>(raw) / 32768.0;
  }
  return signal;
}

AudioSignal load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptFile("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioSignal& signal) {
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  append_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  append_u32(out, 16);
  append_u16(out, 1);  // linear PCM
  append_u16(out, 1);  // mono
  append_u32(out, static_cast<std::uint32_t>(signal.sample_rate_hz));
  append_u32(out, static_cast<std::uint32_t>(signal.sample_rate_hz) * 2);
  append_u16(out, 2);   // block align
  append_u16(out, 16);  // bits per sample
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  append_u32(out, data_size);
  for (const double s : signal.samples) {
    const double clamped = std::clamp(s, -1.0, 32767.0 / 32768.0);
    const auto q = static_cast<std::int16_t>(std::lrint(clamped * 32768.0));
    append_u16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

void write_wav(const AudioSignal& signal, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode_wav(signal);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorruptFile("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CorruptFile("short write to " + path);
}

FrameSequence frame_signal(const AudioSignal& signal, std::size_t frame_len,
                           std::size_t hop) {
  FrameSequence seq;
  seq.frame_len = frame_len;
  seq.hop = hop;
  const std::size_t n = signal.samples.size();
  if (frame_len == 0 || hop == 0 || n < frame_len) return seq;
  const std::size_t n_frames = (n - frame_len) / hop + 1;
  seq.frames.reserve(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const auto begin = signal.samples.begin() + static_cast<std::ptrdiff_t>(k * hop);
    seq.frames.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(frame_len));
  }
  return seq;
}

namespace {

std::size_t ms_to_samples(double ms, int sample_rate_hz) {
  return static_cast<std::size_t>(std::lround(ms * sample_rate_hz / 1000.0));
}

}  // namespace

std::vector<double> frame_energies(const AudioSignal& signal,
                                   const VadConfig& cfg) {
  const std::size_t frame_len = ms_to_samples(cfg.frame_ms, signal.sample_rate_hz);
  const std::size_t hop = ms_to_samples(cfg.hop_ms, signal.sample_rate_hz);
  const FrameSequence seq = frame_signal(signal, frame_len, hop);
  std::vector<double> energies;
  energies.reserve(seq.frames.size());
  for (const auto& frame : seq.frames) {
    double acc = 0.0;
    for (const double s : frame) acc += s * s;
    energies.push_back(acc / static_cast<double>(frame.size()));
  }
  return energies;
}

double energy_threshold(const std::vector<double>& energies, double factor) {
  if (energies.empty()) return kMinEnergyThreshold;
  std::vector<double> sorted = energies;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::floor(0.1 * static_cast<double>(sorted.size() - 1)));
  const double noise_floor = sorted[idx];
  return std::max(factor * noise_floor, kMinEnergyThreshold);
}

std::vector<ChunkSpan> detect_voice_activity(const AudioSignal& signal,
                                             const VadConfig& cfg) {
  const std::size_t frame_len = ms_to_samples(cfg.frame_ms, signal.sample_rate_hz);
  const std::size_t hop = ms_to_samples(cfg.hop_ms, signal.sample_rate_hz);
  const std::vector<double> energies = frame_energies(signal, cfg);
  if (energies.empty()) return {};

  const double threshold = energy_threshold(energies, cfg.energy_threshold_factor);
  std::vector<char> voiced(energies.size(), 0);
  for (std::size_t i = 0; i < energies.size(); ++i)
    voiced[i] = energies[i] >= threshold ? 1 : 0;

  // Morphological closing: bridge interior gaps of at most hangover_frames
  // low-energy frames between voiced runs. Trailing low frames stay silent.
  if (cfg.hangover_frames > 0) {
    std::ptrdiff_t last_voiced = -1;
    for (std::size_t i = 0; i < voiced.size(); ++i) {
      if (!voiced[i]) continue;
      if (last_voiced >= 0) {
        const std::size_t gap = i - static_cast<std::size_t>(last_voiced) - 1;
        if (gap > 0 && gap <= static_cast<std::size_t>(cfg.hangover_frames)) {
          for (std::size_t j = static_cast<std::size_t>(last_voiced) + 1; j < i; ++j)
            voiced[j] = 1;
        }
      }
      last_voiced = static_cast<std::ptrdiff_t>(i);
    }
  }

  const std::size_t min_len = ms_to_samples(cfg.min_voiced_ms, signal.sample_rate_hz);
  std::vector<ChunkSpan> spans;
  std::size_t i = 0;
  while (i < voiced.size()) {
    if (!voiced[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < voiced.size() && voiced[j + 1]) ++j;
    ChunkSpan span{i * hop, std::min(j * hop + frame_len, signal.samples.size())};
    if (span.length() >= min_len) spans.push_back(span);
    i = j + 1;
  }
  return spans;
}

std::vector<Chunk> extract_chunks(const AudioSignal& signal,
                                  const std::vector<ChunkSpan>& spans) {
  std::vector<Chunk> chunks;
  chunks.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const ChunkSpan& span = spans[k];
    if (span.start_sample >= span.end_sample ||
        span.end_sample > signal.samples.size()) {
      throw SpanOutOfRange("span [" + std::to_string(span.start_sample) + ", " +
                           std::to_string(span.end_sample) +
                           ") invalid for signal of " +
                           std::to_string(signal.samples.size()) + " samples");
    }
    Chunk chunk;
    chunk.id = k;
    chunk.span = span;
    chunk.sample_rate_hz = signal.sample_rate_hz;
    chunk.samples.assign(
        signal.samples.begin() + static_cast<std::ptrdiff_t>(span.start_sample),
        signal.samples.begin() + static_cast<std::ptrdiff_t>(span.end_sample));
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

}  // namespace convsent

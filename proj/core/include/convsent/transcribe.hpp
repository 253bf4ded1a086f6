// core/include/convsent/transcribe.hpp
//
// Pluggable chunk-to-text transcription backends (oracle TSV file, generic
// HTTP JSON endpoint) and word-recognition-rate scoring against references.

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

#ifndef CONVSENT_TRANSCRIBE_HPP_
#define CONVSENT_TRANSCRIBE_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "convsent/audio.hpp"
#include "convsent/errors.hpp"

namespace convsent {

struct MissingOracleEntry : Error {
  using Error::Error;
};

struct BackendUnreachable : Error {
  using Error::Error;
};

struct MalformedResponse : Error {
  using Error::Error;
};

struct EmptyEvaluation : Error {
  using Error::Error;
};

struct Transcript {
  std::size_t chunk_id = 0;
  std::string text;  // may be empty (failed recognition), never absent
  std::string backend_name;
};

// Oracle backend: offline TSV file of UTF-8 lines `chunk_id<TAB>text`.
struct OracleConfig {
  std::string oracle_path;
};

// HTTP backend: POSTs the chunk as a RIFF/WAVE body and expects a JSON
// object response with a string field "transcript". Transport failures and
// non-200 statuses are retried up to max_retries with exponential backoff
// before BackendUnreachable; a 200 without a string "transcript" field is
// MalformedResponse.
struct HttpConfig {
  std::string endpoint_url;
  std::string api_key_env_var;  // empty: no Authorization header
  double timeout_s = 5.0;
  std::size_t max_retries = 3;
};

using BackendConfig = std::variant<OracleConfig, HttpConfig>;

class TranscriptionBackend {
 public:
  virtual ~TranscriptionBackend() = default;
  virtual Transcript transcribe(const Chunk& chunk) = 0;
  virtual const char* name() const = 0;
};

std::unique_ptr<TranscriptionBackend> make_backend(const BackendConfig& cfg);

Transcript transcribe(const Chunk& chunk, const BackendConfig& cfg);

std::vector<Transcript> transcribe_chunks(const std::vector<Chunk>& chunks,
                                          TranscriptionBackend& backend);

// Word recognition rate for one reference/hypothesis pair. Tokens are
// whitespace-split, lowercased, and stripped of leading/trailing
// punctuation; the alignment is a word-level minimum-edit-distance DP with
// unit costs, ties preferring match > substitution > deletion > insertion.
struct WrrReport {
  std::size_t reference_word_count = 0;
  std::size_t hits = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;   // reference words missing from the hypothesis
  std::size_t insertions = 0;  // hypothesis words absent from the reference
  double wrr_percent = 0.0;    // 100 * hits / reference_word_count; 0 when
                               // the reference is empty
};

WrrReport compute_wrr(const std::string& reference,
                      const std::string& hypothesis);

// Per-chunk reports plus a pooled aggregate whose wrr_percent is
// 100 * sum(hits) / sum(reference words).
struct BackendEvaluation {
  std::vector<WrrReport> per_chunk;
  WrrReport aggregate;
};

// Transcribes every chunk with the configured backend and scores each
// result against the reference transcript with the matching chunk id.
BackendEvaluation evaluate_backend(const std::vector<Chunk>& chunks,
                                   const std::vector<Transcript>& references,
                                   const BackendConfig& cfg);

}  // namespace convsent

#endif  // CONVSENT_TRANSCRIBE_HPP_

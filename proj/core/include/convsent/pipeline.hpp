// core/include/convsent/pipeline.hpp
//
// End-to-end conversation analysis: VAD chunking, MFCC features, two-speaker
// diarization, transcription, per-utterance sentiment, and the versioned
// JSON conversation report.

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

#ifndef CONVSENT_PIPELINE_HPP_
#define CONVSENT_PIPELINE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "convsent/alignment.hpp"
#include "convsent/audio.hpp"
#include "convsent/diarize.hpp"
#include "convsent/errors.hpp"
#include "convsent/features.hpp"
#include "convsent/sentiment.hpp"
#include "convsent/transcribe.hpp"

namespace convsent {

struct IoError : Error {
  using Error::Error;
};

struct SchemaVersionMismatch : Error {
  using Error::Error;
};

enum class ErrorCategory { Input, Backend, Internal };

// Wraps any stage failure with enough context to map it to a CLI exit code.
struct PipelineError : Error {
  PipelineError(std::string stage_name, std::optional<std::size_t> chunk,
                ErrorCategory error_category, const std::string& message);

  std::string stage;
  std::optional<std::size_t> chunk_id;
  ErrorCategory category;
};

enum class SentimentMethod { Rule, NaiveBayes, Linear };

SentimentMethod parse_sentiment_method(const std::string& name);
const char* to_string(SentimentMethod method);

struct PipelineConfig {
  VadConfig vad;
  MfccConfig mfcc;
  DistanceMetric metric = DistanceMetric::Euclidean;
  SentimentMethod sentiment = SentimentMethod::Rule;
  BackendConfig backend = OracleConfig{};
  // Empty: the rule engine uses the built-in lexicon.
  std::string lexicon_path;
  // Training corpus for the supervised methods; required by them.
  std::string sentiment_train_path;
};

struct Utterance {
  std::size_t chunk_id = 0;
  Speaker speaker = Speaker::Speaker1;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  SentimentScore score;
};

struct SpeakerSummary {
  std::size_t utterance_count = 0;
  double mean_compound = 0.0;  // 0 when the speaker has no utterances
  // Most frequent utterance label; ties (and no utterances) give neutral.
  Polarity majority_label = Polarity::Neutral;
};

// The configuration echo embedded in every report.
struct ConfigSnapshot {
  DistanceMetric metric = DistanceMetric::Euclidean;
  std::size_t n_mfcc = 13;
  std::string backend;  // "oracle" or "http"
  SentimentMethod sentiment = SentimentMethod::Rule;
};

struct ConversationReport {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string source_path;
  ConfigSnapshot config;
  std::vector<Utterance> utterances;  // sorted by start_s
  SpeakerSummary speaker1;
  SpeakerSummary speaker2;
};

// Runs VAD -> chunk extraction -> MFCC -> diarization -> transcription ->
// per-utterance sentiment -> per-speaker aggregation. Every chunk yields
// exactly one utterance; stage failures surface as PipelineError. All
// floating-point fields of the returned report are already quantized to 6
// decimal places, so serialization round-trips are exact.
ConversationReport run_pipeline(const std::string& wav_path,
                                const PipelineConfig& cfg);

// Recomputes both speaker summaries from the utterance list.
std::pair<SpeakerSummary, SpeakerSummary> summarize_speakers(
    const std::vector<Utterance>& utterances);

// Deterministic serializer: fixed key order, floats as %.6f. Two identical
// reports always serialize to identical bytes.
std::string report_to_json(const ConversationReport& report);

ConversationReport report_from_json(const std::string& json_text);

void save_report(const ConversationReport& report, const std::string& path);

ConversationReport load_report(const std::string& path);

// Round to 6 decimal places (the report's wire precision).
double round6(double value);

}  // namespace convsent

#endif  // CONVSENT_PIPELINE_HPP_

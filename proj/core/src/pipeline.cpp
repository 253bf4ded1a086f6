// core/src/pipeline.cpp

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

#include "convsent/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace convsent {

namespace {

std::string error_message(const std::string& stage,
                          std::optional<std::size_t> chunk_id,
                          const std::string& message) {
  std::string out = "stage " + stage;
  if (chunk_id.has_value()) out += ", chunk " + std::to_string(*chunk_id);
  out += ": " + message;
  return out;
}

Polarity polarity_from_string(const std::string& name) {
  if (name == "positive") return Polarity::Positive;
  if (name == "negative") return Polarity::Negative;
  if (name == "neutral") return Polarity::Neutral;
  throw Error("unknown polarity label: " + name);
}

Speaker speaker_from_string(const std::string& name) {
  if (name == "Speaker1") return Speaker::Speaker1;
  if (name == "Speaker2") return Speaker::Speaker2;
  throw Error("unknown speaker: " + name);
}

std::string json_string(const std::string& s) {
  return nlohmann::json(s).dump();
}

std::string json_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

PipelineError::PipelineError(std::string stage_name,
                             std::optional<std::size_t> chunk,
                             ErrorCategory error_category,
                             const std::string& message)
    : Error(error_message(stage_name, chunk, message)),
      stage(std::move(stage_name)),
      chunk_id(chunk),
      category(error_category) {}

SentimentMethod parse_sentiment_method(const std::string& name) {
  if (name == "vader") return SentimentMethod::Rule;
  if (name == "nb") return SentimentMethod::NaiveBayes;
  if (name == "svm") return SentimentMethod::Linear;
  throw Error("unknown sentiment method: " + name);
}

const char* to_string(SentimentMethod method) {
  switch (method) {
    case SentimentMethod::Rule:
      return "vader";
    case SentimentMethod::NaiveBayes:
      return "nb";
    case SentimentMethod::Linear:
      return "svm";
  }
  return "unknown";
}

double round6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return std::strtod(buf, nullptr);
}

std::pair<SpeakerSummary, SpeakerSummary> summarize_speakers(
    const std::vector<Utterance>& utterances) {
  const auto summarize = [&utterances](Speaker speaker) {
    SpeakerSummary summary;
    double compound_sum = 0.0;
    std::size_t positive = 0, negative = 0, neutral = 0;
    for (const Utterance& u : utterances) {
      if (u.speaker != speaker) continue;
      ++summary.utterance_count;
      compound_sum += u.score.compound;
      switch (u.score.label) {
        case Polarity::Positive:
          ++positive;
          break;
        case Polarity::Negative:
          ++negative;
          break;
        case Polarity::Neutral:
          ++neutral;
          break;
      }
    }
    if (summary.utterance_count > 0) {
      summary.mean_compound = round6(
          compound_sum / static_cast<double>(summary.utterance_count));
    }
    if (positive > negative && positive > neutral)
      summary.majority_label = Polarity::Positive;
    else if (negative > positive && negative > neutral)
      summary.majority_label = Polarity::Negative;
    else
      summary.majority_label = Polarity::Neutral;
    return summary;
  };
  return {summarize(Speaker::Speaker1), summarize(Speaker::Speaker2)};
}

ConversationReport run_pipeline(const std::string& wav_path,
                                const PipelineConfig& cfg) {
  ConversationReport report;
  report.source_path = wav_path;
  report.config.metric = cfg.metric;
  report.config.n_mfcc = static_cast<std::size_t>(cfg.mfcc.n_mfcc);
  report.config.backend =
      std::holds_alternative<OracleConfig>(cfg.backend) ? "oracle" : "http";
  report.config.sentiment = cfg.sentiment;

  AudioSignal signal;
  try {
    signal = load_wav(wav_path);
  } catch (const Error& e) {
    throw PipelineError("load", std::nullopt, ErrorCategory::Input, e.what());
  }

  std::vector<Chunk> chunks;
  try {
    chunks = extract_chunks(signal, detect_voice_activity(signal, cfg.vad));
  } catch (const Error& e) {
    throw PipelineError("vad", std::nullopt, ErrorCategory::Internal, e.what());
  }
  if (chunks.empty()) return report;  // silence-only input: empty report

  std::vector<MfccMatrix> features;
  features.reserve(chunks.size());
  for (const Chunk& chunk : chunks) {
    try {
      features.push_back(compute_mfcc(chunk, cfg.mfcc));
    } catch (const InvalidConfig& e) {
      throw PipelineError("mfcc", chunk.id, ErrorCategory::Input, e.what());
    } catch (const Error& e) {
      throw PipelineError("mfcc", chunk.id, ErrorCategory::Internal, e.what());
    }
  }

  std::vector<Speaker> speakers;
  if (chunks.size() == 1) {
    speakers.push_back(Speaker::Speaker1);  // lone chunk: nothing to contrast
  } else {
    try {
      speakers = diarize_chunks(features, cfg.metric).labels;
    } catch (const Error& e) {
      throw PipelineError("diarize", std::nullopt, ErrorCategory::Internal,
                          e.what());
    }
  }

  std::vector<Transcript> transcripts;
  try {
    const std::unique_ptr<TranscriptionBackend> backend =
        make_backend(cfg.backend);
    transcripts.reserve(chunks.size());
    for (const Chunk& chunk : chunks) {
      try {
        transcripts.push_back(backend->transcribe(chunk));
      } catch (const Error& e) {
        throw PipelineError("transcribe", chunk.id, ErrorCategory::Backend,
                            e.what());
      }
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError("transcribe", std::nullopt, ErrorCategory::Backend,
                        e.what());
  }

  // Build the per-utterance scorer for the configured method.
  std::function<double(const std::string&)> compound_of;
  try {
    switch (cfg.sentiment) {
      case SentimentMethod::Rule: {
        const Lexicon lexicon = cfg.lexicon_path.empty()
                                    ? default_lexicon()
                                    : load_lexicon(cfg.lexicon_path);
        compound_of = [lexicon](const std::string& text) {
          return rule_polarity(text, lexicon).compound;
        };
        break;
      }
      case SentimentMethod::NaiveBayes: {
        if (cfg.sentiment_train_path.empty())
          throw Error("the nb method needs a training corpus");
        const NbModel model =
            train_naive_bayes(load_corpus(cfg.sentiment_train_path));
        compound_of = [model](const std::string& text) {
          return 2.0 * nb_posterior_positive(model, text) - 1.0;
        };
        break;
      }
      case SentimentMethod::Linear: {
        if (cfg.sentiment_train_path.empty())
          throw Error("the svm method needs a training corpus");
        const LinearModel model =
            train_linear(load_corpus(cfg.sentiment_train_path));
        compound_of = [model](const std::string& text) {
          const double m = linear_margin(model, text);
          return m / std::sqrt(m * m + 15.0);
        };
        break;
      }
    }
  } catch (const Error& e) {
    throw PipelineError("sentiment", std::nullopt, ErrorCategory::Input,
                        e.what());
  }

  report.utterances.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    Utterance utterance;
    utterance.chunk_id = chunks[i].id;
    utterance.speaker = speakers[i];
    utterance.start_s = round6(chunks[i].start_s());
    utterance.end_s = round6(chunks[i].end_s());
    utterance.text = transcripts[i].text;
    try {
      utterance.score.compound = round6(compound_of(utterance.text));
    } catch (const Error& e) {
      throw PipelineError("sentiment", chunks[i].id, ErrorCategory::Internal,
                          e.what());
    }
    utterance.score.label = label_from_compound(utterance.score.compound);
    report.utterances.push_back(std::move(utterance));
  }

  std::tie(report.speaker1, report.speaker2) =
      summarize_speakers(report.utterances);
  return report;
}

std::string report_to_json(const ConversationReport& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema_version\": " << report.schema_version << ",\n";
  out << "  \"source_path\": " << json_string(report.source_path) << ",\n";
  out << "  \"config\": {\n";
  out << "    \"metric\": " << json_string(to_string(report.config.metric))
      << ",\n";
  out << "    \"n_mfcc\": " << report.config.n_mfcc << ",\n";
  out << "    \"backend\": " << json_string(report.config.backend) << ",\n";
  out << "    \"sentiment\": "
      << json_string(to_string(report.config.sentiment)) << "\n";
  out << "  },\n";
  out << "  \"utterances\": [";
  for (std::size_t i = 0; i < report.utterances.size(); ++i) {
    const Utterance& u = report.utterances[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\n";
    out << "      \"chunk_id\": " << u.chunk_id << ",\n";
    out << "      \"speaker\": " << json_string(to_string(u.speaker)) << ",\n";
    out << "      \"start_s\": " << json_double(u.start_s) << ",\n";
    out << "      \"end_s\": " << json_double(u.end_s) << ",\n";
    out << "      \"text\": " << json_string(u.text) << ",\n";
    out << "      \"score\": {\n";
    out << "        \"compound\": " << json_double(u.score.compound) << ",\n";
    out << "        \"label\": " << json_string(to_string(u.score.label))
        << "\n";
    out << "      }\n";
    out << "    }";
  }
  out << (report.utterances.empty() ? "],\n" : "\n  ],\n");
  const auto emit_summary = [&out](const char* key,
                                   const SpeakerSummary& summary,
                                   bool trailing_comma) {
    out << "  \"" << key << "\": {\n";
    out << "    \"utterance_count\": " << summary.utterance_count << ",\n";
    out << "    \"mean_compound\": " << json_double(summary.mean_compound)
        << ",\n";
    out << "    \"majority_label\": "
        << json_string(to_string(summary.majority_label)) << "\n";
    out << "  }" << (trailing_comma ? ",\n" : "\n");
  };
  emit_summary("speaker1", report.speaker1, true);
  emit_summary("speaker2", report.speaker2, false);
  out << "}\n";
  return out.str();
}

ConversationReport report_from_json(const std::string& json_text) {
  const nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error("report is not a JSON object");
  if (!doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != ConversationReport::kSchemaVersion) {
    throw SchemaVersionMismatch(
        "expected schema_version " +
        std::to_string(ConversationReport::kSchemaVersion));
  }

  ConversationReport report;
  report.schema_version = doc["schema_version"].get<int>();
  report.source_path = doc.at("source_path").get<std::string>();
  const nlohmann::json& config = doc.at("config");
  report.config.metric = parse_metric(config.at("metric").get<std::string>());
  report.config.n_mfcc = config.at("n_mfcc").get<std::size_t>();
  report.config.backend = config.at("backend").get<std::string>();
  report.config.sentiment =
      parse_sentiment_method(config.at("sentiment").get<std::string>());
  for (const nlohmann::json& entry : doc.at("utterances")) {
    Utterance u;
    u.chunk_id = entry.at("chunk_id").get<std::size_t>();
    u.speaker = speaker_from_string(entry.at("speaker").get<std::string>());
    u.start_s = entry.at("start_s").get<double>();
    u.end_s = entry.at("end_s").get<double>();
    u.text = entry.at("text").get<std::string>();
    u.score.compound = entry.at("score").at("compound").get<double>();
    u.score.label =
        polarity_from_string(entry.at("score").at("label").get<std::string>());
    report.utterances.push_back(std::move(u));
  }
  const auto read_summary = [&doc](const char* key) {
    const nlohmann::json& entry = doc.at(key);
    SpeakerSummary summary;
    summary.utterance_count = entry.at("utterance_count").get<std::size_t>();
    summary.mean_compound = entry.at("mean_compound").get<double>();
    summary.majority_label =
        polarity_from_string(entry.at("majority_label").get<std::string>());
    return summary;
  };
  report.speaker1 = read_summary("speaker1");
  report.speaker2 = read_summary("speaker2");
  return report;
}

void save_report(const ConversationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const std::string json = report_to_json(report);
  out.write(json.data(), static_cast<std::streamsize>(json.size()));
  if (!out) throw IoError("short write to " + path);
}

ConversationReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace convsent

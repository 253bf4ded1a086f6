// tools/convsent.cpp
//
// Command-line front end: vad, mfcc, diarize, sweep, wrr, sentiment and the
// end-to-end analyze command.
//
// Exit codes: 0 success, 2 input-format error, 3 backend error, 4 internal
// stage error.

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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "convsent/alignment.hpp"
#include "convsent/audio.hpp"
#include "convsent/diarize.hpp"
#include "convsent/errors.hpp"
#include "convsent/features.hpp"
#include "convsent/pipeline.hpp"
#include "convsent/sentiment.hpp"
#include "convsent/transcribe.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;
constexpr int kExitInternal = 4;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw convsent::IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<convsent::Speaker> read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw convsent::IoError("cannot open " + path);
  std::vector<convsent::Speaker> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "Speaker1" || line == "1")
      labels.push_back(convsent::Speaker::Speaker1);
    else if (line == "Speaker2" || line == "2")
      labels.push_back(convsent::Speaker::Speaker2);
    else
      throw convsent::Error("label file " + path + ": bad label '" + line +
                            "', expected Speaker1|Speaker2|1|2");
  }
  return labels;
}

int run_vad(const std::string& wav_path) {
  const convsent::AudioSignal signal = convsent::load_wav(wav_path);
  for (const convsent::ChunkSpan& span :
       convsent::detect_voice_activity(signal, convsent::VadConfig{})) {
    std::printf("%.6f\t%.6f\n",
                static_cast<double>(span.start_sample) / signal.sample_rate_hz,
                static_cast<double>(span.end_sample) / signal.sample_rate_hz);
  }
  return kExitOk;
}

int run_mfcc(const std::string& wav_path, int n_mfcc, bool dump_filterbank) {
  const convsent::AudioSignal signal = convsent::load_wav(wav_path);
  convsent::MfccConfig cfg;
  cfg.n_mfcc = n_mfcc;

  if (dump_filterbank) {
    const convsent::MelFilterBank bank =
        convsent::build_mel_filterbank(cfg, signal.sample_rate_hz);
    for (const auto& row : bank.weights) {
      for (std::size_t b = 0; b < row.size(); ++b)
        std::printf(b == 0 ? "%.6f" : ",%.6f", row[b]);
      std::printf("\n");
    }
    return kExitOk;
  }

  convsent::Chunk chunk;
  chunk.id = 0;
  chunk.span = {0, signal.samples.size()};
  chunk.samples = signal.samples;
  chunk.sample_rate_hz = signal.sample_rate_hz;
  const convsent::MfccMatrix mfcc = convsent::compute_mfcc(chunk, cfg);
  for (const auto& frame : mfcc.coeffs) {
    for (std::size_t c = 0; c < frame.size(); ++c)
      std::printf(c == 0 ? "%.6f" : ",%.6f", frame[c]);
    std::printf("\n");
  }
  return kExitOk;
}

std::vector<convsent::Chunk> chunks_of(const convsent::AudioSignal& signal) {
  return convsent::extract_chunks(
      signal, convsent::detect_voice_activity(signal, convsent::VadConfig{}));
}

int run_diarize(const std::string& wav_path, const std::string& metric_name,
                int n_mfcc) {
  const convsent::AudioSignal signal = convsent::load_wav(wav_path);
  const std::vector<convsent::Chunk> chunks = chunks_of(signal);
  convsent::MfccConfig cfg;
  cfg.n_mfcc = n_mfcc;
  std::vector<convsent::MfccMatrix> features;
  features.reserve(chunks.size());
  for (const convsent::Chunk& chunk : chunks)
    features.push_back(convsent::compute_mfcc(chunk, cfg));
  const convsent::SpeakerLabeling labeling =
      convsent::diarize_chunks(features, convsent::parse_metric(metric_name));
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    std::printf("%zu\t%.6f\t%.6f\t%s\n", chunks[i].id, chunks[i].start_s(),
                chunks[i].end_s(), convsent::to_string(labeling.labels[i]));
  }
  return kExitOk;
}

int run_sweep(const std::string& wav_path, const std::string& labels_path,
              const std::string& metric_name) {
  const convsent::AudioSignal signal = convsent::load_wav(wav_path);
  const std::vector<convsent::Chunk> chunks = chunks_of(signal);
  const std::vector<convsent::Speaker> reference = read_labels_file(labels_path);
  std::printf("n_features,accuracy\n");
  for (const convsent::SweepPoint& point : convsent::feature_count_sweep(
           chunks, reference, convsent::parse_metric(metric_name),
           convsent::MfccConfig{})) {
    std::printf("%zu,%.6f\n", point.n_features, point.accuracy_percent);
  }
  return kExitOk;
}

int run_wrr(const std::string& ref_path, const std::string& hyp_path) {
  const convsent::WrrReport report =
      convsent::compute_wrr(read_text_file(ref_path), read_text_file(hyp_path));
  std::printf("reference_word_count\t%zu\n", report.reference_word_count);
  std::printf("hits\t%zu\n", report.hits);
  std::printf("substitutions\t%zu\n", report.substitutions);
  std::printf("deletions\t%zu\n", report.deletions);
  std::printf("insertions\t%zu\n", report.insertions);
  std::printf("wrr_percent\t%.6f\n", report.wrr_percent);
  return kExitOk;
}

int run_sentiment_score(const std::string& text, const std::string& lexicon_path) {
  const convsent::Lexicon lexicon = lexicon_path.empty()
                                        ? convsent::default_lexicon()
                                        : convsent::load_lexicon(lexicon_path);
  const convsent::SentimentScore score = convsent::rule_polarity(text, lexicon);
  std::printf("compound\t%.6f\n", score.compound);
  std::printf("label\t%s\n", convsent::to_string(score.label));
  return kExitOk;
}

int run_sentiment_eval(const std::string& method_name,
                       const std::string& train_path,
                       const std::string& test_path,
                       const std::string& lexicon_path) {
  const convsent::SentimentMethod method =
      convsent::parse_sentiment_method(method_name);
  const convsent::LabeledCorpus test = convsent::load_corpus(test_path);

  std::function<convsent::Polarity(const std::string&)> predict;
  switch (method) {
    case convsent::SentimentMethod::Rule: {
      const convsent::Lexicon lexicon =
          lexicon_path.empty() ? convsent::default_lexicon()
                               : convsent::load_lexicon(lexicon_path);
      predict = [lexicon](const std::string& text) {
        return convsent::rule_polarity(text, lexicon).label;
      };
      break;
    }
    case convsent::SentimentMethod::NaiveBayes: {
      if (train_path.empty())
        throw convsent::Error("--method nb needs --train <corpus.tsv>");
      const convsent::NbModel model =
          convsent::train_naive_bayes(convsent::load_corpus(train_path));
      predict = [model](const std::string& text) {
        return convsent::predict_naive_bayes(model, text)
                   ? convsent::Polarity::Positive
                   : convsent::Polarity::Negative;
      };
      break;
    }
    case convsent::SentimentMethod::Linear: {
      if (train_path.empty())
        throw convsent::Error("--method svm needs --train <corpus.tsv>");
      const convsent::LinearModel model =
          convsent::train_linear(convsent::load_corpus(train_path));
      predict = [model](const std::string& text) {
        return convsent::predict_linear(model, text)
                   ? convsent::Polarity::Positive
                   : convsent::Polarity::Negative;
      };
      break;
    }
  }
  std::printf("%s\t%s\t%.2f\n", method_name.c_str(), test.name.c_str(),
              convsent::evaluate_accuracy(predict, test));
  return kExitOk;
}

int run_analyze(const std::string& wav_path, const std::string& transcripts,
                const std::string& backend_url, const std::string& metric_name,
                int n_mfcc, const std::string& sentiment_name,
                const std::string& lexicon_path, const std::string& train_path,
                const std::string& api_key_env, std::size_t max_retries,
                double timeout_s, const std::string& out_path) {
  if (transcripts.empty() == backend_url.empty()) {
    std::fprintf(stderr,
                 "analyze needs exactly one of --transcripts or "
                 "--backend-url\n");
    return kExitInput;
  }

  convsent::PipelineConfig cfg;
  cfg.metric = convsent::parse_metric(metric_name);
  cfg.mfcc.n_mfcc = n_mfcc;
  cfg.sentiment = convsent::parse_sentiment_method(sentiment_name);
  cfg.lexicon_path = lexicon_path;
  cfg.sentiment_train_path = train_path;
  if (!transcripts.empty()) {
    cfg.backend = convsent::OracleConfig{transcripts};
  } else {
    convsent::HttpConfig http;
    http.endpoint_url = backend_url;
    http.api_key_env_var = api_key_env;
    http.max_retries = max_retries;
    http.timeout_s = timeout_s;
    cfg.backend = http;
  }

  const convsent::ConversationReport report =
      convsent::run_pipeline(wav_path, cfg);
  if (out_path.empty()) {
    std::fputs(convsent::report_to_json(report).c_str(), stdout);
  } else {
    convsent::save_report(report, out_path);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker-aware conversation sentiment analysis"};
  app.require_subcommand(1);

  // vad
  std::string vad_wav;
  CLI::App* vad = app.add_subcommand("vad", "Print voiced spans as start<TAB>end seconds");
  vad->add_option("wav", vad_wav, "16-bit PCM mono WAV file")->required();

  // mfcc
  std::string mfcc_wav;
  int mfcc_n = 13;
  bool dump_filterbank = false;
  CLI::App* mfcc = app.add_subcommand("mfcc", "Print MFCC frames as CSV rows");
  mfcc->add_option("wav", mfcc_wav, "16-bit PCM mono WAV file")->required();
  mfcc->add_option("--n-mfcc", mfcc_n, "Coefficients per frame (default 13)");
  mfcc->add_flag("--dump-filterbank", dump_filterbank,
                 "Print the mel filterbank weights as CSV instead");

  // diarize
  std::string dia_wav, dia_metric = "euclidean";
  int dia_n = 13;
  CLI::App* diarize = app.add_subcommand(
      "diarize", "Print chunk_id<TAB>start<TAB>end<TAB>speaker per chunk");
  diarize->add_option("wav", dia_wav, "16-bit PCM mono WAV file")->required();
  diarize->add_option("--metric", dia_metric, "euclidean|canberra|correlation")
      ->check(CLI::IsMember({"euclidean", "canberra", "correlation"}));
  diarize->add_option("--n-mfcc", dia_n, "Coefficients per frame (default 13)");

  // sweep
  std::string sweep_wav, sweep_labels, sweep_metric = "euclidean";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Diarization accuracy for feature counts 1..26, as CSV");
  sweep->add_option("wav", sweep_wav, "16-bit PCM mono WAV file")->required();
  sweep->add_option("--labels", sweep_labels,
                    "Reference speaker label file, one label per chunk")
      ->required();
  sweep->add_option("--metric", sweep_metric, "euclidean|canberra|correlation")
      ->check(CLI::IsMember({"euclidean", "canberra", "correlation"}));

  // wrr
  std::string wrr_ref, wrr_hyp;
  CLI::App* wrr =
      app.add_subcommand("wrr", "Word recognition rate of hypothesis vs reference");
  wrr->add_option("ref", wrr_ref, "Reference text file")->required();
  wrr->add_option("hyp", wrr_hyp, "Hypothesis text file")->required();

  // sentiment score | sentiment eval
  CLI::App* sentiment = app.add_subcommand("sentiment", "Sentiment scoring tools");
  sentiment->require_subcommand(1);
  std::string score_text, score_lexicon;
  CLI::App* score =
      sentiment->add_subcommand("score", "Rule-engine score for one text");
  score->add_option("text", score_text, "Text to score")->required();
  score->add_option("--lexicon", score_lexicon,
                    "Valence lexicon TSV (default: built-in)");
  std::string eval_method, eval_train, eval_test, eval_lexicon;
  CLI::App* eval =
      sentiment->add_subcommand("eval", "Accuracy of one method on a test corpus");
  eval->add_option("--method", eval_method, "vader|nb|svm")
      ->check(CLI::IsMember({"vader", "nb", "svm"}))
      ->required();
  eval->add_option("--train", eval_train, "Training corpus TSV (nb and svm)");
  eval->add_option("--test", eval_test, "Test corpus TSV")->required();
  eval->add_option("--lexicon", eval_lexicon,
                   "Valence lexicon TSV for vader (default: built-in)");

  // analyze
  std::string an_wav, an_transcripts, an_backend_url, an_metric = "euclidean";
  std::string an_sentiment = "vader", an_lexicon, an_train, an_api_key_env;
  std::string an_out;
  int an_n = 13;
  std::size_t an_retries = 3;
  double an_timeout = 5.0;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Full pipeline: emit a conversation report as JSON");
  analyze->add_option("wav", an_wav, "16-bit PCM mono WAV file")->required();
  analyze->add_option("--transcripts", an_transcripts,
                      "Oracle transcript TSV (chunk_id<TAB>text)");
  analyze->add_option("--backend-url", an_backend_url,
                      "HTTP transcription endpoint URL");
  analyze->add_option("--metric", an_metric, "euclidean|canberra|correlation")
      ->check(CLI::IsMember({"euclidean", "canberra", "correlation"}));
  analyze->add_option("--n-mfcc", an_n, "Coefficients per frame (default 13)");
  analyze->add_option("--sentiment", an_sentiment, "vader|nb|svm")
      ->check(CLI::IsMember({"vader", "nb", "svm"}));
  analyze->add_option("--lexicon", an_lexicon,
                      "Valence lexicon TSV for vader (default: built-in)");
  analyze->add_option("--sentiment-train", an_train,
                      "Training corpus TSV for nb and svm");
  analyze->add_option("--api-key-env", an_api_key_env,
                      "Environment variable holding the backend API key");
  analyze->add_option("--max-retries", an_retries,
                      "HTTP retry attempts after the first (default 3)");
  analyze->add_option("--timeout-s", an_timeout,
                      "HTTP timeout in seconds (default 5)");
  analyze->add_option("--out", an_out, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*vad) return run_vad(vad_wav);
    if (*mfcc) return run_mfcc(mfcc_wav, mfcc_n, dump_filterbank);
    if (*diarize) return run_diarize(dia_wav, dia_metric, dia_n);
    if (*sweep) return run_sweep(sweep_wav, sweep_labels, sweep_metric);
    if (*wrr) return run_wrr(wrr_ref, wrr_hyp);
    if (*score) return run_sentiment_score(score_text, score_lexicon);
    if (*eval)
      return run_sentiment_eval(eval_method, eval_train, eval_test, eval_lexicon);
    if (*analyze)
      return run_analyze(an_wav, an_transcripts, an_backend_url, an_metric,
                         an_n, an_sentiment, an_lexicon, an_train,
                         an_api_key_env, an_retries, an_timeout, an_out);
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitInput;
  } catch (const convsent::PipelineError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.category) {
      case convsent::ErrorCategory::Input:
        return kExitInput;
      case convsent::ErrorCategory::Backend:
        return kExitBackend;
      case convsent::ErrorCategory::Internal:
        return kExitInternal;
    }
    return kExitInternal;
  } catch (const convsent::MissingOracleEntry& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    return kExitBackend;
  } catch (const convsent::BackendUnreachable& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    return kExitBackend;
  } catch (const convsent::MalformedResponse& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    return kExitBackend;
  } catch (const convsent::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}

// tests/acceptance_test.cpp
//
// Release gate: eight checks, one PASS/FAIL line each. Exits nonzero when
// any check fails. argv[1] must name the convsent CLI binary (used by the
// offline-determinism check).

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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "convsent/alignment.hpp"
#include "convsent/audio.hpp"
#include "convsent/diarize.hpp"
#include "convsent/features.hpp"
#include "convsent/pipeline.hpp"
#include "convsent/sentiment.hpp"
#include "convsent/transcribe.hpp"
#include "testutil.hpp"

using namespace convsent;
namespace tu = convsent::testutil;

namespace {

// Pinned tolerances and limits. Loosening any of these weakens the gate.
constexpr double kDtwTolerance = 1e-9;
constexpr double kMelTolerance = 0.1;
constexpr double kOrthonormalTolerance = 1e-9;
constexpr double kGainInvarianceTolerance = 1e-6;
constexpr double kVadToleranceSeconds = 0.025;
constexpr double kNbTolerance = 1e-12;
constexpr double kRuleTolerance = 1e-4;
constexpr double kObjectiveSlack = 1e-9;
constexpr double kDtwBudgetSeconds = 10.0;
constexpr double kEndToEndBudgetSeconds = 30.0;

struct Failure {
  std::string detail;
};

using CheckBody = std::function<void(std::vector<std::string>&)>;

void expect(bool condition, const std::string& detail,
            std::vector<std::string>& problems) {
  if (!condition) problems.push_back(detail);
}

bool run_check(int number, const std::string& name, const CheckBody& body) {
  std::vector<std::string> problems;
  try {
    body(problems);
  } catch (const std::exception& e) {
    problems.push_back(std::string("exception: ") + e.what());
  }
  const bool ok = problems.empty();
  std::cout << (ok ? "PASS" : "FAIL") << ": " << number << ". " << name
            << std::endl;
  for (const std::string& p : problems)
    std::cout << "      - " << p << std::endl;
  return ok;
}

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---------------------------------------------------------------------------

void check_dtw_oracle(std::vector<std::string>& problems) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(20260815);
  std::uniform_int_distribution<std::size_t> len(1, 8);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  const DistanceMetric metrics[] = {DistanceMetric::Euclidean,
                                    DistanceMetric::Canberra,
                                    DistanceMetric::Correlation};
  std::size_t mismatches = 0;
  for (int pair = 0; pair < 500; ++pair) {
    const std::size_t d = dim(rng);
    const MfccMatrix a = tu::random_sequence(rng, len(rng), d);
    const MfccMatrix b = tu::random_sequence(rng, len(rng), d);
    for (DistanceMetric m : metrics) {
      const double dp = dtw_distance(a, b, m).distance;
      const double brute = tu::dtw_bruteforce(a, b, m);
      if (std::abs(dp - brute) > kDtwTolerance) ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  expect(mismatches == 0,
         std::to_string(mismatches) + " pairs disagree with enumeration",
         problems);
  expect(elapsed < kDtwBudgetSeconds,
         "took " + std::to_string(elapsed) + " s (budget 10 s)", problems);
}

void check_mfcc_numerics(std::vector<std::string>& problems) {
  expect(std::abs(hz_to_mel(1000.0) - 1000.0) < kMelTolerance,
         "hz_to_mel(1000) = " + std::to_string(hz_to_mel(1000.0)), problems);

  // Orthonormality of the 26x26 DCT matrix.
  const std::size_t n = 26;
  std::vector<std::vector<double>> columns(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> unit(n, 0.0);
    unit[i] = 1.0;
    columns[i] = dct_ii(unit, n);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += columns[a][k] * columns[b][k];
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  expect(worst < kOrthonormalTolerance,
         "DCT orthonormality deviation " + std::to_string(worst), problems);

  // Shape: one second at 16 kHz with defaults.
  Chunk second;
  second.samples = tu::tone(1.0, 440.0, 0.5);
  second.span = {0, second.samples.size()};
  const MfccMatrix m = compute_mfcc(second, MfccConfig{});
  expect(m.n_frames() == 98,
         "expected 98 frames, got " + std::to_string(m.n_frames()), problems);
  expect(m.n_coeffs() == 13,
         "expected 13 coefficients, got " + std::to_string(m.n_coeffs()),
         problems);

  // Gain invariance of coefficients 1..12 on non-silent input.
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> amp(-0.2, 0.2);
  Chunk noise;
  noise.samples.resize(8000);
  for (auto& s : noise.samples) s = amp(rng);
  noise.span = {0, noise.samples.size()};
  Chunk louder = noise;
  for (auto& s : louder.samples) s *= 3.7;
  const MfccMatrix base = compute_mfcc(noise, MfccConfig{});
  const MfccMatrix scaled = compute_mfcc(louder, MfccConfig{});
  double drift = 0.0;
  for (std::size_t f = 0; f < base.n_frames(); ++f)
    for (std::size_t k = 1; k < 13; ++k)
      drift = std::max(drift,
                       std::abs(base.coeffs[f][k] - scaled.coeffs[f][k]));
  expect(drift < kGainInvarianceTolerance,
         "coefficients 1..12 drifted by " + std::to_string(drift), problems);
}

void check_vad_placement(std::vector<std::string>& problems) {
  const AudioSignal fixture = tu::tone_in_silence();
  const std::vector<ChunkSpan> spans =
      detect_voice_activity(fixture, VadConfig{});
  expect(spans.size() == 1,
         "expected one span, got " + std::to_string(spans.size()), problems);
  if (spans.size() != 1) return;
  const double start_s = static_cast<double>(spans[0].start_sample) / 16000.0;
  const double end_s = static_cast<double>(spans[0].end_sample) / 16000.0;
  expect(std::abs(start_s - 0.5) <= kVadToleranceSeconds,
         "onset at " + std::to_string(start_s) + " s vs 0.5 s", problems);
  expect(std::abs(end_s - 1.5) <= kVadToleranceSeconds,
         "offset at " + std::to_string(end_s) + " s vs 1.5 s", problems);
}

void check_diarization(std::vector<std::string>& problems) {
  const tu::Conversation conv = tu::make_conversation(6);
  const std::vector<Chunk> chunks = extract_chunks(
      conv.signal, detect_voice_activity(conv.signal, VadConfig{}));
  expect(chunks.size() == 6,
         "expected 6 chunks, got " + std::to_string(chunks.size()), problems);
  if (chunks.size() != conv.truth.size()) return;

  std::vector<MfccMatrix> features;
  for (const Chunk& c : chunks)
    features.push_back(compute_mfcc(c, MfccConfig{}));
  const SpeakerLabeling labeling =
      diarize_chunks(features, DistanceMetric::Euclidean);
  const double accuracy = evaluate_speaker_accuracy(labeling, conv.truth);
  expect(accuracy == 100.0,
         "accuracy at 13 features = " + std::to_string(accuracy), problems);

  const std::vector<SweepPoint> sweep = feature_count_sweep(
      chunks, conv.truth, DistanceMetric::Euclidean, MfccConfig{});
  expect(sweep.size() == 26,
         "sweep has " + std::to_string(sweep.size()) + " points", problems);
  if (sweep.size() < 14) return;
  const double high = (sweep[11].accuracy_percent + sweep[12].accuracy_percent +
                       sweep[13].accuracy_percent) /
                      3.0;
  const double low = (sweep[0].accuracy_percent + sweep[1].accuracy_percent +
                      sweep[2].accuracy_percent) /
                     3.0;
  expect(high >= low,
         "mean accuracy 12..14 (" + std::to_string(high) +
             ") below mean 1..3 (" + std::to_string(low) + ")",
         problems);
}

void check_wrr(std::vector<std::string>& problems) {
  // Exhaustive: every pair of word sequences of length <= 6 over a two-word
  // alphabet, against enumeration of all monotone alignments.
  const auto sequences = tu::word_sequences(6);
  std::size_t mismatches = 0;
  for (const auto& ref : sequences) {
    for (const auto& hyp : sequences) {
      const WrrReport r = compute_wrr(tu::join_words(ref), tu::join_words(hyp));
      const std::size_t dp_cost = r.substitutions + r.deletions + r.insertions;
      if (dp_cost != tu::wrr_bruteforce_cost(ref, hyp)) ++mismatches;
      if (r.hits + r.substitutions + r.deletions != r.reference_word_count)
        ++mismatches;
    }
  }
  expect(mismatches == 0,
         std::to_string(mismatches) + " alignment disagreements", problems);

  const WrrReport identity = compute_wrr("alpha beta gamma", "alpha beta gamma");
  expect(identity.wrr_percent == 100.0, "identity WRR != 100", problems);

  const WrrReport example =
      compute_wrr("how are you doing today", "how are you today");
  expect(example.hits == 4 && example.wrr_percent == 80.0,
         "5-word/4-hit example gave " + std::to_string(example.wrr_percent),
         problems);

  // Integer-fraction property on random pairs over a wider alphabet.
  std::mt19937 rng(4242);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  for (int t = 0; t < 500; ++t) {
    const auto sentence = [&] {
      std::string s;
      const std::size_t n = rng() % 9;
      for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += words[rng() % words.size()];
      }
      return s;
    };
    const WrrReport r = compute_wrr(sentence(), sentence());
    if (r.reference_word_count == 0) {
      expect(r.wrr_percent == 0.0, "empty reference must score 0", problems);
      continue;
    }
    const double reconstructed = 100.0 * static_cast<double>(r.hits) /
                                 static_cast<double>(r.reference_word_count);
    expect(r.hits <= r.reference_word_count, "H > N", problems);
    expect(r.wrr_percent == reconstructed,
           "WRR is not the integer fraction 100*H/N", problems);
  }
}

void check_sentiment(std::vector<std::string>& problems) {
  // Naive Bayes against hand-computed Laplace estimates.
  LabeledCorpus tiny;
  tiny.name = "tiny";
  tiny.documents = {{"good", true}, {"bad", false}};
  const NbModel model = train_naive_bayes(tiny);
  const auto& good = model.log_likelihood.at("good");
  expect(std::abs(std::exp(good.first) - 2.0 / 3.0) < kNbTolerance,
         "P(good|pos) != 2/3", problems);
  expect(std::abs(std::exp(good.second) - 1.0 / 3.0) < kNbTolerance,
         "P(good|neg) != 1/3", problems);
  expect(std::abs(nb_posterior_positive(model, "good") - 2.0 / 3.0) <
             kNbTolerance,
         "posterior P(pos|good) != 2/3", problems);

  // Rule-engine frozen compounds.
  const Lexicon lex = parse_lexicon("good\t1.9\n");
  const double plain = rule_polarity("good", lex).compound;
  const double negated = rule_polarity("not good", lex).compound;
  expect(std::abs(plain - 0.4404) < kRuleTolerance,
         "compound('good') = " + std::to_string(plain), problems);
  expect(std::abs(negated - (-0.3412)) < kRuleTolerance,
         "compound('not good') = " + std::to_string(negated), problems);

  // Linear objective never increases across epochs on a fixed tiny corpus.
  std::vector<double> objectives;
  train_linear(tiny, LinearHyperparams{},
               [&](std::size_t, double objective) {
                 objectives.push_back(objective);
               });
  bool monotone = objectives.size() == 100;
  for (std::size_t e = 1; e < objectives.size(); ++e)
    monotone = monotone && objectives[e] <= objectives[e - 1] + kObjectiveSlack;
  expect(monotone, "linear objective increased during training", problems);

  // Three methods, two bundled corpora, Table-V-shaped summary.
  const std::string dir = CONVSENT_DATA_DIR;
  const struct {
    std::string label;
    std::string train;
    std::string test;
  } corpora[] = {
      {"social", dir + "/sentiment/social_train.tsv",
       dir + "/sentiment/social_test.tsv"},
      {"reviews", dir + "/sentiment/reviews_train.tsv",
       dir + "/sentiment/reviews_test.tsv"},
  };

  std::printf("      %-10s", "method");
  for (const auto& c : corpora) std::printf("%12s", c.label.c_str());
  std::printf("\n");

  const Lexicon& builtin = default_lexicon();
  for (const std::string method : {"vader", "nb", "svm"}) {
    std::printf("      %-10s", method.c_str());
    for (const auto& c : corpora) {
      const LabeledCorpus train = load_corpus(c.train);
      const LabeledCorpus test = load_corpus(c.test);
      expect(train.documents.size() + test.documents.size() >= 100,
             c.label + " corpus has fewer than 100 documents", problems);

      double accuracy = 0.0;
      if (method == "vader") {
        accuracy = evaluate_accuracy(
            [&](const std::string& text) {
              return rule_polarity(text, builtin).label;
            },
            test);
      } else if (method == "nb") {
        const NbModel nb = train_naive_bayes(train);
        accuracy = evaluate_accuracy(
            [&](const std::string& text) {
              return predict_naive_bayes(nb, text) ? Polarity::Positive
                                                   : Polarity::Negative;
            },
            test);
      } else {
        const LinearModel linear = train_linear(train);
        accuracy = evaluate_accuracy(
            [&](const std::string& text) {
              return predict_linear(linear, text) ? Polarity::Positive
                                                  : Polarity::Negative;
            },
            test);
      }
      expect(accuracy >= 0.0 && accuracy <= 100.0,
             method + " accuracy out of range on " + c.label, problems);
      std::printf("%12.2f", accuracy);
    }
    std::printf("\n");
  }
}

void check_end_to_end(std::vector<std::string>& problems) {
  const auto start = std::chrono::steady_clock::now();

  tu::TempDir dir;
  const tu::Conversation conv = tu::make_conversation(4);
  const std::string wav = dir.file("conversation.wav");
  write_wav(conv.signal, wav);
  const std::string oracle = dir.file("oracle.tsv");
  tu::write_text(oracle,
                 "0\ti love this\n"
                 "1\tthis is terrible\n"
                 "2\treally love this\n"
                 "3\tterrible just terrible\n");

  PipelineConfig cfg;
  cfg.backend = OracleConfig{oracle};
  const ConversationReport report = run_pipeline(wav, cfg);

  expect(report.utterances.size() == 4,
         "expected 4 utterances, got " +
             std::to_string(report.utterances.size()),
         problems);
  if (report.utterances.size() == conv.truth.size()) {
    SpeakerLabeling labeling;
    for (const Utterance& u : report.utterances)
      labeling.labels.push_back(u.speaker);
    const double accuracy = evaluate_speaker_accuracy(labeling, conv.truth);
    expect(accuracy == 100.0,
           "diarization accuracy = " + std::to_string(accuracy), problems);
  }
  expect(report.speaker1.mean_compound * report.speaker2.mean_compound < 0.0,
         "per-speaker mean compounds do not have opposite signs (" +
             std::to_string(report.speaker1.mean_compound) + ", " +
             std::to_string(report.speaker2.mean_compound) + ")",
         problems);

  const double elapsed = seconds_since(start);
  expect(elapsed < kEndToEndBudgetSeconds,
         "took " + std::to_string(elapsed) + " s (budget 30 s)", problems);
}

void check_offline_determinism(const std::string& cli,
                               std::vector<std::string>& problems) {
  tu::TempDir dir;
  const tu::Conversation conv = tu::make_conversation(4);
  const std::string wav = dir.file("conversation.wav");
  write_wav(conv.signal, wav);
  const std::string oracle = dir.file("oracle.tsv");
  tu::write_text(oracle,
                 "0\ti love this\n"
                 "1\tthis is terrible\n"
                 "2\treally love this\n"
                 "3\tterrible just terrible\n");

  const auto run = [&](const std::string& out) {
    const std::string command = "\"" + cli + "\" analyze \"" + wav +
                                "\" --transcripts \"" + oracle +
                                "\" --out \"" + out + "\"";
    return std::system(command.c_str());
  };

  const std::string out1 = dir.file("report1.json");
  const std::string out2 = dir.file("report2.json");
  const int status1 = run(out1);
  const int status2 = run(out2);
  expect(status1 == 0, "first analyze run exited with status " +
                           std::to_string(status1),
         problems);
  expect(status2 == 0, "second analyze run exited with status " +
                           std::to_string(status2),
         problems);

  const std::string bytes1 = read_file(out1);
  const std::string bytes2 = read_file(out2);
  expect(!bytes1.empty(), "first report is empty", problems);
  expect(bytes1 == bytes2, "reports differ between runs", problems);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance_tests <path-to-convsent-cli>" << std::endl;
    return 2;
  }
  const std::string cli = argv[1];

  int failures = 0;
  failures += !run_check(1, "DTW matches exhaustive path enumeration",
                         check_dtw_oracle);
  failures += !run_check(2, "MFCC numerics (mel point, DCT, shape, gain)",
                         check_mfcc_numerics);
  failures += !run_check(3, "VAD boundary placement within 25 ms",
                         check_vad_placement);
  failures += !run_check(4, "diarization 100% at 13 features + sweep shape",
                         check_diarization);
  failures += !run_check(5, "WRR exact, exhaustive and integer-fraction",
                         check_wrr);
  failures += !run_check(6, "sentiment: NB, rule engine, linear, harness",
                         check_sentiment);
  failures += !run_check(7, "end-to-end four-chunk conversation report",
                         check_end_to_end);
  failures += !run_check(8, "offline determinism of the analyze CLI",
                         [&](std::vector<std::string>& problems) {
                           check_offline_determinism(cli, problems);
                         });

  if (failures == 0) {
    std::cout << "all 8 acceptance checks passed" << std::endl;
    return 0;
  }
  std::cout << failures << " acceptance check(s) failed" << std::endl;
  return 1;
}

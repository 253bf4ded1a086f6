// core/include/convsent/sentiment.hpp
//
// Three sentiment scorers over utterance text: a valence-lexicon rule
// engine, a multinomial naive Bayes classifier, and a linear max-margin
// classifier trained by per-document subgradient descent.

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

#ifndef CONVSENT_SENTIMENT_HPP_
#define CONVSENT_SENTIMENT_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "convsent/errors.hpp"

namespace convsent {

struct LexiconParseError : Error {
  using Error::Error;
};

struct EmptyLexicon : Error {
  using Error::Error;
};

struct SingleClassCorpus : Error {
  using Error::Error;
};

struct EmptyCorpus : Error {
  using Error::Error;
};

enum class Polarity { Negative = -1, Neutral = 0, Positive = 1 };

const char* to_string(Polarity polarity);

// label is positive iff compound >= 0.05, negative iff compound <= -0.05,
// neutral otherwise.
struct SentimentScore {
  double compound = 0.0;  // in [-1, 1]
  Polarity label = Polarity::Neutral;
};

Polarity label_from_compound(double compound);

// ---------------------------------------------------------------------------
// Tokenization

struct Token {
  std::string text;              // punctuation-stripped, original case
  std::size_t exclamations = 0;  // trailing '!' count before stripping
  std::size_t questions = 0;     // trailing '?' count before stripping
};

// Whitespace split; trailing '!'/'?' runs are counted per token, then
// leading/trailing punctuation is stripped. Tokens empty after stripping
// are dropped.
std::vector<Token> tokenize(const std::string& text);

// ---------------------------------------------------------------------------
// Rule engine

// All magic numbers of the rule engine in one record.
struct RuleConstants {
  double negation_scalar = -0.74;
  double caps_boost = 0.733;
  double exclamation_boost = 0.292;  // per '!', at most 4 counted
  double booster_damping[3] = {1.0, 0.95, 0.9};  // distances 1, 2, 3
  double normalization_alpha = 15.0;  // compound = s / sqrt(s^2 + alpha)
  double positive_threshold = 0.05;   // compound >= +t  -> positive
  double negative_threshold = -0.05;  // compound <= -t  -> negative
};

struct Lexicon {
  std::unordered_map<std::string, double> entries;  // lowercase token -> valence
  std::unordered_map<std::string, double> booster_map;  // token -> increment
  std::unordered_set<std::string> negation_set;
};

// TSV lines "token<TAB>valence"; '#' comment lines and blank lines ignored.
// The parsed lexicon carries the built-in booster map and negation set.
Lexicon load_lexicon(const std::string& path);
Lexicon parse_lexicon(const std::string& tsv_text);

// Lexicon bundled into the library.
const Lexicon& default_lexicon();

// Lowercased booster word -> additive increment (positive or negative).
const std::unordered_map<std::string, double>& builtin_boosters();
// Lowercased negation words.
const std::unordered_set<std::string>& builtin_negations();

// Valence-lexicon scorer. Per matched token: all-caps spelling adds
// caps_boost toward the valence sign; booster words up to 3 positions back
// add their increment toward that sign (damped by distance); negations up
// to 3 positions back each multiply the valence by negation_scalar. Each
// trailing '!' in the text (at most 4) then adds exclamation_boost toward
// the summed score's sign, and the sum normalizes to s / sqrt(s^2 + alpha).
SentimentScore rule_polarity(const std::string& text, const Lexicon& lex,
                             const RuleConstants& constants = {});

// ---------------------------------------------------------------------------
// Supervised corpora

struct LabeledDocument {
  std::string text;
  bool positive = false;
};

struct LabeledCorpus {
  std::vector<LabeledDocument> documents;
  std::string name;
};

// TSV lines "pos|neg<TAB>text".
LabeledCorpus load_corpus(const std::string& path);

// ---------------------------------------------------------------------------
// Naive Bayes

// Multinomial NB over lowercased tokens with Laplace add-one smoothing;
// priors are class document frequencies. Per-class likelihoods over the
// vocabulary sum to 1; unseen tokens are skipped at prediction time.
struct NbModel {
  double log_prior_pos = 0.0;
  double log_prior_neg = 0.0;
  std::unordered_map<std::string, std::pair<double, double>>
      log_likelihood;  // token -> (log P(token|pos), log P(token|neg))
  std::size_t vocabulary_size = 0;
};

NbModel train_naive_bayes(const LabeledCorpus& corpus);

// Log joint log P(class) + sum of token log-likelihoods, as
// (positive, negative).
std::pair<double, double> nb_log_joint(const NbModel& model,
                                       const std::string& text);

// Argmax of the log joints; ties resolve to positive.
bool predict_naive_bayes(const NbModel& model, const std::string& text);

// P(positive | text) via normalizing the two log joints.
double nb_posterior_positive(const NbModel& model, const std::string& text);

// ---------------------------------------------------------------------------
// Linear max-margin classifier

struct LinearHyperparams {
  double learning_rate = 0.1;
  double lambda = 0.01;  // L2 regularization strength
  std::size_t epochs = 100;
};

struct LinearModel {
  std::unordered_map<std::string, double> weights;  // lowercase token -> w
  double bias = 0.0;
};

// Called after each epoch with (epoch index, regularized hinge objective).
using EpochObserver = std::function<void(std::size_t, double)>;

// Minimizes lambda*|w|^2 + mean hinge loss by per-document subgradient
// descent in fixed corpus order (no shuffling): each visit first shrinks
// all weights by (1 - 2*lr_e*lambda), then on a margin violation
// (y*(w.x + b) < 1) adds lr_e*y*count to each token weight and lr_e*y to
// the bias, with lr_e = learning_rate / (1 + epoch).
LinearModel train_linear(const LabeledCorpus& corpus,
                         const LinearHyperparams& hp = {},
                         const EpochObserver& observer = nullptr);

double linear_margin(const LinearModel& model, const std::string& text);

// sign(w.x + b); zero resolves to positive.
bool predict_linear(const LinearModel& model, const std::string& text);

// Regularized objective lambda*|w|^2 + mean hinge loss over the corpus.
double linear_objective(const LinearModel& model, const LabeledCorpus& corpus,
                        double lambda);

// ---------------------------------------------------------------------------
// Shared evaluation

// Percentage of documents whose predicted label matches the binary
// reference; neutral predictions never match.
double evaluate_accuracy(
    const std::function<Polarity(const std::string&)>& method,
    const LabeledCorpus& test);

}  // namespace convsent

#endif  // CONVSENT_SENTIMENT_HPP_

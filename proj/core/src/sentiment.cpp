// core/src/sentiment.cpp

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

#include "convsent/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace convsent {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool is_all_caps(const std::string& s) {
  bool has_alpha = false;
  for (const char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      has_alpha = true;
      if (std::islower(u)) return false;
    }
  }
  return has_alpha;
}

// Bag of lowercased token counts, shared by both supervised models.
std::unordered_map<std::string, std::size_t> bag_of_words(
    const std::string& text) {
  std::unordered_map<std::string, std::size_t> bag;
  for (const Token& token : tokenize(text)) ++bag[lowercase(token.text)];
  return bag;
}

double signed_toward(double value, double increment) {
  if (value > 0.0) return increment;
  if (value < 0.0) return -increment;
  return 0.0;
}

}  // namespace

const char* to_string(Polarity polarity) {
  switch (polarity) {
    case Polarity::Positive:
      return "positive";
    case Polarity::Negative:
      return "negative";
    case Polarity::Neutral:
      return "neutral";
  }
  return "unknown";
}

Polarity label_from_compound(double compound) {
  if (compound >= 0.05) return Polarity::Positive;
  if (compound <= -0.05) return Polarity::Negative;
  return Polarity::Neutral;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::istringstream in(text);
  std::string raw;
  while (in >> raw) {
    Token token;
    // Count '!' and '?' in the trailing punctuation run before stripping.
    std::size_t end = raw.size();
    while (end > 0 && std::ispunct(static_cast<unsigned char>(raw[end - 1]))) {
      if (raw[end - 1] == '!') ++token.exclamations;
      if (raw[end - 1] == '?') ++token.questions;
      --end;
    }
    std::size_t begin = 0;
    while (begin < end && std::ispunct(static_cast<unsigned char>(raw[begin])))
      ++begin;
    if (begin == end) continue;
    token.text = raw.substr(begin, end - begin);
    tokens.push_back(std::move(token));
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon parse_lexicon(const std::string& tsv_text) {
  Lexicon lexicon;
  lexicon.booster_map = builtin_boosters();
  lexicon.negation_set = builtin_negations();
  std::istringstream in(tsv_text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw LexiconParseError("lexicon line " + std::to_string(line_no) +
                              " is not token<TAB>valence");
    double valence = 0.0;
    try {
      valence = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw LexiconParseError("lexicon line " + std::to_string(line_no) +
                              " has a non-numeric valence");
    }
    lexicon.entries[lowercase(line.substr(0, tab))] = valence;
  }
  return lexicon;
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconParseError("cannot open lexicon file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str());
}

namespace {
constexpr const char* kDefaultLexiconTsv =
#include "default_lexicon.inc"
    ;  // NOLINT
}  // namespace

const Lexicon& default_lexicon() {
  static const Lexicon lexicon = parse_lexicon(kDefaultLexiconTsv);
  return lexicon;
}

const std::unordered_map<std::string, double>& builtin_boosters() {
  static const std::unordered_map<std::string, double> boosters = [] {
    std::unordered_map<std::string, double> m;
    constexpr double kIncrease = 0.293;
    constexpr double kDecrease = -0.293;
    for (const char* w :
         {"absolutely", "amazingly", "awfully", "completely", "considerably",
          "decidedly", "deeply", "enormously", "entirely", "especially",
          "exceptionally", "extremely", "fabulously", "fully", "greatly",
          "highly", "hugely", "incredibly", "intensely", "majorly", "more",
          "most", "particularly", "purely", "quite", "really", "remarkably",
          "so", "substantially", "thoroughly", "totally", "tremendously",
          "unbelievably", "unusually", "utterly", "very"})
      m[w] = kIncrease;
    for (const char* w :
         {"almost", "barely", "hardly", "kinda", "less", "little",
          "marginally", "occasionally", "partly", "scarcely", "slightly",
          "somewhat", "sorta"})
      m[w] = kDecrease;
    return m;
  }();
  return boosters;
}

const std::unordered_set<std::string>& builtin_negations() {
  static const std::unordered_set<std::string> negations = {
      "aint",     "ain't",    "arent",     "aren't",     "cannot",
      "cant",     "can't",    "couldnt",   "couldn't",   "darent",
      "daren't",  "didnt",    "didn't",    "doesnt",     "doesn't",
      "dont",     "don't",    "hadnt",     "hadn't",     "hasnt",
      "hasn't",   "havent",   "haven't",   "isnt",       "isn't",
      "mightnt",  "mightn't", "mustnt",    "mustn't",    "neither",
      "never",    "none",     "nope",      "nor",        "not",
      "nothing",  "nowhere",  "oughtnt",   "oughtn't",   "shant",
      "shan't",   "shouldnt", "shouldn't", "wasnt",      "wasn't",
      "werent",   "weren't",  "wont",      "won't",      "wouldnt",
      "wouldn't", "rarely",   "seldom",    "despite",    "without"};
  return negations;
}

// ---------------------------------------------------------------------------
// Rule engine

SentimentScore rule_polarity(const std::string& text, const Lexicon& lex,
                             const RuleConstants& constants) {
  if (lex.entries.empty()) throw EmptyLexicon("lexicon has no valence entries");

  const std::vector<Token> tokens = tokenize(text);
  double sum = 0.0;
  std::size_t exclamations = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    exclamations += tokens[t].exclamations;
    const auto hit = lex.entries.find(lowercase(tokens[t].text));
    if (hit == lex.entries.end()) continue;
    double valence = hit->second;
    if (is_all_caps(tokens[t].text))
      valence += signed_toward(valence, constants.caps_boost);
    for (std::size_t d = 1; d <= 3 && d <= t; ++d) {
      const std::string prev = lowercase(tokens[t - d].text);
      const auto booster = lex.booster_map.find(prev);
      if (booster != lex.booster_map.end()) {
        valence += signed_toward(
            valence, booster->second * constants.booster_damping[d - 1]);
      }
    }
    for (std::size_t d = 1; d <= 3 && d <= t; ++d) {
      if (lex.negation_set.count(lowercase(tokens[t - d].text)) > 0)
        valence *= constants.negation_scalar;
    }
    sum += valence;
  }

  const double capped =
      static_cast<double>(std::min<std::size_t>(exclamations, 4));
  sum += signed_toward(sum, capped * constants.exclamation_boost);

  SentimentScore score;
  score.compound =
      sum / std::sqrt(sum * sum + constants.normalization_alpha);
  if (score.compound >= constants.positive_threshold)
    score.label = Polarity::Positive;
  else if (score.compound <= constants.negative_threshold)
    score.label = Polarity::Negative;
  else
    score.label = Polarity::Neutral;
  return score;
}

// ---------------------------------------------------------------------------
// Corpora

LabeledCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  LabeledCorpus corpus;
  corpus.name = std::filesystem::path(path).stem().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("corpus file " + path + " line " + std::to_string(line_no) +
                  " is not label<TAB>text");
    const std::string label = line.substr(0, tab);
    if (label != "pos" && label != "neg")
      throw Error("corpus file " + path + " line " + std::to_string(line_no) +
                  " has label '" + label + "', expected pos or neg");
    corpus.documents.push_back(
        LabeledDocument{line.substr(tab + 1), label == "pos"});
  }
  return corpus;
}

namespace {

void require_both_classes(const LabeledCorpus& corpus) {
  if (corpus.documents.empty()) throw EmptyCorpus("corpus has no documents");
  bool any_pos = false, any_neg = false;
  for (const LabeledDocument& doc : corpus.documents)
    (doc.positive ? any_pos : any_neg) = true;
  if (!any_pos || !any_neg)
    throw SingleClassCorpus("training corpus must contain both classes");
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes

NbModel train_naive_bayes(const LabeledCorpus& corpus) {
  require_both_classes(corpus);

  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> counts;
  std::size_t total_pos = 0, total_neg = 0, pos_docs = 0, neg_docs = 0;
  for (const LabeledDocument& doc : corpus.documents) {
    (doc.positive ? pos_docs : neg_docs) += 1;
    for (const auto& [token, count] : bag_of_words(doc.text)) {
      auto& entry = counts[token];
      (doc.positive ? entry.first : entry.second) += count;
      (doc.positive ? total_pos : total_neg) += count;
    }
  }

  NbModel model;
  const auto docs = static_cast<double>(corpus.documents.size());
  model.log_prior_pos = std::log(static_cast<double>(pos_docs) / docs);
  model.log_prior_neg = std::log(static_cast<double>(neg_docs) / docs);
  model.vocabulary_size = counts.size();
  const double denom_pos =
      static_cast<double>(total_pos + model.vocabulary_size);
  const double denom_neg =
      static_cast<double>(total_neg + model.vocabulary_size);
  for (const auto& [token, count] : counts) {
    model.log_likelihood[token] = {
        std::log(static_cast<double>(count.first + 1) / denom_pos),
        std::log(static_cast<double>(count.second + 1) / denom_neg)};
  }
  return model;
}

std::pair<double, double> nb_log_joint(const NbModel& model,
                                       const std::string& text) {
  double log_pos = model.log_prior_pos;
  double log_neg = model.log_prior_neg;
  for (const auto& [token, count] : bag_of_words(text)) {
    const auto it = model.log_likelihood.find(token);
    if (it == model.log_likelihood.end()) continue;  // unseen tokens skipped
    log_pos += static_cast<double>(count) * it->second.first;
    log_neg += static_cast<double>(count) * it->second.second;
  }
  return {log_pos, log_neg};
}

bool predict_naive_bayes(const NbModel& model, const std::string& text) {
  const auto [log_pos, log_neg] = nb_log_joint(model, text);
  return log_pos >= log_neg;  // tie resolves to positive
}

double nb_posterior_positive(const NbModel& model, const std::string& text) {
  const auto [log_pos, log_neg] = nb_log_joint(model, text);
  const double peak = std::max(log_pos, log_neg);
  const double pos = std::exp(log_pos - peak);
  const double neg = std::exp(log_neg - peak);
  return pos / (pos + neg);
}

// ---------------------------------------------------------------------------
// Linear classifier

namespace {

struct CountedDocument {
  std::unordered_map<std::string, std::size_t> counts;
  double y = 1.0;  // +1 positive, -1 negative
};

double hinge_mean(const LinearModel& model,
                  const std::vector<CountedDocument>& docs) {
  double acc = 0.0;
  for (const CountedDocument& doc : docs) {
    double margin = model.bias;
    for (const auto& [token, count] : doc.counts) {
      const auto it = model.weights.find(token);
      if (it != model.weights.end())
        margin += it->second * static_cast<double>(count);
    }
    acc += std::max(0.0, 1.0 - doc.y * margin);
  }
  return acc / static_cast<double>(docs.size());
}

}  // namespace

LinearModel train_linear(const LabeledCorpus& corpus,
                         const LinearHyperparams& hp,
                         const EpochObserver& observer) {
  require_both_classes(corpus);

  std::vector<CountedDocument> docs;
  docs.reserve(corpus.documents.size());
  for (const LabeledDocument& doc : corpus.documents)
    docs.push_back(CountedDocument{bag_of_words(doc.text),
                                   doc.positive ? 1.0 : -1.0});

  LinearModel model;
  for (const CountedDocument& doc : docs)
    for (const auto& [token, count] : doc.counts) model.weights.emplace(token, 0.0);

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const double lr = hp.learning_rate / (1.0 + static_cast<double>(epoch));
    const double shrink = 1.0 - 2.0 * lr * hp.lambda;
    for (const CountedDocument& doc : docs) {
      for (auto& [token, w] : model.weights) w *= shrink;
      double margin = model.bias;
      for (const auto& [token, count] : doc.counts)
        margin += model.weights[token] * static_cast<double>(count);
      if (doc.y * margin < 1.0) {
        for (const auto& [token, count] : doc.counts)
          model.weights[token] += lr * doc.y * static_cast<double>(count);
        model.bias += lr * doc.y;
      }
    }
    if (observer) {
      double norm = 0.0;
      for (const auto& [token, w] : model.weights) norm += w * w;
      observer(epoch, hp.lambda * norm + hinge_mean(model, docs));
    }
  }
  return model;
}

double linear_margin(const LinearModel& model, const std::string& text) {
  double margin = model.bias;
  for (const auto& [token, count] : bag_of_words(text)) {
    const auto it = model.weights.find(token);
    if (it != model.weights.end())
      margin += it->second * static_cast<double>(count);
  }
  return margin;
}

bool predict_linear(const LinearModel& model, const std::string& text) {
  return linear_margin(model, text) >= 0.0;  // zero resolves to positive
}

double linear_objective(const LinearModel& model, const LabeledCorpus& corpus,
                        double lambda) {
  if (corpus.documents.empty()) throw EmptyCorpus("corpus has no documents");
  std::vector<CountedDocument> docs;
  docs.reserve(corpus.documents.size());
  for (const LabeledDocument& doc : corpus.documents)
    docs.push_back(CountedDocument{bag_of_words(doc.text),
                                   doc.positive ? 1.0 : -1.0});
  double norm = 0.0;
  for (const auto& [token, w] : model.weights) norm += w * w;
  return lambda * norm + hinge_mean(model, docs);
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate_accuracy(
    const std::function<Polarity(const std::string&)>& method,
    const LabeledCorpus& test) {
  if (test.documents.empty()) throw EmptyCorpus("test corpus has no documents");
  std::size_t correct = 0;
  for (const LabeledDocument& doc : test.documents) {
    const Polarity predicted = method(doc.text);
    const Polarity truth = doc.positive ? Polarity::Positive : Polarity::Negative;
    if (predicted == truth) ++correct;  // neutral predictions never match
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(test.documents.size());
}

}  // namespace convsent

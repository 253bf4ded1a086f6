// core/src/transcribe.cpp

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

#include "convsent/transcribe.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace convsent {

namespace {

class OracleBackend final : public TranscriptionBackend {
 public:
  explicit OracleBackend(const OracleConfig& cfg) : path_(cfg.oracle_path) {
    std::ifstream in(path_);
    if (!in)
      throw BackendUnreachable("cannot open oracle transcript file: " + path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos)
        throw MalformedResponse("oracle file " + path_ + " line " +
                                std::to_string(line_no) + " has no tab");
      std::size_t id = 0;
      try {
        id = std::stoul(line.substr(0, tab));
      } catch (const std::exception&) {
        throw MalformedResponse("oracle file " + path_ + " line " +
                                std::to_string(line_no) +
                                " has a non-numeric chunk id");
      }
      entries_[id] = line.substr(tab + 1);
    }
  }

  Transcript transcribe(const Chunk& chunk) override {
    const auto it = entries_.find(chunk.id);
    if (it == entries_.end())
      throw MissingOracleEntry("oracle file " + path_ +
                               " has no entry for chunk " +
                               std::to_string(chunk.id));
    return Transcript{chunk.id, it->second, name()};
  }

  const char* name() const override { return "oracle"; }

 private:
  std::string path_;
  std::unordered_map<std::size_t, std::string> entries_;
};

class HttpBackend final : public TranscriptionBackend {
 public:
  explicit HttpBackend(const HttpConfig& cfg) : cfg_(cfg) {
    const std::size_t scheme_end = cfg.endpoint_url.find("://");
    if (scheme_end == std::string::npos)
      throw BackendUnreachable("endpoint URL lacks a scheme: " +
                               cfg.endpoint_url);
    const std::size_t path_start =
        cfg.endpoint_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_ = cfg.endpoint_url;
      path_ = "/";
    } else {
      base_ = cfg.endpoint_url.substr(0, path_start);
      path_ = cfg.endpoint_url.substr(path_start);
    }
  }

  Transcript transcribe(const Chunk& chunk) override {
    AudioSignal signal;
    signal.samples = chunk.samples;
    signal.sample_rate_hz = chunk.sample_rate_hz;
    const std::vector<std::uint8_t> wav = encode_wav(signal);
    const std::string body(reinterpret_cast<const char*>(wav.data()),
                           wav.size());

    httplib::Headers headers;
    if (!cfg_.api_key_env_var.empty()) {
      const char* key = std::getenv(cfg_.api_key_env_var.c_str());
      if (key != nullptr && *key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_failure = "no attempt made";
    for (std::size_t attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(100 << (attempt - 1)));
      }
      httplib::Client client(base_);
      const auto sec = static_cast<time_t>(cfg_.timeout_s);
      const auto usec =
          static_cast<time_t>((cfg_.timeout_s - static_cast<double>(sec)) * 1e6);
      client.set_connection_timeout(sec, usec);
      client.set_read_timeout(sec, usec);
      client.set_write_timeout(sec, usec);

      httplib::Result res = client.Post(path_, headers, body, "audio/wav");
      if (!res) {
        last_failure = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_failure = "HTTP status " + std::to_string(res->status);
        continue;
      }
      return parse_response(chunk.id, res->body);
    }
    throw BackendUnreachable("backend " + cfg_.endpoint_url + " failed after " +
                             std::to_string(cfg_.max_retries + 1) +
                             " attempts; last failure: " + last_failure);
  }

  const char* name() const override { return "http"; }

 private:
  Transcript parse_response(std::size_t chunk_id, const std::string& body) const {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("transcript") ||
        !doc["transcript"].is_string()) {
      throw MalformedResponse(
          "backend response is not a JSON object with a string \"transcript\" "
          "field");
    }
    return Transcript{chunk_id, doc["transcript"].get<std::string>(), name()};
  }

  HttpConfig cfg_;
  std::string base_;
  std::string path_;
};

std::vector<std::string> normalize_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string raw;
  while (in >> raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && std::ispunct(static_cast<unsigned char>(raw[begin])))
      ++begin;
    while (end > begin && std::ispunct(static_cast<unsigned char>(raw[end - 1])))
      --end;
    if (begin == end) continue;
    std::string word = raw.substr(begin, end - begin);
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    words.push_back(std::move(word));
  }
  return words;
}

}  // namespace

std::unique_ptr<TranscriptionBackend> make_backend(const BackendConfig& cfg) {
  return std::visit(
      [](const auto& concrete) -> std::unique_ptr<TranscriptionBackend> {
        using T = std::decay_t<decltype(concrete)>;
        if constexpr (std::is_same_v<T, OracleConfig>)
          return std::make_unique<OracleBackend>(concrete);
        else
          return std::make_unique<HttpBackend>(concrete);
      },
      cfg);
}

Transcript transcribe(const Chunk& chunk, const BackendConfig& cfg) {
  return make_backend(cfg)->transcribe(chunk);
}

std::vector<Transcript> transcribe_chunks(const std::vector<Chunk>& chunks,
                                          TranscriptionBackend& backend) {
  std::vector<Transcript> out;
  out.reserve(chunks.size());
  for (const Chunk& chunk : chunks) out.push_back(backend.transcribe(chunk));
  return out;
}

WrrReport compute_wrr(const std::string& reference,
                      const std::string& hypothesis) {
  const std::vector<std::string> ref = normalize_words(reference);
  const std::vector<std::string> hyp = normalize_words(hypothesis);
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();

  enum class Op : std::uint8_t { Start, Match, Substitute, Delete, Insert };
  std::vector<double> dp((n + 1) * (m + 1), 0.0);
  std::vector<Op> from((n + 1) * (m + 1), Op::Start);
  const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t j = 1; j <= m; ++j) {
    dp[at(0, j)] = static_cast<double>(j);
    from[at(0, j)] = Op::Insert;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    dp[at(i, 0)] = static_cast<double>(i);
    from[at(i, 0)] = Op::Delete;
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const bool equal = ref[i - 1] == hyp[j - 1];
      double best = inf;
      Op op = Op::Start;
      // Strict improvement keeps the earlier (preferred) operation on ties:
      // match > substitution > deletion > insertion.
      if (equal && dp[at(i - 1, j - 1)] < best) {
        best = dp[at(i - 1, j - 1)];
        op = Op::Match;
      }
      if (!equal && dp[at(i - 1, j - 1)] + 1.0 < best) {
        best = dp[at(i - 1, j - 1)] + 1.0;
        op = Op::Substitute;
      }
      if (dp[at(i - 1, j)] + 1.0 < best) {
        best = dp[at(i - 1, j)] + 1.0;
        op = Op::Delete;
      }
      if (dp[at(i, j - 1)] + 1.0 < best) {
        best = dp[at(i, j - 1)] + 1.0;
        op = Op::Insert;
      }
      dp[at(i, j)] = best;
      from[at(i, j)] = op;
    }
  }

  WrrReport report;
  report.reference_word_count = n;
  std::size_t i = n, j = m;
  while (i != 0 || j != 0) {
    switch (from[at(i, j)]) {
      case Op::Match:
        ++report.hits;
        --i;
        --j;
        break;
      case Op::Substitute:
        ++report.substitutions;
        --i;
        --j;
        break;
      case Op::Delete:
        ++report.deletions;
        --i;
        break;
      case Op::Insert:
        ++report.insertions;
        --j;
        break;
      case Op::Start:
        throw Error("internal: broken WRR backtrace");
    }
  }
  report.wrr_percent =
      n == 0 ? 0.0
             : 100.0 * static_cast<double>(report.hits) / static_cast<double>(n);
  return report;
}

BackendEvaluation evaluate_backend(const std::vector<Chunk>& chunks,
                                   const std::vector<Transcript>& references,
                                   const BackendConfig& cfg) {
  if (chunks.empty()) throw EmptyEvaluation("no chunks to evaluate");
  std::unordered_map<std::size_t, const std::string*> ref_by_id;
  for (const Transcript& t : references) ref_by_id[t.chunk_id] = &t.text;

  const std::unique_ptr<TranscriptionBackend> backend = make_backend(cfg);
  BackendEvaluation evaluation;
  evaluation.per_chunk.reserve(chunks.size());
  for (const Chunk& chunk : chunks) {
    const auto it = ref_by_id.find(chunk.id);
    if (it == ref_by_id.end())
      throw MissingOracleEntry("no reference transcript for chunk " +
                               std::to_string(chunk.id));
    const Transcript hyp = backend->transcribe(chunk);
    const WrrReport report = compute_wrr(*it->second, hyp.text);
    evaluation.aggregate.reference_word_count += report.reference_word_count;
    evaluation.aggregate.hits += report.hits;
    evaluation.aggregate.substitutions += report.substitutions;
    evaluation.aggregate.deletions += report.deletions;
    evaluation.aggregate.insertions += report.insertions;
    evaluation.per_chunk.push_back(report);
  }
  evaluation.aggregate.wrr_percent =
      evaluation.aggregate.reference_word_count == 0
          ? 0.0
          : 100.0 * static_cast<double>(evaluation.aggregate.hits) /
                static_cast<double>(evaluation.aggregate.reference_word_count);
  return evaluation;
}

}  // namespace convsent

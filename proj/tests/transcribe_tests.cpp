// tests/transcribe_tests.cpp
//
// Oracle and HTTP transcription backends, word recognition rate scoring and
// backend evaluation.

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"

#include "convsent/audio.hpp"
#include "convsent/transcribe.hpp"
#include "testutil.hpp"

using namespace convsent;
namespace tu = convsent::testutil;

namespace {

Chunk make_chunk(std::size_t id, std::size_t n_samples = 800) {
  Chunk c;
  c.id = id;
  c.span = {0, n_samples};
  // Exactly PCM-representable samples survive the WAV round-trip bit-for-bit.
  for (std::size_t i = 0; i < n_samples; ++i)
    c.samples.push_back(static_cast<double>((i % 100) * 100) / 32768.0);
  c.sample_rate_hz = 16000;
  return c;
}

// Runs an in-process HTTP server for backend tests.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/transcribe", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/transcribe";
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace

TEST_CASE("oracle backend serves transcripts by chunk id") {
  tu::TempDir dir;
  const std::string path = dir.file("oracle.tsv");
  tu::write_text(path,
                 "# comment line\n"
                 "0\thello there\n"
                 "\n"
                 "2\tbye for now\r\n");

  const BackendConfig cfg = OracleConfig{path};
  const auto backend = make_backend(cfg);
  CHECK(backend->name() == std::string("oracle"));

  const Transcript t0 = backend->transcribe(make_chunk(0));
  CHECK(t0.chunk_id == 0);
  CHECK(t0.text == "hello there");
  CHECK(t0.backend_name == "oracle");

  const Transcript t2 = transcribe(make_chunk(2), cfg);
  CHECK(t2.text == "bye for now");

  CHECK_THROWS_AS(backend->transcribe(make_chunk(1)), MissingOracleEntry);
}

TEST_CASE("oracle backend validates its file") {
  const BackendConfig missing = OracleConfig{"/nonexistent/oracle.tsv"};
  CHECK_THROWS_AS(make_backend(missing), BackendUnreachable);

  tu::TempDir dir;
  const std::string no_tab = dir.file("no_tab.tsv");
  tu::write_text(no_tab, "0 hello without tab\n");
  CHECK_THROWS_AS(make_backend(BackendConfig{OracleConfig{no_tab}}),
                  MalformedResponse);

  const std::string bad_id = dir.file("bad_id.tsv");
  tu::write_text(bad_id, "zero\thello\n");
  CHECK_THROWS_AS(make_backend(BackendConfig{OracleConfig{bad_id}}),
                  MalformedResponse);
}

TEST_CASE("oracle transcription is deterministic") {
  tu::TempDir dir;
  const std::string path = dir.file("oracle.tsv");
  tu::write_text(path, "0\tsame words every time\n");
  const BackendConfig cfg = OracleConfig{path};
  CHECK(transcribe(make_chunk(0), cfg).text ==
        transcribe(make_chunk(0), cfg).text);
}

TEST_CASE("transcribe_chunks preserves chunk order") {
  tu::TempDir dir;
  const std::string path = dir.file("oracle.tsv");
  tu::write_text(path, "0\tfirst\n1\tsecond\n2\tthird\n");
  const auto backend = make_backend(BackendConfig{OracleConfig{path}});
  const std::vector<Chunk> chunks = {make_chunk(0), make_chunk(1),
                                     make_chunk(2)};
  const std::vector<Transcript> out = transcribe_chunks(chunks, *backend);
  REQUIRE(out.size() == 3);
  CHECK(out[0].text == "first");
  CHECK(out[1].text == "second");
  CHECK(out[2].text == "third");
  for (std::size_t i = 0; i < 3; ++i) CHECK(out[i].chunk_id == i);
}

TEST_CASE("http backend posts WAV audio and parses the transcript") {
  std::string seen_content_type;
  std::string seen_auth;
  std::string seen_body;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_content_type = req.get_header_value("Content-Type");
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content("{\"transcript\": \"from the stub\"}", "application/json");
  });

  setenv("CONVSENT_TEST_API_KEY", "sekret", 1);
  HttpConfig cfg;
  cfg.endpoint_url = server.url();
  cfg.api_key_env_var = "CONVSENT_TEST_API_KEY";

  const Chunk chunk = make_chunk(7);
  const Transcript t = transcribe(chunk, BackendConfig{cfg});
  CHECK(t.chunk_id == 7);
  CHECK(t.text == "from the stub");
  CHECK(t.backend_name == "http");

  CHECK(seen_content_type == "audio/wav");
  CHECK(seen_auth == "Bearer sekret");

  // The posted body is a decodable WAV holding exactly the chunk's samples.
  const std::vector<std::uint8_t> bytes(seen_body.begin(), seen_body.end());
  const AudioSignal decoded = decode_wav(bytes);
  CHECK(decoded.sample_rate_hz == chunk.sample_rate_hz);
  REQUIRE(decoded.samples.size() == chunk.samples.size());
  for (std::size_t i = 0; i < decoded.samples.size(); ++i)
    CHECK(decoded.samples[i] == chunk.samples[i]);

  unsetenv("CONVSENT_TEST_API_KEY");
}

TEST_CASE("http backend omits the Authorization header without a key") {
  bool had_auth = true;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    had_auth = req.has_header("Authorization");
    res.set_content("{\"transcript\": \"ok\"}", "application/json");
  });

  HttpConfig cfg;
  cfg.endpoint_url = server.url();

  SUBCASE("no env var configured") { cfg.api_key_env_var = ""; }
  SUBCASE("env var configured but unset") {
    unsetenv("CONVSENT_ABSENT_KEY");
    cfg.api_key_env_var = "CONVSENT_ABSENT_KEY";
  }
  SUBCASE("env var configured but empty") {
    setenv("CONVSENT_EMPTY_KEY", "", 1);
    cfg.api_key_env_var = "CONVSENT_EMPTY_KEY";
  }

  CHECK(transcribe(make_chunk(0), BackendConfig{cfg}).text == "ok");
  CHECK_FALSE(had_auth);
}

TEST_CASE("http backend retries server errors until one succeeds") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    const int n = ++calls;
    if (n <= 2) {
      res.status = 500;
      res.set_content("try again later", "text/plain");
    } else {
      res.set_content("{\"transcript\": \"third time lucky\"}",
                      "application/json");
    }
  });

  HttpConfig cfg;
  cfg.endpoint_url = server.url();
  cfg.max_retries = 3;
  const Transcript t = transcribe(make_chunk(0), BackendConfig{cfg});
  CHECK(t.text == "third time lucky");
  CHECK(calls.load() == 3);
}

TEST_CASE("http backend gives up after max_retries + 1 attempts") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 503;
  });

  HttpConfig cfg;
  cfg.endpoint_url = server.url();
  cfg.max_retries = 2;
  CHECK_THROWS_AS(transcribe(make_chunk(0), BackendConfig{cfg}),
                  BackendUnreachable);
  CHECK(calls.load() == 3);

  cfg.max_retries = 0;
  calls = 0;
  CHECK_THROWS_AS(transcribe(make_chunk(0), BackendConfig{cfg}),
                  BackendUnreachable);
  CHECK(calls.load() == 1);
}

TEST_CASE("http backend reports unreachable hosts") {
  HttpConfig cfg;
  cfg.endpoint_url = "http://127.0.0.1:9/transcribe";  // nothing listens here
  cfg.max_retries = 1;
  cfg.timeout_s = 1.0;
  CHECK_THROWS_AS(transcribe(make_chunk(0), BackendConfig{cfg}),
                  BackendUnreachable);
}

TEST_CASE("http backend rejects malformed 200 responses without retrying") {
  std::atomic<int> calls{0};
  std::string payload;
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.set_content(payload, "application/json");
  });

  HttpConfig cfg;
  cfg.endpoint_url = server.url();
  cfg.max_retries = 3;

  SUBCASE("not JSON at all") { payload = "certainly not json"; }
  SUBCASE("missing transcript field") { payload = "{\"value\": 3}"; }
  SUBCASE("transcript is not a string") { payload = "{\"transcript\": 42}"; }
  SUBCASE("top level is not an object") { payload = "[\"transcript\"]"; }

  CHECK_THROWS_AS(transcribe(make_chunk(0), BackendConfig{cfg}),
                  MalformedResponse);
  CHECK(calls.load() == 1);
}

TEST_CASE("compute_wrr hand examples") {
  const WrrReport identity = compute_wrr("how are you", "how are you");
  CHECK(identity.reference_word_count == 3);
  CHECK(identity.hits == 3);
  CHECK(identity.substitutions == 0);
  CHECK(identity.deletions == 0);
  CHECK(identity.insertions == 0);
  CHECK(identity.wrr_percent == 100.0);

  const WrrReport drop =
      compute_wrr("how are you doing today", "how are you today");
  CHECK(drop.reference_word_count == 5);
  CHECK(drop.hits == 4);
  CHECK(drop.deletions == 1);
  CHECK(drop.substitutions == 0);
  CHECK(drop.insertions == 0);
  CHECK(drop.wrr_percent == doctest::Approx(80.0));
}

TEST_CASE("compute_wrr normalizes case and edge punctuation") {
  const WrrReport r = compute_wrr("Hello, World!", "hello world");
  CHECK(r.hits == 2);
  CHECK(r.wrr_percent == 100.0);

  // Interior apostrophes survive normalization.
  const WrrReport keep = compute_wrr("don't stop", "don't stop");
  CHECK(keep.hits == 2);
}

TEST_CASE("compute_wrr edge cases") {
  const WrrReport both_empty = compute_wrr("", "");
  CHECK(both_empty.reference_word_count == 0);
  CHECK(both_empty.wrr_percent == 0.0);

  const WrrReport empty_hyp = compute_wrr("one two three four five", "");
  CHECK(empty_hyp.reference_word_count == 5);
  CHECK(empty_hyp.hits == 0);
  CHECK(empty_hyp.deletions == 5);
  CHECK(empty_hyp.wrr_percent == 0.0);

  const WrrReport empty_ref = compute_wrr("", "extra words here");
  CHECK(empty_ref.reference_word_count == 0);
  CHECK(empty_ref.insertions == 3);
  CHECK(empty_ref.wrr_percent == 0.0);
}

TEST_CASE("one substitution in fifteen words scores 93.333333") {
  std::string ref, hyp;
  for (int i = 0; i < 15; ++i) {
    const std::string w = "w" + std::to_string(i);
    ref += (i ? " " : "") + w;
    hyp += (i ? " " : "") + (i == 7 ? std::string("wrong") : w);
  }
  const WrrReport r = compute_wrr(ref, hyp);
  CHECK(r.hits == 14);
  CHECK(r.substitutions == 1);
  CHECK(r.wrr_percent == doctest::Approx(1400.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("alignment prefers matches over substitution pairs") {
  const WrrReport r = compute_wrr("a a", "a");
  CHECK(r.hits == 1);
  CHECK(r.deletions == 1);
  CHECK(r.substitutions == 0);
}

TEST_CASE("wrr counts always satisfy the bookkeeping identities") {
  std::mt19937 rng(3);
  const std::vector<std::string> lexicon = {"red", "green", "blue", "cyan"};
  for (int t = 0; t < 300; ++t) {
    const auto sentence = [&](std::size_t max_len) {
      std::string s;
      const std::size_t n = rng() % (max_len + 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += lexicon[rng() % lexicon.size()];
      }
      return s;
    };
    const std::string ref = sentence(8);
    const std::string hyp = sentence(8);
    const WrrReport r = compute_wrr(ref, hyp);
    CHECK(r.hits + r.substitutions + r.deletions == r.reference_word_count);
    CHECK(r.wrr_percent >= 0.0);
    CHECK(r.wrr_percent <= 100.0);
    if (r.reference_word_count > 0) {
      CHECK(r.wrr_percent ==
            doctest::Approx(100.0 * static_cast<double>(r.hits) /
                            static_cast<double>(r.reference_word_count)));
    }
  }
}

TEST_CASE("edit costs match the exhaustive alignment search (small)") {
  // The full exhaustive sweep over length <= 6 runs in the acceptance suite;
  // this keeps a fast length <= 4 version in the unit tests.
  const auto sequences = tu::word_sequences(4);
  for (const auto& ref : sequences) {
    for (const auto& hyp : sequences) {
      const WrrReport r =
          compute_wrr(tu::join_words(ref), tu::join_words(hyp));
      const std::size_t dp_cost = r.substitutions + r.deletions + r.insertions;
      CHECK(dp_cost == tu::wrr_bruteforce_cost(ref, hyp));
    }
  }
}

TEST_CASE("evaluate_backend pools counts across chunks") {
  tu::TempDir dir;
  const std::string path = dir.file("oracle.tsv");
  tu::write_text(path, "0\tx y z\n1\ta b c\n");
  const BackendConfig cfg = OracleConfig{path};

  const std::vector<Chunk> chunks = {make_chunk(0), make_chunk(1)};
  std::vector<Transcript> refs(2);
  refs[0] = {0, "x y z", "reference"};
  refs[1] = {1, "p q r", "reference"};

  const BackendEvaluation eval = evaluate_backend(chunks, refs, cfg);
  REQUIRE(eval.per_chunk.size() == 2);
  CHECK(eval.per_chunk[0].wrr_percent == 100.0);
  CHECK(eval.per_chunk[1].wrr_percent == 0.0);
  CHECK(eval.aggregate.reference_word_count == 6);
  CHECK(eval.aggregate.hits == 3);
  CHECK(eval.aggregate.wrr_percent == doctest::Approx(50.0));
}

TEST_CASE("evaluate_backend against its own oracle is perfect") {
  tu::TempDir dir;
  const std::string path = dir.file("oracle.tsv");
  tu::write_text(path, "0\tgood morning\n1\tnice to meet you\n");
  const BackendConfig cfg = OracleConfig{path};

  const std::vector<Chunk> chunks = {make_chunk(0), make_chunk(1)};
  std::vector<Transcript> refs(2);
  refs[0] = {0, "good morning", "reference"};
  refs[1] = {1, "nice to meet you", "reference"};

  const BackendEvaluation eval = evaluate_backend(chunks, refs, cfg);
  CHECK(eval.aggregate.wrr_percent == 100.0);
  CHECK(eval.aggregate.hits == 6);
}

TEST_CASE("evaluate_backend validates its inputs") {
  tu::TempDir dir;
  const std::string path = dir.file("oracle.tsv");
  tu::write_text(path, "0\thello\n");
  const BackendConfig cfg = OracleConfig{path};

  CHECK_THROWS_AS(evaluate_backend({}, {}, cfg), EmptyEvaluation);

  // A chunk without a matching reference transcript cannot be scored.
  const std::vector<Chunk> chunks = {make_chunk(0)};
  const std::vector<Transcript> wrong_refs = {{5, "hello", "reference"}};
  CHECK_THROWS_AS(evaluate_backend(chunks, wrong_refs, cfg),
                  MissingOracleEntry);
}

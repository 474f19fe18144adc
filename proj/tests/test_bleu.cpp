// Copyright 2026 The snrg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include "snrg/bleu.hpp"
#include "snrg/error.hpp"

using namespace snrg;

namespace {

std::string data(const std::string& name) { return std::string(SNRG_TEST_DATA) + "/bleu/" + name; }

std::map<std::string, double> expected_scores() {
  std::ifstream in(data("scores.tsv"));
  std::map<std::string, double> out;
  std::string name;
  double v;
  while (in >> name >> v) out[name] = v;
  return out;
}

}  // namespace

TEST_SUITE("bleu") {

TEST_CASE("matches the reference scorer on the two-reference suite") {
  auto expected = expected_scores();
  REQUIRE(expected.size() == 5);
  auto cand = load_sentences(data("cand.txt"));
  auto two = load_references({data("ref0.txt"), data("ref1.txt")});
  auto one = load_references({data("ref0.txt")});
  REQUIRE(cand.size() == 20);
  CHECK(corpus_bleu(cand, two) == doctest::Approx(expected["two_refs"]).epsilon(1e-9));
  CHECK(corpus_bleu(cand, one) == doctest::Approx(expected["one_ref"]).epsilon(1e-9));
  BleuOptions smooth;
  smooth.smooth = true;
  CHECK(corpus_bleu(cand, two, smooth) == doctest::Approx(expected["two_refs_add1"]).epsilon(1e-9));
  BleuOptions cased;
  cased.lowercase = false;
  CHECK(corpus_bleu(cand, two, cased) == doctest::Approx(expected["two_refs_cased"]).epsilon(1e-9));
  BleuOptions bigram;
  bigram.max_n = 2;
  CHECK(corpus_bleu(cand, one, bigram) == doctest::Approx(expected["bleu2_one_ref"]).epsilon(1e-9));
}

TEST_CASE("identity and empty candidates") {
  auto refs = load_sentences(data("ref0.txt"));
  std::vector<std::vector<Tokens>> wrapped;
  for (const auto& r : refs) wrapped.push_back({r});
  CHECK(corpus_bleu(refs, wrapped) == 1.0);
  std::vector<Tokens> empty(refs.size());
  CHECK(corpus_bleu(empty, wrapped) == 0.0);
  CHECK(corpus_bleu(std::vector<std::string>{"The Boy"}, std::vector<std::string>{"the boy"}) == 0.0);  // no 3-grams
  BleuOptions two;
  two.max_n = 2;
  CHECK(corpus_bleu(std::vector<std::string>{"The Boy"}, std::vector<std::string>{"the boy"}, two) == 1.0);
}

TEST_CASE("clipped unigram precision") {
  BleuOptions one;
  one.max_n = 1;
  BleuStats s = sentence_stats({"the", "the", "the"}, {{"the", "boy"}}, one);
  CHECK(s.matches[0] == 1);
  CHECK(s.totals[0] == 3);
  CHECK(bleu_score(s, one) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("closest reference length, ties to the shorter") {
  Tokens cand{"a", "b", "c", "d"};
  CHECK(sentence_stats(cand, {{"a", "b", "c"}, {"a", "b", "c", "d", "e"}}).reference_length == 3);
  CHECK(sentence_stats(cand, {{"a"}, {"a", "b", "c", "d", "e", "f"}, {"x", "y", "z", "w", "v"}}).reference_length == 5);
  // Brevity penalty exp(1 - r/c).
  BleuOptions one;
  one.max_n = 1;
  BleuStats s = sentence_stats({"a", "b"}, {{"a", "b", "c", "d"}}, one);
  CHECK(bleu_score(s, one) == doctest::Approx(std::exp(1.0 - 2.0)));
}

TEST_CASE("corpus score is invariant under sentence order") {
  auto cand = load_sentences(data("cand.txt"));
  auto refs = load_references({data("ref0.txt"), data("ref1.txt")});
  double base = corpus_bleu(cand, refs);
  std::mt19937 rng(3);
  std::vector<std::size_t> order(cand.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int t = 0; t < 10; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Tokens> c;
    std::vector<std::vector<Tokens>> r;
    for (auto i : order) {
      c.push_back(cand[i]);
      r.push_back(refs[i]);
    }
    CHECK(corpus_bleu(c, r) == doctest::Approx(base).epsilon(1e-12));
  }
  BleuStats sum;
  for (std::size_t i = 0; i < cand.size(); ++i) sum += sentence_stats(cand[i], refs[i]);
  BleuStats minus = sum;
  minus -= sentence_stats(cand[0], refs[0]);
  minus += sentence_stats(cand[0], refs[0]);
  CHECK(bleu_score(minus) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("count mismatch and ragged reference files") {
  CHECK_THROWS_AS(corpus_bleu(std::vector<std::string>{"a"}, std::vector<std::string>{}), ContractError);
  std::string short_file = std::string(SNRG_TEST_DATA) + "/bleu/../bleu/scores.tsv";
  CHECK_THROWS_AS(load_references({data("ref0.txt"), short_file}), FormatError);
  CHECK_THROWS_AS(load_sentences(data("missing.txt")), FormatError);
}

}  // TEST_SUITE

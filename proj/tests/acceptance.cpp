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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances and time
// limits fixed below. Exit status is nonzero when any criterion fails.
//
// The real-data reproduction runs only when SNRG_REAL_TRAIN, SNRG_REAL_DEV,
// SNRG_REAL_TEST and SNRG_REAL_LM name an aligned train/dev/test split and an
// ARPA model; otherwise it reports SKIP. SNRG_REAL_MAX_ITERS caps MERT
// iterations per system (default 10).

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "snrg/bleu.hpp"
#include "snrg/cli.hpp"
#include "snrg/corpus.hpp"
#include "snrg/decoder.hpp"
#include "snrg/grammar.hpp"
#include "snrg/mert.hpp"
#include "snrg/reorder.hpp"
#include "support.hpp"
#include "support_decoder.hpp"
#include "support_grammar.hpp"
#include "support_mert.hpp"
#include "support_pipeline.hpp"

using namespace snrg;
using namespace snrg::testing;
namespace fs = std::filesystem;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag)
      : dir_(fs::temp_directory_path() / ("snrg_acceptance_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~ScratchDir() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

void cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  if (run_cli(args, out, err) != 0) throw std::runtime_error("snrg " + args.front() + " failed: " + err.str());
}

// extract -> estimate -> train-reorder -> tune -> decode -> eval through the
// command-line front end. Returns BLEU of the decoded test set.
struct PipelineFiles {
  std::string train, dev, test, lm;
  int max_iters = 10;
  int threads = 0;
};

void train_models(const ScratchDir& d, const PipelineFiles& p) {
  cli({"extract", "--corpus", p.train, "--output", d.path("rules.txt")});
  cli({"estimate", "--rules", d.path("rules.txt"), "--output", d.path("grammar.txt")});
  cli({"train-reorder", "--corpus", p.train, "--output", d.path("reorder.txt")});
}

double tune_and_decode(const ScratchDir& d, const PipelineFiles& p, const std::string& tag,
                       const std::vector<std::string>& flags) {
  std::vector<std::string> model{"--grammar", d.path("grammar.txt"), "--lm", p.lm, "--reorder", d.path("reorder.txt"),
                                 "--threads", std::to_string(p.threads)};
  model.insert(model.end(), flags.begin(), flags.end());
  std::string weights = d.path(tag + ".weights"), hyp = d.path(tag + ".hyp"), ref = d.path("test.ref");
  std::vector<std::string> tune{"tune", "--dev", p.dev, "--output", weights, "--max-iters", std::to_string(p.max_iters),
                                "--log", d.path(tag + ".tune.log")};
  tune.insert(tune.end(), model.begin(), model.end());
  cli(tune);
  std::vector<std::string> decode{"decode", "--weights", weights, "--input", p.test, "--output", hyp};
  decode.insert(decode.end(), model.begin(), model.end());
  cli(decode);
  {
    std::ofstream out(ref);
    for (const auto& inst : load_corpus(p.test, false).instances) out << join(inst.tokens) << '\n';
  }
  cli({"eval", "--cand", hyp, "--ref", ref});
  return corpus_bleu(load_sentences(hyp), load_references({ref}));
}

// ------------------------------------------------------------------ criteria

Outcome real_data() {
  const char* train = std::getenv("SNRG_REAL_TRAIN");
  const char* dev = std::getenv("SNRG_REAL_DEV");
  const char* test = std::getenv("SNRG_REAL_TEST");
  const char* lm = std::getenv("SNRG_REAL_LM");
  if (!train || !dev || !test || !lm) return {Status::kSkip, "SNRG_REAL_{TRAIN,DEV,TEST,LM} not set"};
  PipelineFiles p{train, dev, test, lm};
  if (const char* it = std::getenv("SNRG_REAL_MAX_ITERS")) p.max_iters = std::atoi(it);
  ScratchDir d("real");
  train_models(d, p);
  const std::vector<std::pair<std::string, std::vector<std::string>>> systems{
      {"All", {}},
      {"NoConceptRule", {"--no-concept-rule"}},
      {"NoMovingDistance", {"--no-moving-distance"}},
      {"NoInducedRule", {"--no-induced-rule"}}};
  std::vector<double> bleu;
  std::string detail;
  for (const auto& [name, flags] : systems) {
    bleu.push_back(tune_and_decode(d, p, name, flags));
    detail += name + " " + fmt("%.2f", 100 * bleu.back()) + "  ";
  }
  bool ordered = bleu[0] > bleu[1] && bleu[1] > bleu[2] && bleu[2] > bleu[3];
  detail += ordered ? "(ablation ordering reproduced)" : "(ablation ordering differs)";
  // No BLEU level is promised; completing the runs is the criterion.
  return {Status::kPass, detail};
}

Outcome toy_derivation() {
  auto t0 = std::chrono::steady_clock::now();
  RuleTable grammar;
  for (const auto& r : want_go_rules()) grammar.add(r);
  Instance inst = want_go_instance();
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> positive(1e-3, 10.0);
  int trials = 0;
  for (; trials < 100; ++trials) {
    Weights w{};
    for (Feature f : {kLogPFGivenE, kLogPEGivenF, kLogPwFGivenE, kLogPwEGivenF}) w[f] = trials == 0 ? 1.0 : positive(rng);
    DecodeResult r = Decoder(grammar, w).decode(inst.graph);
    if (!r.complete || r.best().text() != "the boy wants to go")
      return verdict(false, "trial " + std::to_string(trials) + " produced '" + r.best().text() + "'");
  }
  double s = seconds_since(t0);
  return verdict(s < 1.0, std::to_string(trials) + " weight draws, " + fmt("%.3f s", s) + " (limit 1 s)");
}

Outcome induction_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(404);
  GraphShape shape;
  shape.max_nodes = 8;
  shape.concept_vocab = 5;
  shape.label_vocab = 3;
  std::vector<Instance> corpus;
  std::size_t rules = 0, mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    corpus.push_back(random_instance(rng, shape));
    auto R = induce_grammar({corpus.back()});
    rules += R.size();
    mismatches += keys_of(R) != oracle::induce({corpus.back()});
  }
  // And the whole set as one corpus.
  mismatches += keys_of(induce_grammar(corpus)) != oracle::induce(corpus);
  double s = seconds_since(t0);
  return verdict(mismatches == 0 && s < 30.0, "50 instances, " + std::to_string(rules) + " rules, " +
                                                   std::to_string(mismatches) + " mismatching multisets, " +
                                                   fmt("%.1f s", s) + " (limit 30 s)");
}

Outcome translation_probabilities() {
  double feature_error = 0, normalization_error = 0;
  std::size_t rules = 0;
  for (unsigned seed : {7u, 17u, 27u}) {
    std::mt19937 rng(seed);
    GraphShape shape;
    shape.max_nodes = 6;
    shape.concept_vocab = 4;
    std::vector<Instance> corpus;
    for (int i = 0; i < 5; ++i) corpus.push_back(random_instance(rng, shape));
    auto R = induce_grammar(corpus);
    EstimationCheck c = recount_estimation(R, estimate_probabilities(R));
    feature_error = std::max(feature_error, c.feature_error);
    normalization_error = std::max(normalization_error, c.normalization_error);
    rules += c.rules;
  }
  return verdict(rules > 0 && feature_error <= 1e-9 && normalization_error <= 1e-9,
                 std::to_string(rules) + " rules over 3 five-instance corpora, max feature error " +
                     fmt("%.1e", feature_error) + ", max |sum p(F|E) - 1| " + fmt("%.1e", normalization_error) +
                     " (tol 1e-9)");
}

Outcome reorder_probabilities() {
  ReorderModel empty;
  bool half = true;
  for (bool strict : {false, true}) {
    empty.set_strict(strict);
    for (Orientation o : {Orientation::kMonotonic, Orientation::kInverse})
      half = half && reorder_prob(empty, "want-01", "ARG0", "boy", o) == 0.5;
  }
  std::mt19937 rng(5);
  GraphShape shape;
  shape.concept_vocab = 5;
  std::vector<Instance> corpus;
  for (int i = 0; i < 20; ++i) corpus.push_back(random_instance(rng, shape));
  ReorderModel m = train_reorder(corpus);
  double err = 0;
  for (int l = 0; l < shape.label_vocab; ++l) {
    double want = recount_monotonic(corpus, role_name(l));
    err = std::max(err, std::abs(reorder_prob(m, "any", role_name(l), "any", Orientation::kMonotonic) - want));
    err = std::max(err, std::abs(reorder_prob(m, "any", role_name(l), "any", Orientation::kInverse) - (1 - want)));
  }
  return verdict(half && err <= 1e-12, std::string(half ? "zero counts give 0.5" : "zero counts NOT 0.5") +
                                           ", max recount error " + fmt("%.1e", err) + " (tol 1e-12)");
}

Outcome glue_concept_completeness() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2026);
  GraphShape shape;
  shape.max_nodes = 10;
  shape.extra_edges = 3;
  shape.concept_vocab = 20;
  shape.label_vocab = 20;
  std::vector<Instance> train;
  for (int i = 0; i < 20; ++i) train.push_back(random_instance(rng, shape));
  RuleTable grammar = estimate_probabilities(induce_grammar(train));
  DecoderOptions opt;
  opt.use_induced_rules = false;
  opt.beam_size = 20;
  opt.k = 1;
  Decoder decoder(grammar, default_weights(), opt);
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    DecodeResult r = decoder.decode(random_graph(rng, shape));
    failures += !r.complete || r.best().words.empty();
  }
  double s = seconds_since(t0);
  return verdict(failures == 0 && s < 60.0, "200 graphs, " + std::to_string(failures) + " without a derivation, " +
                                                fmt("%.1f s", s) + " (limit 60 s)");
}

Outcome exhaustive_equivalence() {
  std::mt19937 rng(99);
  double worst = 0;
  std::size_t max_rules = 0, states = 0;
  int failures = 0;
  for (int trial = 0; trial < 30; ++trial) {
    RandomCase c = bounded_case(rng, 6, 30);
    DecoderOptions opt;
    opt.beam_size = 0;
    opt.k = 1;
    Decoder decoder(c.grammar, c.weights, opt, &c.lm, &c.reorder);
    DecodeSession session = decoder.session(c.inst.graph);
    max_rules = std::max(max_rules, session.rules().size());
    DecodeResult r = session.search();
    ExhaustiveOracle oracle(session, c.weights, &c.lm, c.reorder, opt);
    double want = oracle.best();
    states += oracle.states();
    double gap = std::abs(r.best().score - want);
    worst = std::max(worst, gap);
    failures += !r.complete || gap > 1e-9 * std::max(1.0, std::abs(want));
  }
  return verdict(failures == 0 && max_rules <= 30,
                 "30 graphs, <= " + std::to_string(max_rules) + " rules each, " + std::to_string(states) +
                     " oracle states, max score gap " + fmt("%.1e", worst) + " (tol 1e-9)");
}

Outcome mert_improvement() {
  std::mt19937 rng(12);
  PlantedDevSet d = planted_dev_set(rng);
  const std::size_t k = 10;
  auto decode = [&](const Weights& w) { return d.decode(w, k); };
  MertOptions opt;
  opt.max_iters = 5;
  MertResult r = mert(decode, d.references, Weights{}, opt);
  auto one_best = [&](const Weights& w) {
    std::vector<Tokens> out;
    for (const auto& list : d.decode(w, 1)) out.push_back(list[0].words);
    return corpus_bleu(out, d.references);
  };
  double baseline = one_best(Weights{}), tuned = one_best(r.weights);

  // Exact line search against a dense gamma grid on the final pool.
  KBestPool pool(d.references);
  for (const auto& it : {Weights{}, r.weights}) {
    auto lists = d.decode(it, k);
    for (std::size_t s = 0; s < lists.size(); ++s) pool.add(s, lists[s]);
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Weights w, dir;
    for (double& x : w) x = u(rng);
    for (double& x : dir) x = u(rng);
    LineSearchResult ls = line_search(pool, w, dir);
    Weights moved;
    for (std::size_t i = 0; i < w.size(); ++i) moved[i] = w[i] + ls.gamma * dir[i];
    worst = std::max(worst, grid_search_bleu(pool, w, dir, -20.0, 20.0, 1e-3) - ls.bleu);
    worst = std::max(worst, std::abs(pool.bleu(moved) - ls.bleu));
  }
  bool gain = tuned >= baseline + 0.1 && r.history.size() <= 5;
  return verdict(gain && worst <= 1e-6, "1-best BLEU " + fmt("%.4f", baseline) + " -> " + fmt("%.4f", tuned) +
                                            " in " + std::to_string(r.history.size()) +
                                            " iterations (need +0.1 in <= 5); line search vs grid " +
                                            fmt("%.1e", std::max(0.0, worst)) + " (tol 1e-6)");
}

Outcome bleu_conformance() {
  std::string dir = std::string(SNRG_TEST_DATA) + "/bleu/";
  std::ifstream in(dir + "scores.tsv");
  std::map<std::string, double> want;
  std::string name;
  double v;
  while (in >> name >> v) want[name] = v;
  auto cand = load_sentences(dir + "cand.txt");
  auto two = load_references({dir + "ref0.txt", dir + "ref1.txt"});
  auto one = load_references({dir + "ref0.txt"});
  BleuOptions smooth, cased, bigram;
  smooth.smooth = true;
  cased.lowercase = false;
  bigram.max_n = 2;
  double worst = 0;
  worst = std::max(worst, std::abs(corpus_bleu(cand, two) - want["two_refs"]));
  worst = std::max(worst, std::abs(corpus_bleu(cand, one) - want["one_ref"]));
  worst = std::max(worst, std::abs(corpus_bleu(cand, two, smooth) - want["two_refs_add1"]));
  worst = std::max(worst, std::abs(corpus_bleu(cand, two, cased) - want["two_refs_cased"]));
  worst = std::max(worst, std::abs(corpus_bleu(cand, one, bigram) - want["bleu2_one_ref"]));
  auto refs = load_sentences(dir + "ref0.txt");
  std::vector<std::vector<Tokens>> wrapped;
  for (const auto& r : refs) wrapped.push_back({r});
  double identity = corpus_bleu(refs, wrapped);
  return verdict(want.size() == 5 && cand.size() == 20 && worst <= 1e-4 && identity == 1.0,
                 std::to_string(cand.size()) + " sentences, 5 settings, max gap to reference scorer " +
                     fmt("%.1e", worst) + " (tol 1e-4), identity " + fmt("%.4f", identity));
}

Outcome end_to_end() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(10);
  TemplateCorpus corpus = template_corpus(rng);
  ScratchDir d("pipeline");
  {
    std::ofstream(d.path("train.amr")) << corpus.text;
    std::ofstream(d.path("lm.arpa")) << count_bigram_arpa(corpus.sentences);
  }
  PipelineFiles p{d.path("train.amr"), d.path("train.amr"), d.path("train.amr"), d.path("lm.arpa")};
  p.max_iters = 3;
  train_models(d, p);
  double bleu = tune_and_decode(d, p, "all", {});
  double s = seconds_since(t0);
  return verdict(bleu >= 0.90 && s < 120.0, std::to_string(corpus.sentences.size()) + " sentences from " +
                                                std::to_string(templates().size()) + " templates, BLEU " +
                                                fmt("%.4f", bleu) + " (need 0.90), " + fmt("%.1f s", s) +
                                                " (limit 120 s)");
}

}  // namespace

int main(int argc, char** argv) {
  // Criterion names on the command line restrict the run to those.
  std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"real-data-reproduction", real_data},
      {"toy-derivation", toy_derivation},
      {"induction-oracle", induction_oracle},
      {"translation-probabilities", translation_probabilities},
      {"reorder-probabilities", reorder_probabilities},
      {"glue-concept-completeness", glue_concept_completeness},
      {"exhaustive-search", exhaustive_equivalence},
      {"mert-improvement", mert_improvement},
      {"bleu-conformance", bleu_conformance},
      {"end-to-end-pipeline", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    failed += o.status == Status::kFail;
    std::cout << tag << "  " << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

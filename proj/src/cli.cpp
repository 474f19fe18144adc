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

#include "snrg/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "snrg/bleu.hpp"
#include "snrg/corpus.hpp"
#include "snrg/decoder.hpp"
#include "snrg/error.hpp"
#include "snrg/grammar.hpp"
#include "snrg/lm.hpp"
#include "snrg/mert.hpp"
#include "snrg/parallel.hpp"
#include "snrg/reorder.hpp"

namespace snrg {

namespace {

namespace fs = std::filesystem;

constexpr const char* kModelDirVariable = "SNRG_MODEL_DIR";

struct Config {
  std::string corpus;
  std::string rules;
  std::string output;
  std::string grammar;
  std::string lm;
  std::string weights;
  std::string input;
  std::string reorder;
  std::string verbalization;
  std::string kbest;
  std::string usage;
  std::string dev;
  std::string init;
  std::string log;
  std::string cand;
  std::vector<std::string> refs;
  std::size_t beam = 100;
  std::size_t k = 50;
  std::size_t max_tokens = 30;
  std::size_t max_iters = 10;
  int threads = 1;
  unsigned seed = 1;
  bool strict = false;
  bool strict_reorder = false;
  bool no_induced = false;
  bool no_concept = false;
  bool no_moving_distance = false;
  bool no_reorder_model = false;
  bool pair_beams = false;
  bool smooth = false;
  bool cased = false;
};

// Model files that are not found as given are looked up in $SNRG_MODEL_DIR.
std::string model_path(const std::string& path) {
  if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv(kModelDirVariable)) {
    fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
  }
  return path;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw FormatError(path, 0, "cannot write file");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::vector<Instance> read_training(const Config& c, std::ostream& err) {
  CorpusLoad load = load_corpus(c.corpus, c.strict);
  for (const auto& e : load.errors) err << "snrg: " << c.corpus << ":" << e.line << ": skipped record: " << e.message << '\n';
  std::vector<Instance> kept = filter_by_length(load.instances, c.max_tokens);
  if (kept.size() != load.instances.size())
    err << "snrg: " << load.instances.size() - kept.size() << " instances over " << c.max_tokens << " tokens dropped\n";
  return kept;
}

struct Models {
  RuleTable grammar;
  std::optional<NGramModel> lm;
  std::optional<ReorderModel> reorder;
  std::optional<VerbalizationLexicon> lexicon;
  Weights weights = default_weights();
  DecoderOptions options;

  Decoder decoder(const Weights& w) const {
    return Decoder(grammar, w, options, lm ? &*lm : nullptr, reorder ? &*reorder : nullptr, lexicon ? &*lexicon : nullptr);
  }
};

Models load_models(const Config& c) {
  Models m;
  m.grammar = load_grammar(model_path(c.grammar));
  if (!c.lm.empty()) m.lm = load_arpa(model_path(c.lm));
  if (!c.reorder.empty()) {
    m.reorder = load_reorder(model_path(c.reorder));
    m.reorder->set_strict(c.strict_reorder);
  }
  if (!c.verbalization.empty()) m.lexicon = load_verbalization(model_path(c.verbalization));
  if (!c.weights.empty()) m.weights = load_weights(model_path(c.weights));
  m.options.beam_size = c.beam;
  m.options.k = c.k;
  m.options.use_induced_rules = !c.no_induced;
  m.options.use_concept_rules = !c.no_concept;
  m.options.use_moving_distance = !c.no_moving_distance;
  m.options.use_reorder_model = !c.no_reorder_model;
  m.options.pair_beams = c.pair_beams;
  return m;
}

int cmd_extract(const Config& c, std::ostream& out, std::ostream& err) {
  auto corpus = read_training(c, err);
  auto rules = parallel::induce_grammar(corpus, {}, c.threads);
  Output o(c.output, out);
  write_rule_instances(*o, rules);
  return 0;
}

int cmd_estimate(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.rules.empty() == c.corpus.empty()) throw ContractError("estimate needs exactly one of --rules or --corpus");
  std::vector<SynchronousRule> raw;
  if (!c.rules.empty()) {
    std::ifstream in(c.rules);
    if (!in) throw FormatError(c.rules, 0, "cannot open rule file");
    raw = read_rule_instances(in, c.rules);
  } else {
    raw = parallel::induce_grammar(read_training(c, err), {}, c.threads);
  }
  RuleTable table = estimate_probabilities(raw);
  Output o(c.output, out);
  write_grammar(*o, table);
  return 0;
}

int cmd_train_reorder(const Config& c, std::ostream& out, std::ostream& err) {
  ReorderModel m = train_reorder(read_training(c, err));
  Output o(c.output, out);
  write_reorder(*o, m);
  return 0;
}

std::vector<Instance> read_inputs(const std::string& path) {
  return load_corpus(path, true).instances;
}

int cmd_decode(const Config& c, std::ostream& out, std::ostream& err) {
  Models m = load_models(c);
  auto inputs = read_inputs(c.input);
  std::vector<AmrGraph> graphs;
  for (const auto& inst : inputs) graphs.push_back(inst.graph);
  Decoder decoder = m.decoder(m.weights);
  auto results = parallel::decode_corpus(decoder, graphs, c.threads);

  Output o(c.output, out);
  std::optional<Output> kbest, usage;
  if (!c.kbest.empty()) kbest.emplace(c.kbest, out);
  if (!c.usage.empty()) usage.emplace(c.usage, out);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const DecodeResult& r = results[i];
    if (!r.complete) err << "snrg: " << inputs[i].id << ": no complete derivation, emitting partial translations\n";
    *o << r.best().text() << '\n';
    if (kbest) write_kbest(**kbest, inputs[i].id, r.kbest);
    if (usage)
      for (const auto& step : r.best().derivation) **usage << inputs[i].id << ' ' << usage_class_name(usage_class(*step.rule)) << '\n';
  }
  return 0;
}

int cmd_tune(const Config& c, std::ostream& out, std::ostream& err) {
  Models m = load_models(c);
  CorpusLoad load = load_corpus(c.dev, c.strict);
  std::vector<Instance> dev = filter_by_length(load.instances, c.max_tokens);
  std::vector<AmrGraph> graphs;
  std::vector<std::vector<Tokens>> refs;
  for (const auto& inst : dev) {
    graphs.push_back(inst.graph);
    refs.push_back({inst.tokens});
  }
  if (!c.refs.empty()) {
    refs = load_references(c.refs);
    if (refs.size() != load.instances.size())
      throw FormatError(c.refs.front(), refs.size(), "reference count does not match the dev corpus");
    if (dev.size() != load.instances.size())
      throw ContractError("--ref files cannot be combined with length filtering; raise --max-tokens");
  }
  KBestDecoder decode = [&](const Weights& w) {
    Decoder d = m.decoder(w);
    std::vector<std::vector<Candidate>> lists;
    for (const DecodeResult& r : parallel::decode_corpus(d, graphs, c.threads)) {
      std::vector<Candidate> list;
      for (const KBestEntry& e : r.kbest) list.push_back({e.words, e.features});
      lists.push_back(std::move(list));
    }
    return lists;
  };
  MertOptions opt;
  opt.max_iters = c.max_iters;
  opt.seed = c.seed;
  opt.bleu.smooth = c.smooth;
  Weights init = c.init.empty() ? m.weights : load_weights(model_path(c.init));
  std::optional<Output> log;
  if (!c.log.empty()) log.emplace(c.log, err);
  MertResult r = mert(decode, refs, init, opt, log ? &**log : &err);
  Output o(c.output, out);
  write_weights(*o, r.weights);
  return 0;
}

int cmd_eval(const Config& c, std::ostream& out, std::ostream&) {
  auto cand = load_sentences(c.cand);
  auto refs = load_references(c.refs);
  BleuOptions opt;
  opt.smooth = c.smooth;
  opt.lowercase = !c.cased;
  if (cand.size() != refs.size())
    throw FormatError(c.cand, cand.size(), "has " + std::to_string(cand.size()) + " lines, references have " +
                                              std::to_string(refs.size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", corpus_bleu(cand, refs, opt));
  out << buf << '\n';
  return 0;
}

int cmd_stats(const Config& c, std::ostream& out, std::ostream&) {
  RuleTable table = load_grammar(model_path(c.grammar));
  std::optional<UsageLog> usage;
  if (!c.usage.empty()) {
    std::ifstream in(c.usage);
    if (!in) throw FormatError(c.usage, 0, "cannot open usage log");
    usage = read_usage(in, c.usage);
  }
  write_stats(out, grammar_stats(table, usage ? &*usage : nullptr));
  return 0;
}

void add_training_flags(CLI::App* sub, Config& c, bool corpus_required) {
  auto* opt = sub->add_option("--corpus", c.corpus, "aligned AMR corpus");
  if (corpus_required) opt->required();
  sub->add_option("--max-tokens", c.max_tokens, "drop sentences longer than this")->capture_default_str();
  sub->add_flag("--strict", c.strict, "fail on the first malformed corpus record");
}

void add_model_flags(CLI::App* sub, Config& c) {
  sub->add_option("--grammar", c.grammar, "grammar file")->required();
  sub->add_option("--lm", c.lm, "ARPA language model (plain or gzip)");
  sub->add_option("--weights", c.weights, "feature weights file");
  sub->add_option("--reorder", c.reorder, "reordering model file");
  sub->add_option("--verbalization", c.verbalization, "verbalization lexicon");
  sub->add_option("--beam", c.beam, "beam size per coverage, 0 for unbounded")->capture_default_str();
  sub->add_option("--k", c.k, "k-best list size")->capture_default_str();
  sub->add_option("--threads", c.threads, "sentence-level threads")->capture_default_str();
  sub->add_flag("--no-induced-rule", c.no_induced, "drop induced rules");
  sub->add_flag("--no-concept-rule", c.no_concept, "drop concept rules");
  sub->add_flag("--no-moving-distance", c.no_moving_distance, "drop the moving-distance feature");
  sub->add_flag("--no-reorder-model", c.no_reorder_model, "drop the glue reordering feature");
  sub->add_flag("--strict-reorder", c.strict_reorder, "condition reordering on (head, label, tail)");
  sub->add_flag("--pair-beams", c.pair_beams, "one beam per (coverage, collapsed edges)");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-to-string generation with a synchronous node replacement grammar", "snrg"};
  app.require_subcommand(1);
  Config c;

  auto* extract = app.add_subcommand("extract", "induce raw rule instances from an aligned corpus");
  add_training_flags(extract, c, true);
  extract->add_option("--output", c.output, "rule instance file (default stdout)");
  extract->add_option("--threads", c.threads)->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "estimate rule probabilities into a grammar file");
  add_training_flags(estimate, c, false);
  estimate->add_option("--rules", c.rules, "rule instance file from extract");
  estimate->add_option("--output", c.output, "grammar file (default stdout)");
  estimate->add_option("--threads", c.threads)->capture_default_str();

  auto* reorder = app.add_subcommand("train-reorder", "count glue orientations");
  add_training_flags(reorder, c, true);
  reorder->add_option("--output", c.output, "reordering model file (default stdout)");

  auto* decode = app.add_subcommand("decode", "generate sentences from AMR graphs");
  add_model_flags(decode, c);
  decode->add_option("--input", c.input, "AMR graphs, blank-line separated")->required();
  decode->add_option("--output", c.output, "1-best file (default stdout)");
  decode->add_option("--kbest", c.kbest, "k-best file");
  decode->add_option("--usage", c.usage, "rule usage log of the 1-best derivations");

  auto* tune = app.add_subcommand("tune", "MERT on a dev corpus");
  add_model_flags(tune, c);
  tune->add_option("--dev", c.dev, "dev corpus; its sentences are the references")->required();
  tune->add_option("--ref", c.refs, "reference files replacing the corpus sentences");
  tune->add_option("--init", c.init, "initial weights (default: --weights or built-in)");
  tune->add_option("--output", c.output, "tuned weights file (default stdout)");
  tune->add_option("--max-iters", c.max_iters)->capture_default_str();
  tune->add_option("--max-tokens", c.max_tokens)->capture_default_str();
  tune->add_option("--seed", c.seed, "restart seed")->capture_default_str();
  tune->add_option("--log", c.log, "per-iteration BLEU log (default stderr)");
  tune->add_flag("--strict", c.strict);
  tune->add_flag("--smooth", c.smooth, "add-one smoothed BLEU");

  auto* eval = app.add_subcommand("eval", "corpus BLEU");
  eval->add_option("--cand", c.cand, "candidate file")->required();
  eval->add_option("--ref", c.refs, "reference file, repeat for more references")->required();
  eval->add_flag("--smooth", c.smooth, "add-one smoothed BLEU");
  eval->add_flag("--cased", c.cased, "case-sensitive comparison");

  auto* stats = app.add_subcommand("stats", "rule shape histogram and usage percentages");
  stats->add_option("--grammar", c.grammar, "grammar file")->required();
  stats->add_option("--usage", c.usage, "usage log from decode --usage");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (*extract) return cmd_extract(c, out, err);
  if (*estimate) return cmd_estimate(c, out, err);
  if (*reorder) return cmd_train_reorder(c, out, err);
  if (*decode) return cmd_decode(c, out, err);
  if (*tune) return cmd_tune(c, out, err);
  if (*eval) return cmd_eval(c, out, err);
  return cmd_stats(c, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const std::exception& e) {
    err << "snrg: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace snrg

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

// Serial reference vs OpenMP kernels on synthetic corpora.
// Run: snrg_bench --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "snrg/parallel.hpp"
#include "support.hpp"
#include "support_decoder.hpp"

namespace {

using namespace snrg;
using namespace snrg::testing;

const std::vector<Instance>& induction_corpus() {
  static const std::vector<Instance> corpus = [] {
    std::mt19937 rng(1);
    GraphShape shape;
    shape.max_nodes = 8;
    std::vector<Instance> out;
    for (int i = 0; i < 400; ++i) out.push_back(random_instance(rng, shape));
    return out;
  }();
  return corpus;
}

struct DecodeFixture {
  RuleTable grammar;
  RandomCase model;
  std::vector<AmrGraph> inputs;
};

const DecodeFixture& decode_fixture() {
  static const DecodeFixture f = [] {
    std::mt19937 rng(2);
    DecodeFixture d;
    for (int i = 0; i < 16; ++i) {
      RandomCase c = random_case(rng, 8, 40);
      for (const auto& r : c.grammar.rules()) d.grammar.add(r);
      d.inputs.push_back(c.inst.graph);
      if (i == 0) d.model = std::move(c);
    }
    return d;
  }();
  return f;
}

void BM_InduceSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::induce_grammar(induction_corpus()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(induction_corpus().size()));
}

void BM_InduceParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel::induce_grammar(induction_corpus(), {}, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(induction_corpus().size()));
}

void BM_DecodeSerial(benchmark::State& state) {
  const auto& f = decode_fixture();
  Decoder decoder(f.grammar, f.model.weights, {}, &f.model.lm, &f.model.reorder);
  for (auto _ : state) benchmark::DoNotOptimize(serial::decode_corpus(decoder, f.inputs));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.inputs.size()));
}

void BM_DecodeParallel(benchmark::State& state) {
  const auto& f = decode_fixture();
  Decoder decoder(f.grammar, f.model.weights, {}, &f.model.lm, &f.model.reorder);
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel::decode_corpus(decoder, f.inputs, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.inputs.size()));
}

void thread_counts(benchmark::internal::Benchmark* b) {
  for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Arg(t);
  if ((omp_get_num_procs() & (omp_get_num_procs() - 1)) != 0) b->Arg(omp_get_num_procs());
}

}  // namespace

BENCHMARK(BM_InduceSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InduceParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DecodeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecodeParallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

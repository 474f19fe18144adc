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

#include "snrg/parallel.hpp"

#include <omp.h>

#include <exception>
#include <iterator>

namespace snrg {

namespace serial {

std::vector<SynchronousRule> induce_grammar(const std::vector<Instance>& corpus, const ExtractOptions& options) {
  return snrg::induce_grammar(corpus, options);
}

std::vector<DecodeResult> decode_corpus(const Decoder& decoder, const std::vector<AmrGraph>& inputs) {
  std::vector<DecodeResult> out;
  out.reserve(inputs.size());
  for (const AmrGraph& g : inputs) out.push_back(decoder.decode(g));
  return out;
}

}  // namespace serial

namespace parallel {

namespace {

// Runs body(i) for every i, rethrowing the first exception on the caller.
template <typename Body>
void for_each_index(long n, int threads, Body body) {
  std::exception_ptr error;
  int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(snrg_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<SynchronousRule> induce_grammar(const std::vector<Instance>& corpus, const ExtractOptions& options,
                                            int threads) {
  std::vector<std::vector<SynchronousRule>> parts(corpus.size());
  for_each_index(static_cast<long>(corpus.size()), threads,
                 [&](long i) { parts[static_cast<std::size_t>(i)] = induce_instance(corpus[static_cast<std::size_t>(i)], options); });
  std::vector<SynchronousRule> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

std::vector<DecodeResult> decode_corpus(const Decoder& decoder, const std::vector<AmrGraph>& inputs, int threads) {
  std::vector<DecodeResult> out(inputs.size());
  for_each_index(static_cast<long>(inputs.size()), threads,
                 [&](long i) { out[static_cast<std::size_t>(i)] = decoder.decode(inputs[static_cast<std::size_t>(i)]); });
  return out;
}

}  // namespace parallel

}  // namespace snrg

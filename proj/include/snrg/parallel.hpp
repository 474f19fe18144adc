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

// Corpus-level kernels. The parallel versions split work by sentence with
// OpenMP; the serial versions are the reference they must match exactly.

#ifndef SNRG_PARALLEL_HPP_
#define SNRG_PARALLEL_HPP_

#include <vector>

#include "snrg/corpus.hpp"
#include "snrg/decoder.hpp"
#include "snrg/grammar.hpp"

namespace snrg {

namespace serial {

std::vector<SynchronousRule> induce_grammar(const std::vector<Instance>& corpus, const ExtractOptions& options = {});
std::vector<DecodeResult> decode_corpus(const Decoder& decoder, const std::vector<AmrGraph>& inputs);

}  // namespace serial

namespace parallel {

// threads <= 0 uses the OpenMP default. Output order follows the input.
std::vector<SynchronousRule> induce_grammar(const std::vector<Instance>& corpus, const ExtractOptions& options = {},
                                            int threads = 0);
std::vector<DecodeResult> decode_corpus(const Decoder& decoder, const std::vector<AmrGraph>& inputs, int threads = 0);

}  // namespace parallel

}  // namespace snrg

#endif  // SNRG_PARALLEL_HPP_

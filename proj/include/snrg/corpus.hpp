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

#ifndef SNRG_CORPUS_HPP_
#define SNRG_CORPUS_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "snrg/amr.hpp"
#include "snrg/text.hpp"

namespace snrg {

// Token span [begin, end) aligned to one graph node.
struct AlignmentLink {
  std::size_t begin = 0;
  std::size_t end = 0;
  NodeId node = kNoNode;

  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
};

struct Instance {
  std::string id;
  Tokens tokens;
  AmrGraph graph;
  std::vector<AlignmentLink> alignment;
};

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct CorpusLoad {
  std::vector<Instance> instances;
  std::vector<RecordError> errors;  // skipped records (non-strict mode)
};

// Records are blank-line separated:
//   # ::id <id>                      (optional)
//   # ::snt <tokenized sentence>
//   # ::alignments i-j|0.1 k-l|0+0.0 (optional)
//   <PENMAN block>
// In strict mode the first bad record throws FormatError; otherwise it is
// skipped and reported in CorpusLoad::errors.
CorpusLoad load_corpus(const std::string& path, bool strict = true);
CorpusLoad read_corpus(std::istream& in, const std::string& name, bool strict = true);

std::vector<Instance> filter_by_length(const std::vector<Instance>& instances, std::size_t max_tokens = 30);

}  // namespace snrg

#endif  // SNRG_CORPUS_HPP_

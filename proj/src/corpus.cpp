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

#include "snrg/corpus.hpp"

#include <fstream>
#include <istream>
#include <optional>

#include "snrg/error.hpp"

namespace snrg {

namespace {

struct RawRecord {
  std::size_t first_line = 0;
  std::size_t penman_line = 0;
  std::string id;
  std::string sentence;
  bool has_sentence = false;
  std::vector<std::string> links;
  std::string penman;
};

struct RecordFailure {
  std::size_t line;
  std::string message;
};

std::optional<std::size_t> parse_index(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return std::stoul(text);
}

// "::alignments" values run until the next "::key".
std::vector<std::string> alignment_fields(const std::string& rest) {
  std::vector<std::string> out;
  for (auto& tok : split_whitespace(rest)) {
    if (starts_with(tok, "::")) break;
    out.push_back(tok);
  }
  return out;
}

// Value following "::key " inside a comment line, if present.
std::optional<std::string> comment_field(const std::string& line, const std::string& key) {
  std::string needle = "::" + key;
  std::size_t pos = line.find(needle);
  while (pos != std::string::npos) {
    std::size_t after = pos + needle.size();
    if (after == line.size()) return std::string();
    if (line[after] == ' ' || line[after] == '\t') {
      std::size_t stop = line.find(" ::", after);
      return trim(line.substr(after, key == "alignments" || stop == std::string::npos ? std::string::npos : stop - after));
    }
    pos = line.find(needle, after);
  }
  return std::nullopt;
}

Instance build_instance(const RawRecord& rec) {
  Instance inst;
  inst.id = rec.id;
  inst.tokens = split_whitespace(rec.sentence);
  AddressedGraph parsed;
  try {
    parsed = parse_penman_addressed(rec.penman);
  } catch (const ParseError& e) {
    std::size_t line = rec.penman_line;
    for (std::size_t i = 0; i < e.offset() && i + 1 < rec.penman.size(); ++i)
      if (rec.penman[i] == '\n') ++line;
    throw RecordFailure{line, e.what()};
  }
  inst.graph = std::move(parsed.graph);
  for (const std::string& link : rec.links) {
    auto bar = link.find('|');
    auto dash = link.find('-');
    if (bar == std::string::npos || dash == std::string::npos || dash > bar)
      throw RecordFailure{rec.first_line, "bad alignment link '" + link + "'"};
    auto begin = parse_index(link.substr(0, dash));
    auto end = parse_index(link.substr(dash + 1, bar - dash - 1));
    if (!begin || !end) throw RecordFailure{rec.first_line, "bad alignment span in '" + link + "'"};
    if (!(*begin < *end && *end <= inst.tokens.size()))
      throw RecordFailure{rec.first_line, "alignment span " + link.substr(0, bar) + " out of range for " +
                                              std::to_string(inst.tokens.size()) + " tokens"};
    for (const std::string& address : split_fields(link.substr(bar + 1), "+")) {
      auto it = parsed.addresses.find(address);
      if (it == parsed.addresses.end())
        throw RecordFailure{rec.first_line, "unresolvable node address '" + address + "'"};
      inst.alignment.push_back({*begin, *end, it->second});
    }
  }
  return inst;
}

bool is_comment(const std::string& trimmed) {
  if (trimmed.empty() || trimmed.front() != '#') return false;
  std::size_t end = trimmed.find_first_of(" \t()");
  return !is_nonterminal(trimmed.substr(0, end));
}

}  // namespace

CorpusLoad read_corpus(std::istream& in, const std::string& name, bool strict) {
  CorpusLoad out;
  RawRecord rec;
  bool open = false;
  std::size_t line_no = 0;

  auto fail = [&](std::size_t line, const std::string& message) {
    if (strict) throw FormatError(name, line, message);
    out.errors.push_back({line, message});
  };

  auto flush = [&]() {
    if (!open) return;
    open = false;
    RawRecord done = std::move(rec);
    rec = RawRecord{};
    if (trim(done.penman).empty()) {
      // Comment-only blocks such as file preambles are not records.
      if (done.has_sentence) fail(done.first_line, "record has no AMR graph");
      return;
    }
    try {
      Instance inst = build_instance(done);
      if (inst.id.empty()) inst.id = std::to_string(out.instances.size() + out.errors.size());
      out.instances.push_back(std::move(inst));
    } catch (const RecordFailure& f) {
      fail(f.line, f.message);
    }
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      rec.first_line = line_no;
    }
    if (is_comment(t)) {
      if (auto v = comment_field(t, "snt")) {
        rec.sentence = *v;
        rec.has_sentence = true;
      }
      if (auto v = comment_field(t, "id")) {
        auto parts = split_whitespace(*v);
        if (!parts.empty()) rec.id = parts.front();
      }
      if (auto v = comment_field(t, "alignments")) rec.links = alignment_fields(*v);
      continue;
    }
    if (rec.penman.empty()) rec.penman_line = line_no;
    rec.penman += line;
    rec.penman += '\n';
  }
  flush();
  return out;
}

CorpusLoad load_corpus(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open corpus file");
  return read_corpus(in, path, strict);
}

std::vector<Instance> filter_by_length(const std::vector<Instance>& instances, std::size_t max_tokens) {
  std::vector<Instance> out;
  for (const Instance& inst : instances)
    if (inst.tokens.size() <= max_tokens) out.push_back(inst);
  return out;
}

}  // namespace snrg

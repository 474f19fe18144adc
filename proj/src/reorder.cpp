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

#include "snrg/reorder.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "snrg/error.hpp"

namespace snrg {

void ReorderModel::add(const std::string& head, const std::string& label, const std::string& tail, Orientation o,
                       double count) {
  if (count < 0) throw ContractError("negative orientation count");
  OrientationCounts& c = counts_[{head, label, tail}];
  OrientationCounts& m = by_label_[label];
  if (o == Orientation::kMonotonic) {
    c.monotonic += count;
    m.monotonic += count;
  } else {
    c.inverse += count;
    m.inverse += count;
  }
}

OrientationCounts ReorderModel::label_counts(const std::string& label) const {
  auto it = by_label_.find(label);
  return it == by_label_.end() ? OrientationCounts{} : it->second;
}

double ReorderModel::prob(const std::string& head, const std::string& label, const std::string& tail,
                          Orientation o) const {
  OrientationCounts c;
  if (strict_) {
    auto it = counts_.find({head, label, tail});
    if (it != counts_.end()) c = it->second;
  } else {
    c = label_counts(label);
  }
  double p_m = (1.0 + c.monotonic) / (2.0 + c.monotonic + c.inverse);
  return o == Orientation::kMonotonic ? p_m : 1.0 - p_m;
}

double reorder_prob(const ReorderModel& m, const std::string& head, const std::string& label,
                    const std::string& tail, Orientation o) {
  return m.prob(head, label, tail, o);
}

ReorderModel train_reorder(const std::vector<Instance>& corpus) {
  ReorderModel m;
  for (const Instance& inst : corpus) {
    const AmrGraph& g = inst.graph;
    std::vector<std::size_t> earliest(g.node_count(), SIZE_MAX);
    for (const AlignmentLink& l : inst.alignment)
      if (g.contains(l.node)) earliest[static_cast<std::size_t>(l.node)] = std::min(earliest[static_cast<std::size_t>(l.node)], l.begin);
    for (const Edge& e : g.edges()) {
      std::size_t h = earliest[static_cast<std::size_t>(e.source)], t = earliest[static_cast<std::size_t>(e.target)];
      if (h == SIZE_MAX || t == SIZE_MAX) continue;
      m.add(g.node(e.source).label, e.label, g.node(e.target).label, h <= t ? Orientation::kMonotonic : Orientation::kInverse);
    }
  }
  return m;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '%' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size() || !std::isxdigit(static_cast<unsigned char>(s[i + 1])) ||
          !std::isxdigit(static_cast<unsigned char>(s[i + 2])))
        throw std::invalid_argument("bad %-escape in '" + s + "'");
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

void write_reorder(std::ostream& out, const ReorderModel& m) {
  for (const auto& [key, c] : m.counts())
    out << escape(std::get<0>(key)) << ' ' << escape(std::get<1>(key)) << ' ' << escape(std::get<2>(key)) << ' '
        << format_double(c.monotonic) << ' ' << format_double(c.inverse) << '\n';
}

ReorderModel read_reorder(std::istream& in, const std::string& name) {
  ReorderModel m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Tokens f = split_whitespace(line);
    if (f.empty()) continue;
    if (f.size() != 5) throw FormatError(name, line_no, "expected '<h> <l> <t> <cM> <cI>'");
    try {
      std::string h = unescape(f[0]), l = unescape(f[1]), t = unescape(f[2]);
      double cm = parse_double(f[3]), ci = parse_double(f[4]);
      if (cm < 0 || ci < 0) throw std::invalid_argument("negative count");
      m.add(h, l, t, Orientation::kMonotonic, cm);
      m.add(h, l, t, Orientation::kInverse, ci);
    } catch (const std::exception& e) {
      throw FormatError(name, line_no, e.what());
    }
  }
  return m;
}

void save_reorder(const ReorderModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path, 0, "cannot write reorder model");
  write_reorder(out, m);
}

ReorderModel load_reorder(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open reorder model");
  return read_reorder(in, path);
}

}  // namespace snrg

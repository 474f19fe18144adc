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

#ifndef SNRG_REORDER_HPP_
#define SNRG_REORDER_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "snrg/corpus.hpp"
#include "snrg/grammar.hpp"

namespace snrg {

struct OrientationCounts {
  double monotonic = 0.0;
  double inverse = 0.0;

  friend bool operator==(const OrientationCounts&, const OrientationCounts&) = default;
};

// Smoothed orientation model over (head concept, edge label, tail concept).
// By default the probability is conditioned on the label alone: the counts
// are summed over every head and tail. strict() restricts the sums to the
// exact triple.
class ReorderModel {
 public:
  void add(const std::string& head, const std::string& label, const std::string& tail, Orientation o,
           double count = 1.0);

  double prob(const std::string& head, const std::string& label, const std::string& tail, Orientation o) const;

  bool strict() const { return strict_; }
  void set_strict(bool strict) { strict_ = strict; }

  const std::map<std::tuple<std::string, std::string, std::string>, OrientationCounts>& counts() const {
    return counts_;
  }
  OrientationCounts label_counts(const std::string& label) const;

 private:
  std::map<std::tuple<std::string, std::string, std::string>, OrientationCounts> counts_;
  std::map<std::string, OrientationCounts> by_label_;
  bool strict_ = false;
};

// Counts, for every edge whose endpoints are both aligned, whether the head's
// earliest aligned token comes no later than the tail's (M) or after it (I).
ReorderModel train_reorder(const std::vector<Instance>& corpus);

double reorder_prob(const ReorderModel& m, const std::string& head, const std::string& label,
                    const std::string& tail, Orientation o);

// Lines "<h> <l> <t> <cM> <cI>"; whitespace and '%' inside fields are
// %-escaped.
void write_reorder(std::ostream& out, const ReorderModel& m);
ReorderModel read_reorder(std::istream& in, const std::string& name);
void save_reorder(const ReorderModel& m, const std::string& path);
ReorderModel load_reorder(const std::string& path);

}  // namespace snrg

#endif  // SNRG_REORDER_HPP_

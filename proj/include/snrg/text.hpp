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

#ifndef SNRG_TEXT_HPP_
#define SNRG_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace snrg {

using Tokens = std::vector<std::string>;

Tokens split_whitespace(std::string_view text);
std::string join(const Tokens& tokens, std::string_view sep = " ");
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
bool starts_with(std::string_view text, std::string_view prefix);

// Splits on the literal separator; pieces are trimmed.
std::vector<std::string> split_fields(std::string_view line, std::string_view sep);

// Formats a double with enough digits to round-trip exactly.
std::string format_double(double value);

// Parses a double, throwing std::invalid_argument on trailing garbage.
double parse_double(std::string_view text);

}  // namespace snrg

#endif  // SNRG_TEXT_HPP_

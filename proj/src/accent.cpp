// src/accent.cpp

// Copyright 2026  polyaccent authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "polyaccent/accent.hpp"

#include "polyaccent/errors.hpp"

namespace polyaccent {

Accent parse_accent(std::string_view code) {
  for (int i = 0; i < kNumAccents; ++i)
    if (kAccentCodes[static_cast<std::size_t>(i)] == code) return static_cast<Accent>(i);
  throw InvalidArgument("unknown accent code '" + std::string(code) +
                        "' (expected one of AM AR BR HI KO MA SP VI)");
}

std::string accent_code(Accent a) {
  return std::string(kAccentCodes.at(static_cast<std::size_t>(accent_index(a))));
}

std::vector<Accent> parse_accent_list(std::string_view csv) {
  std::vector<Accent> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    auto item = csv.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse_accent(item));
    pos = comma + 1;
  }
  return out;
}

}  // namespace polyaccent

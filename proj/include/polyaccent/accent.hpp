// include/polyaccent/accent.hpp

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

#ifndef POLYACCENT_ACCENT_HPP_
#define POLYACCENT_ACCENT_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace polyaccent {

// Row order of the accent embedding table.
enum class Accent : int { AM = 0, AR, BR, HI, KO, MA, SP, VI };

inline constexpr int kNumAccents = 8;
inline constexpr std::array<std::string_view, kNumAccents> kAccentCodes = {
    "AM", "AR", "BR", "HI", "KO", "MA", "SP", "VI"};

// Throws InvalidArgument for anything but the eight codes (case-sensitive).
Accent parse_accent(std::string_view code);
std::string accent_code(Accent a);
inline int accent_index(Accent a) { return static_cast<int>(a); }
// American and British English are the native class.
inline bool is_native(Accent a) { return a == Accent::AM || a == Accent::BR; }
// "AM,HI,KO" -> list; empty string -> empty list.
std::vector<Accent> parse_accent_list(std::string_view csv);

}  // namespace polyaccent

#endif  // POLYACCENT_ACCENT_HPP_

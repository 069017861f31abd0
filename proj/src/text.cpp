/* Copyright 2026 The TIIL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tiil/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace tiil {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '\'' || c >= 0x80; }

// Sorted for binary search.
constexpr std::array<std::string_view, 71> kStopwords = {
    "a",      "about", "above",  "after", "against", "along",  "also",   "an",     "and",
    "are",    "around", "as",    "at",    "be",      "been",   "before", "behind", "below",
    "beside", "between", "but",  "by",    "can",     "could",  "did",    "do",     "does",
    "down",   "during", "for",   "from",  "had",     "has",    "have",   "he",     "her",
    "his",    "in",     "into",  "is",    "it",      "its",    "near",   "of",     "off",
    "on",     "onto",   "or",    "over",  "she",     "so",     "than",   "that",   "the",
    "their",  "them",   "then",  "there", "these",   "they",   "this",   "those",  "through",
    "to",     "under",  "up",    "was",   "were",    "while",  "with",   "within",
};

}  // namespace

std::vector<WordToken> tokenize_words(std::string_view text) {
  std::vector<WordToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    const std::size_t begin = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    WordToken tok;
    tok.begin = begin;
    tok.end = i;
    tok.lower.reserve(i - begin);
    for (std::size_t j = begin; j < i; ++j) {
      tok.lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
    }
    // Leading/trailing apostrophes are quoting, not part of the word.
    while (!tok.lower.empty() && tok.lower.front() == '\'') {
      tok.lower.erase(tok.lower.begin());
      ++tok.begin;
    }
    while (!tok.lower.empty() && tok.lower.back() == '\'') {
      tok.lower.pop_back();
      --tok.end;
    }
    if (!tok.lower.empty()) out.push_back(std::move(tok));
  }
  return out;
}

bool is_stopword(std::string_view lower_word) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), lower_word);
}

bool span_matches(const WordSpan& span, std::string_view text) {
  return span.char_start < span.char_end && span.char_end <= text.size() &&
         text.substr(span.char_start, span.char_end - span.char_start) == span.surface;
}

bool spans_overlap(const WordSpan& a, const WordSpan& b) {
  return a.char_start < b.char_end && b.char_start < a.char_end;
}

}  // namespace tiil

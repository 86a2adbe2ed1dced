#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace covote::detail {

// Name normalization for fuzzy matching: lowercase, fold Latin diacritics
// to ASCII, drop punctuation, split on whitespace.  Non-Latin letters pass
// through unchanged.
std::vector<std::string> normalize_tokens(std::string_view text);

// Sorted unique tokens; the canonical form used for exact-name matching.
std::set<std::string> token_set(std::string_view text);

// Canonical normalized name: tokens sorted and joined by single spaces.
std::string normalized_name(std::string_view text);

} // namespace covote::detail

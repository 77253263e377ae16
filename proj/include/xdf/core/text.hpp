#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace xdf {

std::string to_lower(std::string_view text);

/// Splits into maximal runs of ASCII letters, lowercased. Digits and
/// punctuation act as separators, so "managers'" yields "managers" and
/// "32.3m" yields "m".
std::vector<std::string> tokenize_alpha(std::string_view text);

/// Whole-phrase, case-insensitive containment: the phrase must appear as a
/// contiguous substring bounded by non-alphanumeric characters (or the text
/// edges). Both arguments are expected already lowercased.
bool contains_phrase(std::string_view haystack_lower, std::string_view phrase_lower);

/// One token per line; blank lines ignored.
std::unordered_set<std::string> load_token_set(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace xdf

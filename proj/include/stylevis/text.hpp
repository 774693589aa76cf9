#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stylevis::text {

std::vector<std::string> split(std::string_view s, std::string_view sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);

/// Collapses every run of whitespace to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

/// Decimal rendering of numerator/denominator rounded half-up to `places`
/// digits, computed in integer arithmetic. Requires denominator > 0 and
/// numerator >= 0.
std::string rational_half_up(std::int64_t numerator, std::int64_t denominator, int places);

/// Half-up decimal rendering of an arbitrary double.
std::string double_half_up(double value, int places);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string utc_timestamp();

}  // namespace stylevis::text

namespace stylevis::fsutil {

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace stylevis::fsutil

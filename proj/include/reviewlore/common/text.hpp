#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reviewlore::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle);

// Splits on '\n'; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Collapses runs of whitespace into single spaces and trims the ends.
std::string normalize_whitespace(std::string_view s);

// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view s);

// Longest prefix of `s` no longer than `max_bytes` that does not split a
// UTF-8 sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes) noexcept;

std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);

std::string csv_escape(std::string_view field);

// Seconds since the Unix epoch, rendered as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_utc(std::int64_t epoch_seconds);
std::int64_t parse_iso8601_utc(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

} // namespace reviewlore::text

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anthro {

/// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

/// Parses a decimal real; "NA" yields a quiet NaN. Throws Error(Parse).
double parse_real(std::string_view token);

long long parse_integer(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char delimiter);

std::string join_reals(std::span<const double> values, char delimiter);

std::string_view trim(std::string_view text);

/// 64-bit FNV-1a, used for content digests in file headers.
std::uint64_t fnv1a64(std::string_view data);

std::string to_hex(std::uint64_t value);

}  // namespace anthro

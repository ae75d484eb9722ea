#pragma once

// Line tokenizing shared by the network and Q-DAG text formats.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qdag::detail {

struct Line {
    std::size_t number = 0;
    std::vector<std::string> tokens;
};

/// Splits text into non-empty logical lines with `#` comments removed.
/// Characters in `punctuation` become tokens of their own.
std::vector<Line> tokenize(std::string_view text, std::string_view punctuation);

std::optional<double> parse_double(std::string_view token);
std::optional<std::size_t> parse_size(std::string_view token);

std::string read_file(const std::string& path);

}  // namespace qdag::detail

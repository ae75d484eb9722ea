#include "text_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qdag/error.hpp"
#include "qdag/network.hpp"

namespace qdag {

std::string format_exact(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buf, end);
}

namespace detail {

std::vector<Line> tokenize(std::string_view text, std::string_view punctuation) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++number;

        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

        Line line{number, {}};
        std::string current;
        auto flush = [&] {
            if (!current.empty()) line.tokens.push_back(std::move(current));
            current.clear();
        };
        for (char c : raw) {
            if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
                flush();
            } else if (punctuation.find(c) != std::string_view::npos) {
                flush();
                line.tokens.emplace_back(1, c);
            } else {
                current.push_back(c);
            }
        }
        flush();
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (eol == text.size()) break;
    }
    return lines;
}

std::optional<double> parse_double(std::string_view token) {
    // from_chars rejects a leading '+' but accepts ".5"
    if (token.empty()) return std::nullopt;
    double value = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size()) return std::nullopt;
    return value;
}

std::optional<std::size_t> parse_size(std::string_view token) {
    if (token.empty()) return std::nullopt;
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size()) return std::nullopt;
    return value;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail
}  // namespace qdag

#include <sstream>

#include "qdag/error.hpp"
#include "qdag/network.hpp"
#include "text_util.hpp"

namespace qdag {

namespace {

using detail::Line;

class NetworkParser {
public:
    explicit NetworkParser(std::string_view text) : lines_(detail::tokenize(text, "{}|:")) {}

    BeliefNetwork run() {
        while (pos_ < lines_.size()) {
            const Line& line = lines_[pos_++];
            const std::string& keyword = line.tokens[0];
            if (keyword == "network") {
                parse_header(line);
            } else if (!seen_header_) {
                fail(line, "expected 'network <name>' before '" + keyword + "'");
            } else if (keyword == "variable") {
                parse_variable(line);
            } else if (keyword == "cpt") {
                parse_cpt(line);
            } else {
                fail(line, "unknown statement '" + keyword + "'");
            }
        }
        if (!seen_header_) throw ParseError(lines_.empty() ? 1 : lines_.back().number, "missing 'network' statement");

        auto violations = validate(bn_);
        if (!violations.empty()) {
            std::string msg = "invalid network:";
            for (const Violation& v : violations) msg += "\n  " + v.detail;
            throw ValidationError(msg);
        }
        return std::move(bn_);
    }

private:
    [[noreturn]] static void fail(const Line& line, const std::string& msg) { throw ParseError(line.number, msg); }

    void parse_header(const Line& line) {
        if (seen_header_) fail(line, "duplicate 'network' statement");
        if (line.tokens.size() != 2) fail(line, "expected 'network <name>'");
        bn_.name = line.tokens[1];
        seen_header_ = true;
    }

    VarIndex lookup(const Line& line, const std::string& name) const {
        auto v = bn_.find(name);
        if (!v) fail(line, "undeclared variable '" + name + "'");
        return *v;
    }

    void parse_variable(const Line& line) {
        const auto& t = line.tokens;
        if (t.size() < 4 || t[2] != "{" || t.back() != "}")
            fail(line, "expected 'variable <Name> { <v1> <v2> ... }'");
        if (bn_.find(t[1])) fail(line, "variable '" + t[1] + "' declared twice");
        Variable var{t[1], {}};
        for (std::size_t i = 3; i + 1 < t.size(); ++i) {
            const std::string& value = t[i];
            if (value.size() == 1 && std::string_view("{}|:").find(value[0]) != std::string_view::npos)
                fail(line, "unexpected '" + value + "' in value list");
            if (value == kUnknownMarker) fail(line, "value name '" + value + "' is reserved");
            if (var.find_value(value)) fail(line, "value '" + value + "' repeated in '" + var.name + "'");
            var.values.push_back(value);
        }
        if (var.values.empty()) fail(line, "variable '" + var.name + "' has an empty domain");
        bn_.variables.push_back(std::move(var));
    }

    double probability(const Line& line, const std::string& token) const {
        auto p = detail::parse_double(token);
        if (!p) fail(line, "expected a probability, got '" + token + "'");
        return *p;
    }

    void parse_cpt(const Line& line) {
        const auto& t = line.tokens;
        if (t.size() < 3) fail(line, "expected 'cpt <Child> ...'");
        const VarIndex child = lookup(line, t[1]);
        for (const Cpt& c : bn_.cpts)
            if (c.child == child) fail(line, "second CPT for '" + t[1] + "'");
        const std::size_t k = bn_.variables[child].domain_size();

        Cpt cpt;
        cpt.child = child;

        if (t[2] == "{") {
            // root: probabilities may continue over several lines until '}'
            std::vector<std::string> body(t.begin() + 3, t.end());
            const Line* last = &line;
            while (body.empty() || body.back() != "}") {
                if (pos_ >= lines_.size()) fail(*last, "unterminated CPT for '" + t[1] + "'");
                last = &lines_[pos_++];
                body.insert(body.end(), last->tokens.begin(), last->tokens.end());
            }
            body.pop_back();
            if (body.size() != k)
                fail(*last, "CPT row for '" + t[1] + "' has " + std::to_string(body.size()) + " entries, expected " +
                                std::to_string(k));
            for (const std::string& tok : body) cpt.table.push_back(probability(*last, tok));
            bn_.cpts.push_back(std::move(cpt));
            return;
        }

        if (t[2] != "|" || t.back() != "{" || t.size() < 5)
            fail(line, "expected 'cpt <Child> | <P1> ... {' or 'cpt <Child> { ... }'");
        for (std::size_t i = 3; i + 1 < t.size(); ++i) {
            VarIndex p = lookup(line, t[i]);
            if (p == child) fail(line, "'" + t[1] + "' cannot be its own parent");
            for (VarIndex q : cpt.parents)
                if (q == p) fail(line, "parent '" + t[i] + "' listed twice");
            cpt.parents.push_back(p);
        }

        const std::size_t rows = cpt.row_count(bn_.variables);
        cpt.table.assign(rows * k, 0.0);
        std::vector<bool> present(rows, false);
        std::size_t filled = 0;
        while (true) {
            if (pos_ >= lines_.size()) fail(lines_.back(), "unterminated CPT for '" + t[1] + "'");
            const Line& row = lines_[pos_++];
            const auto& r = row.tokens;
            if (r.size() == 1 && r[0] == "}") {
                if (filled != rows)
                    fail(row, "CPT for '" + t[1] + "' has " + std::to_string(filled) + " of " + std::to_string(rows) +
                                  " rows");
                break;
            }
            const std::size_t np = cpt.parents.size();
            if (r.size() < np + 1 || r[np] != ":") fail(row, "expected '<parent values> : <probabilities>'");
            std::size_t index = 0;
            for (std::size_t i = 0; i < np; ++i) {
                const Variable& pv = bn_.variables[cpt.parents[i]];
                auto v = pv.find_value(r[i]);
                if (!v) fail(row, "variable '" + pv.name + "' has no value '" + r[i] + "'");
                index = index * pv.domain_size() + *v;
            }
            const std::size_t entries = r.size() - np - 1;
            if (entries != k)
                fail(row, "CPT row for '" + t[1] + "' has " + std::to_string(entries) + " entries, expected " +
                              std::to_string(k));
            if (present[index]) fail(row, "duplicate CPT row for '" + t[1] + "'");
            present[index] = true;
            ++filled;
            for (std::size_t c = 0; c < k; ++c) cpt.table[index * k + c] = probability(row, r[np + 1 + c]);
        }
        for (VarIndex p : cpt.parents) bn_.edges.emplace_back(p, child);
        bn_.cpts.push_back(std::move(cpt));
    }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
    bool seen_header_ = false;
    BeliefNetwork bn_;
};

}  // namespace

BeliefNetwork parse_network(std::string_view text) { return NetworkParser(text).run(); }

BeliefNetwork load_network(const std::string& path) { return parse_network(detail::read_file(path)); }

std::string serialize_network(const BeliefNetwork& bn) {
    std::ostringstream out;
    out << "network " << bn.name << "\n";
    for (const Variable& v : bn.variables) {
        out << "variable " << v.name << " {";
        for (const std::string& value : v.values) out << ' ' << value;
        out << " }\n";
    }
    for (const Cpt& cpt : bn.cpts) {
        const Variable& child = bn.variables[cpt.child];
        const std::size_t k = child.domain_size();
        out << "cpt " << child.name;
        if (cpt.parents.empty()) {
            out << " {";
            for (double p : cpt.table) out << ' ' << format_exact(p);
            out << " }\n";
            continue;
        }
        out << " |";
        for (VarIndex p : cpt.parents) out << ' ' << bn.variables[p].name;
        out << " {\n";
        const std::size_t rows = cpt.row_count(bn.variables);
        std::vector<ValueIndex> digits(cpt.parents.size(), 0);
        for (std::size_t r = 0; r < rows; ++r) {
            out << " ";
            for (std::size_t i = 0; i < digits.size(); ++i) out << ' ' << bn.variables[cpt.parents[i]].values[digits[i]];
            out << " :";
            for (std::size_t c = 0; c < k; ++c) out << ' ' << format_exact(cpt.table[r * k + c]);
            out << "\n";
            for (std::size_t i = digits.size(); i-- > 0;) {
                if (++digits[i] < bn.variables[cpt.parents[i]].domain_size()) break;
                digits[i] = 0;
            }
        }
        out << "}\n";
    }
    return out.str();
}

}  // namespace qdag

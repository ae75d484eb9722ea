#include "qdag/qdag_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qdag/error.hpp"
#include "text_util.hpp"

namespace qdag {

std::string serialize_qdag(const QDag& qdag) {
    std::ostringstream out;
    out << "QDAG " << kQDagFormatVersion << "\n";
    for (const auto& ev : qdag.evidence_variables()) {
        out << "VAR " << ev.name << ' ' << ev.values.size();
        for (const auto& v : ev.values) out << ' ' << v;
        out << "\n";
    }
    const auto& nodes = qdag.nodes();
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        const Node& n = nodes[id];
        out << "NODE " << id << ' ' << to_string(n.kind);
        switch (n.kind) {
            case NodeKind::Num: out << ' ' << format_exact(n.value); break;
            case NodeKind::Esn: {
                const auto& ev = qdag.evidence_variables()[n.var];
                out << ' ' << ev.name << ' ' << ev.values[n.val];
                break;
            }
            case NodeKind::Mul:
            case NodeKind::Add:
                out << ' ' << n.inputs.size();
                for (NodeId in : n.inputs) out << ' ' << in;
                break;
        }
        out << "\n";
    }
    for (const auto& q : qdag.queries())
        for (std::size_t i = 0; i < q.values.size(); ++i)
            out << "QUERY " << q.name << ' ' << q.values[i] << ' ' << q.nodes[i] << "\n";
    return out.str();
}

namespace {

using detail::Line;

[[noreturn]] void fail(const Line& line, const std::string& msg) { throw ParseError(line.number, msg); }

std::size_t count(const Line& line, const std::string& token) {
    auto v = detail::parse_size(token);
    if (!v) fail(line, "expected a count or id, got '" + token + "'");
    return *v;
}

}  // namespace

QDag parse_qdag(std::string_view text) {
    const auto lines = detail::tokenize(text, "");
    if (lines.empty()) throw ParseError(1, "empty Q-DAG file");

    const Line& header = lines.front();
    if (header.tokens.size() != 2 || header.tokens[0] != "QDAG") fail(header, "expected 'QDAG <version>'");
    if (header.tokens[1] != std::to_string(kQDagFormatVersion))
        fail(header, "unsupported Q-DAG format version '" + header.tokens[1] + "'");

    std::vector<EvidenceVariable> evidence;
    std::vector<Node> nodes;
    std::vector<QueryVariable> queries;

    auto find_evidence = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < evidence.size(); ++i)
            if (evidence[i].name == name) return i;
        return std::nullopt;
    };

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const Line& line = lines[li];
        const auto& t = line.tokens;
        if (t[0] == "VAR") {
            if (!nodes.empty()) fail(line, "VAR after NODE records");
            if (t.size() < 3) fail(line, "expected 'VAR <name> <k> <values>'");
            const std::size_t k = count(line, t[2]);
            if (t.size() != 3 + k) fail(line, "VAR declares " + std::to_string(k) + " values but lists " +
                                                  std::to_string(t.size() - 3));
            if (find_evidence(t[1])) fail(line, "variable '" + t[1] + "' declared twice");
            evidence.push_back({t[1], std::vector<std::string>(t.begin() + 3, t.end())});
        } else if (t[0] == "NODE") {
            if (!queries.empty()) fail(line, "NODE after QUERY records");
            if (t.size() < 4) fail(line, "malformed NODE record");
            const std::size_t id = count(line, t[1]);
            if (id != nodes.size())
                fail(line, "expected node id " + std::to_string(nodes.size()) + ", got " + std::to_string(id));
            Node n;
            const std::string& kind = t[2];
            if (kind == "NUM") {
                if (t.size() != 4) fail(line, "expected 'NODE <id> NUM <decimal>'");
                auto p = detail::parse_double(t[3]);
                if (!p) fail(line, "bad number '" + t[3] + "'");
                if (!(*p >= 0.0 && *p <= 1.0)) fail(line, "number outside [0,1]");
                n.kind = NodeKind::Num;
                n.value = *p;
            } else if (kind == "ESN") {
                if (t.size() != 5) fail(line, "expected 'NODE <id> ESN <var> <val>'");
                auto v = find_evidence(t[3]);
                if (!v) fail(line, "undeclared evidence variable '" + t[3] + "'");
                const auto& vals = evidence[*v].values;
                auto it = std::find(vals.begin(), vals.end(), t[4]);
                if (it == vals.end()) fail(line, "variable '" + t[3] + "' has no value '" + t[4] + "'");
                n.kind = NodeKind::Esn;
                n.var = static_cast<std::uint32_t>(*v);
                n.val = static_cast<std::uint32_t>(it - vals.begin());
            } else if (kind == "MUL" || kind == "ADD") {
                const std::size_t k = count(line, t[3]);
                if (t.size() != 4 + k) fail(line, kind + " declares " + std::to_string(k) + " inputs but lists " +
                                                      std::to_string(t.size() - 4));
                n.kind = kind == "MUL" ? NodeKind::Mul : NodeKind::Add;
                for (std::size_t i = 0; i < k; ++i) {
                    const std::size_t in = count(line, t[4 + i]);
                    if (in >= id) fail(line, "reference to node " + std::to_string(in) + " before its declaration");
                    n.inputs.push_back(static_cast<NodeId>(in));
                }
            } else {
                fail(line, "unknown node kind '" + kind + "'");
            }
            nodes.push_back(std::move(n));
        } else if (t[0] == "QUERY") {
            if (t.size() != 4) fail(line, "expected 'QUERY <var> <val> <id>'");
            const std::size_t id = count(line, t[3]);
            if (id >= nodes.size()) fail(line, "query refers to undeclared node " + std::to_string(id));
            QueryVariable* q = nullptr;
            for (auto& existing : queries)
                if (existing.name == t[1]) q = &existing;
            if (!q) q = &queries.emplace_back(QueryVariable{t[1], {}, {}});
            if (std::find(q->values.begin(), q->values.end(), t[2]) != q->values.end())
                fail(line, "duplicate query record for " + t[1] + "=" + t[2]);
            q->values.push_back(t[2]);
            q->nodes.push_back(static_cast<NodeId>(id));
        } else {
            fail(line, "unknown record '" + t[0] + "'");
        }
    }

    try {
        return QDag(std::move(evidence), std::move(nodes), std::move(queries));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(lines.back().number, e.what());
    }
}

QDag load_qdag(const std::string& path) { return parse_qdag(detail::read_file(path)); }

void save_qdag(const QDag& qdag, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << serialize_qdag(qdag);
    if (!out) throw Error("failed writing " + path);
}

}  // namespace qdag

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>

#include "qdag/compiler.hpp"
#include "qdag/error.hpp"
#include "qdag/evaluator.hpp"
#include "qdag/network.hpp"
#include "qdag/oracle.hpp"
#include "qdag/qdag_io.hpp"

namespace py = pybind11;
using namespace qdag;

namespace {

using EvidenceMap = std::map<std::string, std::optional<std::string>>;
using Table = std::map<std::string, std::map<std::string, double>>;

Evidence to_evidence(const QDag& q, const EvidenceMap& values) {
    Evidence e(q);
    for (const auto& [var, value] : values) {
        if (value) e.set(var, *value);
        else e.set_unknown(var);
    }
    return e;
}

Table to_table(const QDag& q, const QueryValues& values) {
    Table out;
    for (std::size_t i = 0; i < q.queries().size(); ++i) {
        const auto& qv = q.queries()[i];
        for (std::size_t v = 0; v < qv.values.size(); ++v) out[qv.name][qv.values[v]] = values.values[i][v];
    }
    return out;
}

std::pair<double, std::map<std::string, double>> to_marginal(const QDag& q, const Marginal& m, std::size_t query) {
    std::map<std::string, double> posterior;
    const auto& qv = q.queries().at(query);
    for (std::size_t v = 0; v < qv.values.size(); ++v) posterior[qv.values[v]] = m.posterior[v];
    return {m.evidence_probability, posterior};
}

std::size_t query_index(const QDag& q, const std::string& var) {
    for (std::size_t i = 0; i < q.queries().size(); ++i)
        if (q.queries()[i].name == var) return i;
    throw DomainError("unknown query variable '" + var + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compile belief networks into query DAGs and evaluate them";

    auto base = py::register_exception<Error>(m, "QDagError", PyExc_ValueError);
    py::register_exception<InconsistentEvidence>(m, "InconsistentEvidence", base.ptr());

    py::class_<BeliefNetwork>(m, "BeliefNetwork")
        .def_readonly("name", &BeliefNetwork::name)
        .def_property_readonly("variables",
                               [](const BeliefNetwork& bn) {
                                   std::vector<std::pair<std::string, std::vector<std::string>>> out;
                                   for (const auto& v : bn.variables) out.emplace_back(v.name, v.values);
                                   return out;
                               })
        .def("serialize", [](const BeliefNetwork& bn) { return serialize_network(bn); })
        .def("__len__", &BeliefNetwork::size);

    m.def("parse_network", &parse_network, py::arg("text"));
    m.def("load_network", &load_network, py::arg("path"));

    py::class_<QDag>(m, "QDag")
        .def_property_readonly("size", &QDag::size)
        .def_property_readonly("evidence_variables",
                               [](const QDag& q) {
                                   std::vector<std::string> out;
                                   for (const auto& e : q.evidence_variables()) out.push_back(e.name);
                                   return out;
                               })
        .def_property_readonly("query_variables",
                               [](const QDag& q) {
                                   std::vector<std::string> out;
                                   for (const auto& qv : q.queries()) out.push_back(qv.name);
                                   return out;
                               })
        .def("node_counts",
             [](const QDag& q) {
                 std::map<std::string, std::size_t> out{{"NUM", 0}, {"ESN", 0}, {"MUL", 0}, {"ADD", 0}};
                 for (const Node& n : q.nodes()) ++out[std::string(to_string(n.kind))];
                 return out;
             })
        .def("serialize", [](const QDag& q) { return serialize_qdag(q); })
        .def("save", [](const QDag& q, const std::string& path) { save_qdag(q, path); }, py::arg("path"));

    m.def("parse_qdag", [](const std::string& text) { return parse_qdag(text); }, py::arg("text"));
    m.def("load_qdag", &load_qdag, py::arg("path"));

    m.def(
        "compile",
        [](const BeliefNetwork& bn, std::vector<std::string> evidence, std::vector<std::string> query, bool fold,
           bool reduce) {
            return compile(bn, {std::move(evidence), std::move(query), {.fold_constants = fold, .reduce = reduce}});
        },
        py::arg("network"), py::arg("evidence"), py::arg("query"), py::arg("fold") = true, py::arg("reduce") = true,
        "Compile `network` for on-line evidence on `evidence` and queries on `query`.");

    m.def(
        "evaluate", [](const QDag& q, const EvidenceMap& e) { return to_table(q, evaluate(q, to_evidence(q, e))); },
        py::arg("qdag"), py::arg("evidence") = EvidenceMap{},
        "Pr(x, e) for every query value. Unlisted evidence variables (or None) are unknown.");

    m.def(
        "marginal",
        [](const QDag& q, const EvidenceMap& e, const std::string& var) {
            return to_marginal(q, marginal(q, to_evidence(q, e), var), query_index(q, var));
        },
        py::arg("qdag"), py::arg("evidence"), py::arg("var"), "(Pr(e), {value: Pr(value | e)}).");

    py::class_<EvaluationState>(m, "EvaluationState")
        .def(py::init<const QDag&>(), py::arg("qdag"), py::keep_alive<1, 2>())
        .def(
            "set_evidence",
            [](EvaluationState& s, const std::string& var, std::optional<std::string> value) {
                const auto changed = value ? s.set_evidence(var, *value) : s.set_unknown(var);
                std::vector<std::pair<std::string, std::string>> out;
                for (const auto& c : changed) {
                    const auto& qv = s.qdag().queries()[c.query];
                    out.emplace_back(qv.name, qv.values[c.value]);
                }
                return out;
            },
            py::arg("var"), py::arg("value"), "Returns the (variable, value) query entries that changed.")
        .def("query_values", [](const EvaluationState& s) { return to_table(s.qdag(), s.query_values()); })
        .def("marginal",
             [](const EvaluationState& s, const std::string& var) {
                 return to_marginal(s.qdag(), s.marginal(var), query_index(s.qdag(), var));
             })
        .def_property_readonly("last_recomputed", &EvaluationState::last_recomputed)
        .def_property_readonly("reachable_count", &EvaluationState::reachable_count);

    m.def(
        "oracle_query",
        [](const BeliefNetwork& bn, const std::map<std::string, std::string>& e, const std::string& var) {
            oracle::PartialInstantiation partial(bn.size());
            for (const auto& [name, value] : e) partial[bn.index_of(name)] = bn.value_index(bn.index_of(name), value);
            const VarIndex x = bn.index_of(var);
            const auto values = oracle::query(bn, partial, x);
            std::map<std::string, double> out;
            for (std::size_t v = 0; v < values.size(); ++v) out[bn.variables[x].values[v]] = values[v];
            return out;
        },
        py::arg("network"), py::arg("evidence"), py::arg("var"),
        "Brute-force Pr(var = v, e) by enumerating the joint distribution.");
}

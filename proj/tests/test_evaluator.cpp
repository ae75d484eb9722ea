#include <doctest.h>

#include <cmath>
#include <random>

#include "qdag/compiler.hpp"
#include "qdag/error.hpp"
#include "qdag/evaluator.hpp"
#include "qdag/oracle.hpp"
#include "test_support.hpp"

using namespace qdag;

namespace {

QDag example_qdag() { return compile(testing::example_network(), {{"C"}, {"B"}, {}}); }

}  // namespace

TEST_CASE("evaluate the example") {
    const QDag q = example_qdag();
    SUBCASE("C=ON") {
        const auto v = evaluate(q, {{"C", "ON"}});
        CHECK(v.at(q, "B", "ON") == doctest::Approx(.3475).epsilon(1e-12));
        CHECK(v.at(q, "B", "OFF") == doctest::Approx(.2725).epsilon(1e-12));
    }
    SUBCASE("C=OFF") {
        const auto v = evaluate(q, {{"C", "OFF"}});
        CHECK(v.at(q, "B", "ON") == doctest::Approx(.2875).epsilon(1e-12));
        CHECK(v.at(q, "B", "OFF") == doctest::Approx(.0925).epsilon(1e-12));
    }
    SUBCASE("C unknown gives the prior") {
        const auto v = evaluate(q, std::map<std::string, std::string>{});
        CHECK(v.at(q, "B", "ON") == doctest::Approx(.635).epsilon(1e-12));
        CHECK(v.at(q, "B", "OFF") == doctest::Approx(.365).epsilon(1e-12));
        Evidence e(q);
        e.set("C", kUnknownMarker);
        CHECK_FALSE(e.get(0).has_value());
    }
    SUBCASE("marginal normalizes") {
        Evidence e(q);
        e.set("C", "ON");
        const Marginal m = marginal(q, e, "B");
        CHECK(m.evidence_probability == doctest::Approx(.62).epsilon(1e-12));
        CHECK(m.posterior[0] == doctest::Approx(.3475 / .62).epsilon(1e-12));
        CHECK(m.posterior[0] + m.posterior[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unknown names") {
        Evidence e(q);
        CHECK_THROWS_AS(e.set("Z", "ON"), DomainError);
        CHECK_THROWS_AS(e.set("C", "MAYBE"), DomainError);
        CHECK_THROWS_AS(evaluate(q, {{"C", "MAYBE"}}), DomainError);
        CHECK_THROWS_AS(marginal(q, e, "Z"), DomainError);
    }
}

TEST_CASE("inconsistent evidence") {
    const auto bn = parse_network("network n\nvariable A { a b }\nvariable B { x y }\ncpt A { 1 0 }\n"
                                  "cpt B | A {\n a : 1 0\n b : .5 .5\n}\n");
    const QDag q = compile(bn, {{"A", "B"}, {"A"}, {}});
    Evidence e(q);
    e.set("B", "y");
    CHECK_THROWS_AS(marginal(q, e, "A"), InconsistentEvidence);
    EvaluationState s(q);
    s.set_evidence("B", "y");
    CHECK_THROWS_AS(s.marginal("A"), InconsistentEvidence);
}

TEST_CASE("ESN values are 0 or 1 and match the definition") {
    const QDag q = example_qdag();
    for_each_evidence(q, [&](const Evidence& e) {
        for (const Node& n : q.nodes()) {
            if (n.kind != NodeKind::Esn) continue;
            const double v = esn_value(n, e);
            CHECK((v == 0.0 || v == 1.0));
            CHECK((v == 1.0) == (!e.get(n.var) || *e.get(n.var) == n.val));
        }
    });
}

TEST_CASE("for_each_evidence enumerates every evidence function once") {
    auto bn = parse_network("network n\nvariable A { a b }\nvariable B { x y z }\ncpt A { .5 .5 }\ncpt B { .2 .3 .5 }\n");
    const QDag q = compile(bn, {{"A", "B"}, {"A"}, {}});
    std::vector<Evidence> seen;
    for_each_evidence(q, [&](const Evidence& e) {
        for (const Evidence& s : seen) CHECK_FALSE(s == e);
        seen.push_back(e);
    });
    CHECK(seen.size() == 3 * 4);
}

TEST_CASE("visited counter stays within node count") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto bn = testing::random_network(rng, {.max_vars = 8});
        std::vector<std::string> all;
        for (const auto& v : bn.variables) all.push_back(v.name);
        const QDag q = compile(bn, {{all[0]}, all, {.fold_constants = false, .reduce = false}});
        Evidence e(q);
        EvaluationCounters c;
        evaluate(q, e, &c);
        CHECK(c.nodes_visited <= q.size());
        CHECK(c.nodes_visited > 0);
    }
}

TEST_CASE("EvaluationState") {
    const QDag q = example_qdag();

    SUBCASE("initial state is all unknown") {
        EvaluationState s(q);
        CHECK(s.query_value(0, 0) == doctest::Approx(.635).epsilon(1e-12));
        CHECK(s.reachable_count() <= q.size());
    }
    SUBCASE("setting evidence updates queries") {
        EvaluationState s(q);
        auto changed = s.set_evidence("C", "ON");
        CHECK(changed.size() == 2);
        CHECK(s.query_value(0, 0) == doctest::Approx(.3475).epsilon(1e-12));
        CHECK(s.last_recomputed() > 0);
        CHECK(s.last_recomputed() <= s.reachable_count());
        changed = s.set_evidence("C", "OFF");
        CHECK(s.query_value(0, 1) == doctest::Approx(.0925).epsilon(1e-12));
        s.set_unknown("C");
        CHECK(s.query_value(0, 1) == doctest::Approx(.365).epsilon(1e-12));
    }
    SUBCASE("repeating the same value recomputes nothing") {
        EvaluationState s(q);
        s.set_evidence("C", "ON");
        const auto changed = s.set_evidence("C", "ON");
        CHECK(changed.empty());
        CHECK(s.last_recomputed() == 0);
    }
    SUBCASE("errors") {
        EvaluationState s(q);
        CHECK_THROWS_AS(s.set_evidence("Z", "ON"), DomainError);
        CHECK_THROWS_AS(s.set_evidence("C", "MAYBE"), DomainError);
    }
}

TEST_CASE("incremental values match full evaluation on random sequences") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        auto bn = testing::random_network(rng, {.min_vars = 2, .max_vars = 9});
        std::vector<std::string> all;
        for (const auto& v : bn.variables) all.push_back(v.name);
        const QDag q = compile(bn, {all, all, {}});
        EvaluationState s(q);
        Evidence shadow(q);
        for (int step = 0; step < 40; ++step) {
            const std::size_t var = rng() % q.evidence_variables().size();
            const std::size_t k = q.evidence_variables()[var].values.size();
            const std::size_t pick = rng() % (k + 1);
            const std::optional<std::size_t> value = pick == k ? std::nullopt : std::optional<std::size_t>(pick);
            const auto before = s.query_values();
            const auto changed = s.set_evidence(var, value);
            shadow.set(var, value);
            CHECK(s.evidence() == shadow);
            const auto full = evaluate(q, shadow);
            const auto now = s.query_values();
            for (std::size_t qi = 0; qi < full.values.size(); ++qi)
                for (std::size_t i = 0; i < full.values[qi].size(); ++i) {
                    CHECK(std::abs(now.values[qi][i] - full.values[qi][i]) <=
                          1e-12 * std::max(1.0, std::abs(full.values[qi][i])));
                    const bool moved = now.values[qi][i] != before.values[qi][i];
                    const bool reported =
                        std::find(changed.begin(), changed.end(), EvaluationState::QueryRef{qi, i}) != changed.end();
                    CHECK(moved == reported);
                }
        }
    }
}

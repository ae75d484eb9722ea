#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "qdag/evaluator.hpp"
#include "qdag/network.hpp"
#include "qdag/oracle.hpp"

namespace qdag::testing {

/// Source text of the three-variable A -> B, A -> C network.
extern const char* const kExampleSource;

BeliefNetwork example_network();

struct RandomNetworkOptions {
    std::size_t min_vars = 1;
    std::size_t max_vars = 12;
    std::size_t max_parents = 3;
    double edge_probability = 0.35;
    /// Relative weights of domain sizes 1, 2, 3.
    std::vector<double> domain_weights = {0.05, 0.65, 0.30};
    /// Chance that a CPT entry is forced to zero before normalizing.
    double zero_probability = 0.08;
};

/// Random DAG over X0..Xn-1 (values v0..) with random normalized CPTs.
BeliefNetwork random_network(std::mt19937_64& rng, const RandomNetworkOptions& options = {});

/// Network-level partial instantiation equivalent to `e`.
oracle::PartialInstantiation to_partial(const BeliefNetwork& bn, const QDag& qdag, const Evidence& e);

/// Names of variables at `indices`.
std::vector<std::string> names(const BeliefNetwork& bn, const std::vector<VarIndex>& indices);

/// All subsets of {0..n-1} with at most `k` elements, smallest first.
std::vector<std::vector<VarIndex>> subsets_up_to(std::size_t n, std::size_t k);

}  // namespace qdag::testing

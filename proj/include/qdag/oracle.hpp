#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qdag/network.hpp"

namespace qdag::oracle {

/// Joint states the oracle is willing to enumerate.
inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 20;

/// Product over all variables of the CPT entry matching `w`.
double joint(const BeliefNetwork& bn, std::span<const ValueIndex> w);

/// Partial instantiation: one entry per network variable, nullopt = unobserved.
using PartialInstantiation = std::vector<std::optional<ValueIndex>>;

/// Pr(x, e) for every value x of `x`, by summing the joint over all
/// completions of `e`. Throws StateSpaceTooLarge above `cap` joint states.
std::vector<double> query(const BeliefNetwork& bn, const PartialInstantiation& e, VarIndex x,
                          std::size_t cap = kDefaultStateCap);

/// Pr(e).
double evidence_probability(const BeliefNetwork& bn, const PartialInstantiation& e,
                            std::size_t cap = kDefaultStateCap);

}  // namespace qdag::oracle

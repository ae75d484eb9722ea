#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdag {

using VarIndex = std::size_t;
using ValueIndex = std::size_t;

/// Reserved token for "no evidence about this variable". Never a legal value name.
inline constexpr std::string_view kUnknownMarker = "*UNKNOWN*";

struct Variable {
    std::string name;
    std::vector<std::string> values;

    std::size_t domain_size() const noexcept { return values.size(); }
    std::optional<ValueIndex> find_value(std::string_view value) const;
};

/// Conditional probability table for one variable given its ordered parents.
///
/// Rows enumerate parent instantiations with the leftmost parent varying
/// slowest; each row holds one probability per child value. The table is
/// stored flat, row-major.
struct Cpt {
    VarIndex child = 0;
    std::vector<VarIndex> parents;
    std::vector<double> table;

    std::size_t row_count(std::span<const Variable> variables) const;
};

struct Violation {
    enum class Kind {
        EmptyName,
        EmptyDomain,
        ReservedValue,
        DuplicateVariable,
        DuplicateValue,
        BadReference,
        Cycle,
        MissingCpt,
        DuplicateCpt,
        ParentMismatch,
        TableShape,
        OutOfRange,
        Normalization,
    };

    Kind kind;
    std::string detail;
};

/// A discrete belief network. Edges run parent -> child.
///
/// Plain aggregate so tests can build malformed networks for `validate`;
/// everything produced by `parse_network` satisfies all invariants.
struct BeliefNetwork {
    std::string name;
    std::vector<Variable> variables;
    std::vector<std::pair<VarIndex, VarIndex>> edges;
    std::vector<Cpt> cpts;

    std::size_t size() const noexcept { return variables.size(); }
    std::optional<VarIndex> find(std::string_view name) const;

    /// Throws DomainError for unknown names.
    VarIndex index_of(std::string_view name) const;
    ValueIndex value_index(VarIndex var, std::string_view value) const;

    /// Throws DomainError when the variable has no CPT.
    const Cpt& cpt_of(VarIndex var) const;

    std::vector<VarIndex> parents_of(VarIndex var) const;
    std::vector<std::size_t> domain_sizes() const;

    /// Conditional probability of `var` taking the value in `instantiation`,
    /// given the parent values in the same full or partial instantiation.
    double probability(VarIndex var, std::span<const ValueIndex> instantiation) const;
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// Every violated invariant; empty iff the network is well formed.
std::vector<Violation> validate(const BeliefNetwork& bn);

/// Kahn order over the edge relation; nullopt when the edges contain a cycle.
std::optional<std::vector<VarIndex>> topological_order(const BeliefNetwork& bn);

/// Throws ParseError with a line number on malformed input and
/// ValidationError when the parsed network violates an invariant.
BeliefNetwork parse_network(std::string_view text);
BeliefNetwork load_network(const std::string& path);

/// Text form accepted by `parse_network`; probabilities round-trip exactly.
std::string serialize_network(const BeliefNetwork& bn);

/// Shortest decimal that parses back to the same double.
std::string format_exact(double value);

}  // namespace qdag

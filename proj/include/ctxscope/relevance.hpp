#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "ctxscope/distribution.hpp"
#include "ctxscope/estimation.hpp"

namespace ctxscope {

struct SearchBudget;

/// One concrete (x_i, context assignment, y) for which conditioning on X_i = x_i
/// moves the class probability: lhs = p(Y=y | X_i=x_i, ctx), rhs = p(Y=y | ctx).
struct Witness {
    std::size_t feature = 0;
    ContextSubset context;
    Assignment context_assignment;
    ValueIndex value = 0;
    ValueIndex y = 0;
    Rational lhs;
    Rational rhs;
    Rational gap;
    std::uint64_t lhs_support = 0;  // weight of (X_i=x_i, ctx); instance count for empirical tables
    std::uint64_t rhs_support = 0;  // weight of ctx

    bool operator==(const Witness&) const = default;
};

enum class Relevance {
    StronglyRelevant,
    WeaklyRelevant,
    Irrelevant,
    NoWitness,  // search was heuristic or empirical and found nothing; not a proof of irrelevance
};

std::string_view to_string(Relevance relevance);

struct RelevanceVerdict {
    std::size_t feature = 0;
    Relevance relevance = Relevance::NoWitness;
    std::optional<Witness> witness;
    bool exact = true;  // produced by exhaustive search
};

struct PredicateResult {
    std::optional<Witness> witness;
    bool exhaustive = true;

    bool holds() const { return witness.has_value(); }
};

/// First witness in canonical order (context assignment lexicographic, then x_i,
/// then y) among positive-probability triples, or nothing.
std::optional<Witness> differs_in_context(const Distribution& dist, std::size_t feature, ContextSubset context,
                                          const ComparisonConfig& cfg);

/// Witness in the context of all other features, if any.
std::optional<Witness> is_strongly_relevant(const Distribution& dist, std::size_t feature,
                                            const ComparisonConfig& cfg);

/// Holds iff not strongly relevant and some proper subset of the other features
/// yields a witness. Subsets are scanned by (size, bitmask); above the budget's
/// exact limit the scan is heuristic and `exhaustive` is false.
PredicateResult is_weakly_relevant(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                                   const SearchBudget& budget);

RelevanceVerdict relevance_class(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                                 const SearchBudget& budget);

/// Recomputes both conditionals from the table and re-runs the comparison.
bool verify_witness(const Distribution& dist, const Witness& witness, const ComparisonConfig& cfg);

}  // namespace ctxscope

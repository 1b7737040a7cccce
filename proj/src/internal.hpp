#pragma once

#include <cstdint>
#include <functional>

#include "ctxscope/relevance.hpp"
#include "ctxscope/search.hpp"
#include "scan_kernel.hpp"

namespace ctxscope::detail {

Witness make_witness(const Distribution& dist, std::size_t feature, ContextSubset context, const RawWitness& raw);

/// Builds the assignment of `context` read off a packed key.
Assignment assignment_from_key(const FeatureSpace& space, ContextSubset context, std::uint64_t key);

void require_feature(const Distribution& dist, std::size_t feature);
void require_compatible(const Distribution& dist, const ComparisonConfig& cfg);

struct LatticeProbe {
    bool witness = false;
    double score = 0;
};

/// Heuristic walk over the subsets of `ground`: beam search upward from the empty
/// set, greedy elimination downward from `ground` (both limited to
/// budget.max_context_size levels; a zero limit skips the downward walk), then
/// budget.random_probes random subsets drawn
/// from a stream keyed by (budget.seed, stream). `evaluate` is called at most once
/// per subset. With `stop_at_first`, the walk ends at the first witness.
void heuristic_lattice(ContextSubset ground, const SearchBudget& budget, std::uint64_t stream, bool stop_at_first,
                       const std::function<LatticeProbe(ContextSubset)>& evaluate);

/// Calls `visit` on each k-subset of `ground` in ascending bitmask order until it returns true.
bool for_each_subset_of_size(ContextSubset ground, std::size_t k, const std::function<bool(ContextSubset)>& visit);

}  // namespace ctxscope::detail

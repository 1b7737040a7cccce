#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ctxscope/distribution.hpp"
#include "ctxscope/estimation.hpp"
#include "ctxscope/relevance.hpp"

namespace ctxscope {

struct SearchBudget {
    std::size_t exact_limit = 14;      // exhaustive when the candidate ground set has at most this many features
    std::size_t max_context_size = 3;  // lattice levels explored from each end in heuristic mode
    std::size_t beam_width = 4;
    std::size_t random_probes = 200;
    std::uint64_t seed = 0;

    void validate() const;
    bool exhaustive_for(std::size_t ground_size) const { return ground_size <= exact_limit; }
};

/// Lazily yields every subset of {0..m-1} \ excluded with at most max_size members,
/// ordered by (size, bitmask).
class ContextEnumerator {
public:
    ContextEnumerator(std::size_t m, ContextSubset excluded, std::size_t max_size);

    std::optional<ContextSubset> next();

private:
    std::vector<std::size_t> ground_;
    std::size_t max_size_;
    std::size_t size_ = 0;
    std::uint64_t compressed_ = 0;
    bool started_ = false;
    bool done_ = false;
};

std::vector<ContextSubset> enumerate_contexts(std::size_t m, ContextSubset excluded, std::size_t max_size);

/// Outcome of one feature's context search.
///
/// In heuristic mode alpha is an upper bound on the true minimum context size and
/// beta a lower bound on the maximum; every stored witness is genuine.
struct ScanResult {
    std::size_t feature = 0;
    std::optional<std::size_t> alpha;
    std::optional<std::size_t> beta;
    std::optional<Witness> alpha_witness;
    std::optional<Witness> beta_witness;
    std::optional<Witness> strong_witness;  // witness in the full set of other features
    std::optional<Witness> weak_witness;    // canonical-first witness found in a proper subset
    bool exhaustive = true;
    std::size_t contexts_evaluated = 0;
    bool insufficient_support = false;
};

ScanResult exact_scan(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg);
ScanResult heuristic_scan(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                          const SearchBudget& budget);
/// exact_scan when the feature's ground set fits the budget's exact limit, heuristic_scan otherwise.
ScanResult scan_feature(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                        const SearchBudget& budget);

}  // namespace ctxscope

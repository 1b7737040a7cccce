#pragma once

// Grouped evaluation of one context for one feature (or one feature pair).
// Support cells are bucketed by their projected keys in a single pass, so a
// context costs O(|support|) regardless of how many assignments it admits.

#include <cstdint>
#include <optional>
#include <vector>

#include "ctxscope/distribution.hpp"
#include "ctxscope/estimation.hpp"

namespace ctxscope::detail {

/// Open-addressing map from projected key to dense group id.
class GroupIndex {
public:
    void reset(std::size_t expected);
    std::uint32_t find_or_insert(std::uint64_t key);
    std::uint32_t find(std::uint64_t key) const;  // key must be present
    std::size_t size() const { return keys_.size(); }
    std::uint64_t key(std::uint32_t group) const { return keys_[group]; }

private:
    static constexpr std::uint32_t kEmpty = 0xffffffffU;
    std::vector<std::uint32_t> slots_;
    std::vector<std::uint64_t> keys_;
    std::uint64_t slot_mask_ = 0;
};

/// Per-group class weights and totals for one projection of the support.
class GroupedWeights {
public:
    void build(const Distribution& dist, std::uint64_t mask);

    std::size_t groups() const { return index_.size(); }
    std::uint64_t key(std::uint32_t g) const { return index_.key(g); }
    std::uint32_t find(std::uint64_t key) const { return index_.find(key); }
    std::uint64_t total(std::uint32_t g) const { return totals_[g]; }
    std::uint64_t weight(std::uint32_t g, ValueIndex y) const { return weights_[g * classes_ + y]; }

private:
    GroupIndex index_;
    std::vector<std::uint64_t> weights_;
    std::vector<std::uint64_t> totals_;
    std::size_t classes_ = 0;
};

struct RawWitness {
    std::uint64_t key;  // joint key projected onto context + feature
    ValueIndex value;
    ValueIndex y;
    std::uint64_t lhs_num, lhs_den, rhs_num, rhs_den;
};

struct ContextEvaluation {
    std::optional<RawWitness> witness;  // canonical-first qualifying triple
    double max_gap = 0;                 // largest gap among supported comparisons
    bool insufficient = false;          // some comparison lacked support
};

ContextEvaluation evaluate_feature_context(const Distribution& dist, std::size_t feature, ContextSubset context,
                                           const Comparator& cmp);

struct RawPairWitness {
    std::uint64_t key;  // joint key projected onto context + both features
    ValueIndex value_i, value_j, y;
    std::uint64_t both_num, both_den;  // p(y | xi, xj, s')
    std::uint64_t j_num, j_den;        // p(y | xj, s')
    std::uint64_t i_num, i_den;        // p(y | xi, s')
};

struct PairEvaluation {
    std::optional<RawPairWitness> witness;
    double score = 0;  // max over tuples of min(gap10, gap11)
};

PairEvaluation evaluate_pair_context(const Distribution& dist, std::size_t i, std::size_t j, ContextSubset context,
                                     const Comparator& cmp);

}  // namespace ctxscope::detail

#include "scan_kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <tuple>

namespace ctxscope::detail {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

double ratio_gap(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return std::fabs(static_cast<double>(a) / static_cast<double>(b) -
                     static_cast<double>(c) / static_cast<double>(d));
}

}  // namespace

void GroupIndex::reset(std::size_t expected) {
    const std::size_t capacity = std::bit_ceil(std::max<std::size_t>(16, expected * 2));
    slots_.assign(capacity, kEmpty);
    slot_mask_ = capacity - 1;
    keys_.clear();
    keys_.reserve(expected);
}

std::uint32_t GroupIndex::find_or_insert(std::uint64_t key) {
    for (std::uint64_t s = mix(key) & slot_mask_;; s = (s + 1) & slot_mask_) {
        const std::uint32_t g = slots_[s];
        if (g == kEmpty) {
            const auto id = static_cast<std::uint32_t>(keys_.size());
            slots_[s] = id;
            keys_.push_back(key);
            return id;
        }
        if (keys_[g] == key) {
            return g;
        }
    }
}

std::uint32_t GroupIndex::find(std::uint64_t key) const {
    for (std::uint64_t s = mix(key) & slot_mask_;; s = (s + 1) & slot_mask_) {
        const std::uint32_t g = slots_[s];
        if (keys_[g] == key) {
            return g;
        }
    }
}

void GroupedWeights::build(const Distribution& dist, std::uint64_t mask) {
    const auto cells = dist.cells();
    classes_ = dist.space().class_count();
    index_.reset(cells.size());
    weights_.clear();
    totals_.clear();
    for (const Cell& c : cells) {
        const std::uint32_t g = index_.find_or_insert(c.key & mask);
        if (g == totals_.size()) {
            totals_.push_back(0);
            weights_.resize(weights_.size() + classes_, 0);
        }
        totals_[g] += c.weight;
        weights_[g * classes_ + c.y] += c.weight;
    }
}

ContextEvaluation evaluate_feature_context(const Distribution& dist, std::size_t feature, ContextSubset context,
                                           const Comparator& cmp) {
    const FeatureSpace& space = dist.space();
    const std::uint64_t context_mask = space.subset_mask(context);
    const std::uint64_t joint_mask = context_mask | space.field_mask(feature);
    const auto classes = static_cast<ValueIndex>(space.class_count());

    thread_local GroupedWeights joint;
    thread_local GroupedWeights marginal;
    joint.build(dist, joint_mask);
    marginal.build(dist, context_mask);

    ContextEvaluation out;
    for (std::uint32_t g = 0; g < joint.groups(); ++g) {
        const std::uint64_t key = joint.key(g);
        const std::uint32_t p = marginal.find(key & context_mask);
        bool found_in_group = false;
        for (ValueIndex y = 0; y < classes; ++y) {
            const std::uint64_t a = joint.weight(g, y);
            const std::uint64_t b = joint.total(g);
            const std::uint64_t c = marginal.weight(p, y);
            const std::uint64_t d = marginal.total(p);
            const Comparison result = cmp(a, b, c, d);
            if (result == Comparison::InsufficientSupport) {
                out.insufficient = true;
                continue;
            }
            out.max_gap = std::max(out.max_gap, ratio_gap(a, b, c, d));
            if (result != Comparison::Differs || found_in_group) {
                continue;
            }
            found_in_group = true;
            const ValueIndex value = space.unpack(key, feature);
            const auto order = [&](const RawWitness& w) {
                return std::tuple(w.key & context_mask, w.value, w.y);
            };
            RawWitness candidate{key, value, y, a, b, c, d};
            if (!out.witness || order(candidate) < order(*out.witness)) {
                out.witness = candidate;
            }
        }
    }
    return out;
}

PairEvaluation evaluate_pair_context(const Distribution& dist, std::size_t i, std::size_t j, ContextSubset context,
                                     const Comparator& cmp) {
    const FeatureSpace& space = dist.space();
    const std::uint64_t context_mask = space.subset_mask(context);
    const std::uint64_t mask_i = context_mask | space.field_mask(i);
    const std::uint64_t mask_j = context_mask | space.field_mask(j);
    const std::uint64_t mask_both = mask_i | mask_j;
    const auto classes = static_cast<ValueIndex>(space.class_count());

    thread_local GroupedWeights both;
    thread_local GroupedWeights given_i;
    thread_local GroupedWeights given_j;
    both.build(dist, mask_both);
    given_i.build(dist, mask_i);
    given_j.build(dist, mask_j);

    PairEvaluation out;
    for (std::uint32_t g = 0; g < both.groups(); ++g) {
        const std::uint64_t key = both.key(g);
        const std::uint32_t gi = given_i.find(key & mask_i);
        const std::uint32_t gj = given_j.find(key & mask_j);
        for (ValueIndex y = 0; y < classes; ++y) {
            const std::uint64_t a = both.weight(g, y);
            const std::uint64_t b = both.total(g);
            const std::uint64_t j_num = given_j.weight(gj, y);
            const std::uint64_t j_den = given_j.total(gj);
            const std::uint64_t i_num = given_i.weight(gi, y);
            const std::uint64_t i_den = given_i.total(gi);
            const Comparison eq10 = cmp(a, b, j_num, j_den);
            const Comparison eq11 = cmp(a, b, i_num, i_den);
            if (eq10 == Comparison::InsufficientSupport || eq11 == Comparison::InsufficientSupport) {
                continue;
            }
            out.score = std::max(out.score, std::min(ratio_gap(a, b, j_num, j_den), ratio_gap(a, b, i_num, i_den)));
            if (eq10 != Comparison::Differs || eq11 != Comparison::Differs) {
                continue;
            }
            const RawPairWitness candidate{key, space.unpack(key, i), space.unpack(key, j), y,
                                           a,   b,                    j_num,                j_den,
                                           i_num, i_den};
            const auto order = [&](const RawPairWitness& w) {
                return std::tuple(w.key & context_mask, w.value_i, w.value_j, w.y);
            };
            if (!out.witness || order(candidate) < order(*out.witness)) {
                out.witness = candidate;
            }
        }
    }
    return out;
}

}  // namespace ctxscope::detail

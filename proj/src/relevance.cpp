#include "ctxscope/relevance.hpp"

#include "ctxscope/error.hpp"
#include "ctxscope/search.hpp"
#include "internal.hpp"

namespace ctxscope {

namespace detail {

Assignment assignment_from_key(const FeatureSpace& space, ContextSubset context, std::uint64_t key) {
    Assignment a;
    for (std::size_t f : context.members()) {
        a.bind(f, space.unpack(key, f));
    }
    return a;
}

Witness make_witness(const Distribution& dist, std::size_t feature, ContextSubset context, const RawWitness& raw) {
    Witness w;
    w.feature = feature;
    w.context = context;
    w.context_assignment = assignment_from_key(dist.space(), context, raw.key);
    w.value = raw.value;
    w.y = raw.y;
    w.lhs = Rational(raw.lhs_num, raw.lhs_den);
    w.rhs = Rational(raw.rhs_num, raw.rhs_den);
    w.gap = abs(w.lhs - w.rhs);
    w.lhs_support = raw.lhs_den;
    w.rhs_support = raw.rhs_den;
    return w;
}

void require_feature(const Distribution& dist, std::size_t feature) {
    if (feature >= dist.space().feature_count()) {
        fail(ErrorKind::Usage, "feature index " + std::to_string(feature) + " is out of range");
    }
}

void require_compatible(const Distribution& dist, const ComparisonConfig& cfg) {
    cfg.validate();
    if (cfg.empirical() && !dist.is_counts()) {
        fail(ErrorKind::Usage, "empirical comparison needs a table of instance counts, not an exact distribution");
    }
}

}  // namespace detail

std::string_view to_string(Relevance relevance) {
    switch (relevance) {
        case Relevance::StronglyRelevant:
            return "strongly_relevant";
        case Relevance::WeaklyRelevant:
            return "weakly_relevant";
        case Relevance::Irrelevant:
            return "irrelevant";
        case Relevance::NoWitness:
            return "no_witness";
    }
    return "?";
}

std::optional<Witness> differs_in_context(const Distribution& dist, std::size_t feature, ContextSubset context,
                                          const ComparisonConfig& cfg) {
    detail::require_feature(dist, feature);
    detail::require_compatible(dist, cfg);
    const std::size_t m = dist.space().feature_count();
    if (context.contains(feature)) {
        fail(ErrorKind::Usage, "the context must not contain the feature under test");
    }
    if (!context.is_subset_of(ContextSubset::all(m))) {
        fail(ErrorKind::Usage, "context refers to features outside the space");
    }
    const Comparator cmp(cfg);
    const auto eval = detail::evaluate_feature_context(dist, feature, context, cmp);
    if (!eval.witness) {
        return std::nullopt;
    }
    return detail::make_witness(dist, feature, context, *eval.witness);
}

std::optional<Witness> is_strongly_relevant(const Distribution& dist, std::size_t feature,
                                            const ComparisonConfig& cfg) {
    detail::require_feature(dist, feature);
    return differs_in_context(dist, feature, ContextSubset::all_except(dist.space().feature_count(), feature), cfg);
}

PredicateResult is_weakly_relevant(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                                   const SearchBudget& budget) {
    budget.validate();
    if (is_strongly_relevant(dist, feature, cfg)) {
        return {};
    }
    const std::size_t m = dist.space().feature_count();
    if (m == 1) {
        return {};  // the empty set has no proper subset
    }
    if (!budget.exhaustive_for(m - 1)) {
        ScanResult scan = heuristic_scan(dist, feature, cfg, budget);
        return {std::move(scan.weak_witness), false};
    }
    ContextEnumerator contexts(m, ContextSubset{}.with(feature), m - 2);
    while (auto context = contexts.next()) {
        if (auto w = differs_in_context(dist, feature, *context, cfg)) {
            return {std::move(w), true};
        }
    }
    return {};
}

RelevanceVerdict relevance_class(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                                 const SearchBudget& budget) {
    RelevanceVerdict verdict;
    verdict.feature = feature;
    if (auto strong = is_strongly_relevant(dist, feature, cfg)) {
        verdict.relevance = Relevance::StronglyRelevant;
        verdict.witness = std::move(strong);
        return verdict;
    }
    PredicateResult weak = is_weakly_relevant(dist, feature, cfg, budget);
    verdict.exact = weak.exhaustive;
    if (weak.holds()) {
        verdict.relevance = Relevance::WeaklyRelevant;
        verdict.witness = std::move(weak.witness);
    } else if (weak.exhaustive && !cfg.empirical()) {
        verdict.relevance = Relevance::Irrelevant;
    } else {
        verdict.relevance = Relevance::NoWitness;
    }
    return verdict;
}

bool verify_witness(const Distribution& dist, const Witness& w, const ComparisonConfig& cfg) {
    const FeatureSpace& space = dist.space();
    if (w.feature >= space.feature_count() || w.context.contains(w.feature) ||
        w.context_assignment.subset() != w.context || w.context_assignment.class_value()) {
        return false;
    }
    if (w.value >= space.domain_size(w.feature) || w.y >= space.class_count()) {
        return false;
    }
    Assignment joint = w.context_assignment;
    joint.bind(w.feature, w.value);
    const std::uint64_t joint_weight = dist.weight_of(joint);
    if (joint_weight == 0 || joint_weight != w.lhs_support || dist.weight_of(w.context_assignment) != w.rhs_support) {
        return false;
    }
    const Rational lhs = conditional_class(dist, w.y, joint);
    const Rational rhs = conditional_class(dist, w.y, w.context_assignment);
    if (lhs != w.lhs || rhs != w.rhs || w.gap != abs(lhs - rhs)) {
        return false;
    }
    return compare({lhs, w.lhs_support}, {rhs, w.rhs_support}, cfg) == Comparison::Differs;
}

}  // namespace ctxscope

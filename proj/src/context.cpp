#include "ctxscope/context.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <map>
#include <tuple>
#include <thread>

#include "ctxscope/csv_io.hpp"
#include "ctxscope/error.hpp"
#include "internal.hpp"

#ifndef CTXSCOPE_VERSION
#define CTXSCOPE_VERSION "0.0.0"
#endif

namespace ctxscope {

namespace {

constexpr std::size_t kMaxPairTable = 256;

template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            body(k);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                    try {
                        body(k);
                    } catch (...) {
                        errors[k] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

// Upper bound on the contexts a feature scan may visit.
std::uint64_t contexts_per_feature(std::size_t ground, const SearchBudget& budget) {
    if (budget.exhaustive_for(ground)) {
        return ground >= 64 ? std::numeric_limits<std::uint64_t>::max() : std::uint64_t{1} << ground;
    }
    const std::uint64_t levels = std::min<std::uint64_t>(budget.max_context_size, ground);
    std::uint64_t n = 2 + budget.random_probes;
    n = saturating_add(n, saturating_mul(levels * ground, budget.beam_width));
    return saturating_add(n, levels * ground);
}

std::uint64_t family_size(const FeatureSpace& space, const SearchBudget& budget) {
    const std::size_t m = space.feature_count();
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t per_context = space.domain_size(i) * space.class_count();
        total = saturating_add(total, saturating_mul(contexts_per_feature(m - 1, budget), per_context));
    }
    return std::max<std::uint64_t>(total, 1);
}

SensitivityWitness make_sensitivity_witness(const Distribution& dist, ContextSubset context,
                                            const detail::RawPairWitness& raw) {
    SensitivityWitness w;
    w.context = context;
    w.context_assignment = detail::assignment_from_key(dist.space(), context, raw.key);
    w.value_i = raw.value_i;
    w.value_j = raw.value_j;
    w.y = raw.y;
    w.p_both = Rational(raw.both_num, raw.both_den);
    w.p_given_j = Rational(raw.j_num, raw.j_den);
    w.p_given_i = Rational(raw.i_num, raw.i_den);
    w.both_support = raw.both_den;
    w.j_support = raw.j_den;
    w.i_support = raw.i_den;
    return w;
}

}  // namespace

std::string_view to_string(Label label) {
    switch (label) {
        case Label::Primary:
            return "primary";
        case Label::Contextual:
            return "contextual";
        case Label::Irrelevant:
            return "irrelevant";
        case Label::NoWitness:
            return "no_witness";
    }
    return "?";
}

std::string_view tool_version() { return CTXSCOPE_VERSION; }

Label classify_feature(std::optional<std::size_t> alpha, bool conclusive) {
    if (alpha) {
        return *alpha == 0 ? Label::Primary : Label::Contextual;
    }
    return conclusive ? Label::Irrelevant : Label::NoWitness;
}

ScanResult context_sizes(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                         const SearchBudget& budget) {
    return scan_feature(dist, feature, cfg, budget);
}

ContextProfile context_profile(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                               const SearchBudget& budget) {
    ScanResult scan = context_sizes(dist, feature, cfg, budget);
    const std::size_t full = dist.space().feature_count() - 1;

    // A heuristic walk may skip the full context; the strong test is a single evaluation.
    if (!scan.exhaustive && !scan.strong_witness) {
        ++scan.contexts_evaluated;
        if (auto strong = is_strongly_relevant(dist, feature, cfg)) {
            scan.strong_witness = strong;
            scan.beta = full;
            scan.beta_witness = strong;
            if (!scan.alpha) {
                scan.alpha = full;
                scan.alpha_witness = strong;
            }
        }
    }

    ContextProfile p;
    p.feature = feature;
    p.alpha = scan.alpha;
    p.beta = scan.beta;
    p.alpha_witness = scan.alpha_witness;
    p.beta_witness = scan.beta_witness;
    p.contexts_evaluated = scan.contexts_evaluated;
    p.insufficient_support = scan.insufficient_support;
    p.alpha_exact = scan.exhaustive || scan.alpha == std::size_t{0};
    p.beta_exact = scan.exhaustive || scan.beta == full;

    p.relevance.feature = feature;
    p.relevance.exact = scan.exhaustive;
    if (scan.strong_witness) {
        p.relevance.relevance = Relevance::StronglyRelevant;
        p.relevance.witness = scan.strong_witness;
    } else if (scan.weak_witness) {
        p.relevance.relevance = Relevance::WeaklyRelevant;
        p.relevance.witness = scan.weak_witness;
    } else if (scan.exhaustive && !cfg.empirical()) {
        p.relevance.relevance = Relevance::Irrelevant;
    } else {
        p.relevance.relevance = Relevance::NoWitness;
    }
    p.label = classify_feature(p.alpha, scan.exhaustive && !cfg.empirical());
    p.class_given_value = class_conditionals(dist, {feature});
    return p;
}

SensitivityEdge weak_sensitivity(const Distribution& dist, std::size_t i, std::size_t j, const ComparisonConfig& cfg,
                                 const SearchBudget& budget) {
    detail::require_feature(dist, i);
    detail::require_feature(dist, j);
    if (i == j) {
        fail(ErrorKind::Usage, "context-sensitivity needs two distinct features");
    }
    detail::require_compatible(dist, cfg);
    budget.validate();
    const std::size_t m = dist.space().feature_count();
    const ContextSubset ground = ContextSubset::all(m).without(i).without(j);
    const Comparator cmp(cfg);

    SensitivityEdge edge;
    edge.i = i;
    edge.j = j;
    std::optional<std::pair<ContextSubset, detail::RawPairWitness>> found;
    const auto evaluate = [&](ContextSubset c) {
        ++edge.contexts_evaluated;
        const auto r = detail::evaluate_pair_context(dist, i, j, c, cmp);
        if (r.witness && !found) {
            found.emplace(c, *r.witness);
        }
        return detail::LatticeProbe{r.witness.has_value(), r.score};
    };

    if (budget.exhaustive_for(m - 2)) {
        ContextEnumerator contexts(m, ContextSubset{}.with(i).with(j), m - 2);
        while (!found) {
            const auto c = contexts.next();
            if (!c) {
                break;
            }
            evaluate(*c);
        }
    } else {
        edge.exact = false;
        const std::uint64_t stream = (std::uint64_t{1} << 63) | (std::uint64_t{std::min(i, j)} << 32) | std::max(i, j);
        detail::heuristic_lattice(ground, budget, stream, true, evaluate);
    }
    if (found) {
        edge.witness = make_sensitivity_witness(dist, found->first, found->second);
        if (!verify_sensitivity(dist, i, j, *edge.witness, cfg)) {
            fail(ErrorKind::Invariant, "sensitivity witness failed re-verification");
        }
    }
    edge.weak = edge.witness.has_value();
    return edge;
}

std::vector<ConditionalCell> class_conditionals(const Distribution& dist, const std::vector<std::size_t>& features) {
    const FeatureSpace& space = dist.space();
    for (std::size_t f : features) {
        detail::require_feature(dist, f);
    }
    const std::uint64_t mask = space.subset_mask([&] {
        ContextSubset s;
        for (std::size_t f : features) {
            s = s.with(f);
        }
        return s;
    }());
    std::map<std::uint64_t, std::vector<std::uint64_t>> groups;
    for (const Cell& c : dist.cells()) {
        auto& w = groups[c.key & mask];
        w.resize(space.class_count());
        w[c.y] += c.weight;
    }
    std::vector<ConditionalCell> out;
    for (const auto& [key, weights] : groups) {
        std::uint64_t total = 0;
        for (std::uint64_t w : weights) {
            total += w;
        }
        std::vector<ValueIndex> values;
        for (std::size_t f : features) {
            values.push_back(space.unpack(key, f));
        }
        for (ValueIndex y = 0; y < space.class_count(); ++y) {
            out.push_back(ConditionalCell{values, y, Rational(weights[y], total), total});
        }
    }
    std::sort(out.begin(), out.end(), [](const ConditionalCell& a, const ConditionalCell& b) {
        return std::tie(a.values, a.y) < std::tie(b.values, b.y);
    });
    return out;
}

bool strong_sensitivity(const ContextProfile& i, const ContextProfile& j, const SensitivityEdge& edge) {
    return edge.weak && i.label == Label::Primary && j.label == Label::Contextual;
}

bool verify_sensitivity(const Distribution& dist, std::size_t i, std::size_t j, const SensitivityWitness& w,
                        const ComparisonConfig& cfg) {
    const FeatureSpace& space = dist.space();
    const std::size_t m = space.feature_count();
    if (i >= m || j >= m || i == j || w.context.contains(i) || w.context.contains(j) ||
        w.context_assignment.subset() != w.context || w.context_assignment.class_value()) {
        return false;
    }
    if (w.value_i >= space.domain_size(i) || w.value_j >= space.domain_size(j) || w.y >= space.class_count()) {
        return false;
    }
    Assignment with_i = w.context_assignment;
    with_i.bind(i, w.value_i);
    Assignment with_j = w.context_assignment;
    with_j.bind(j, w.value_j);
    Assignment both = with_i;
    both.bind(j, w.value_j);
    const std::uint64_t both_weight = dist.weight_of(both);
    if (both_weight == 0 || both_weight != w.both_support || dist.weight_of(with_j) != w.j_support ||
        dist.weight_of(with_i) != w.i_support) {
        return false;
    }
    const Rational p_both = conditional_class(dist, w.y, both);
    const Rational p_j = conditional_class(dist, w.y, with_j);
    const Rational p_i = conditional_class(dist, w.y, with_i);
    if (p_both != w.p_both || p_j != w.p_given_j || p_i != w.p_given_i) {
        return false;
    }
    return compare({p_both, w.both_support}, {p_j, w.j_support}, cfg) == Comparison::Differs &&
           compare({p_both, w.both_support}, {p_i, w.i_support}, cfg) == Comparison::Differs;
}

AnalysisReport analyze(const Distribution& dist, const AnalysisOptions& options) {
    options.budget.validate();
    ComparisonConfig cfg = options.comparison;
    cfg.validate();
    const FeatureSpace& space = dist.space();
    const std::size_t m = space.feature_count();
    if (cfg.bonferroni) {
        cfg.comparison_count = family_size(space, options.budget);
    }
    detail::require_compatible(dist, cfg);

    AnalysisReport report{space, {}, {}, true, cfg, options.budget, dist.source(), dist.total(), {}, {}, {}, {}};
    report.profiles.resize(m);
    parallel_for(m, options.threads,
                 [&](std::size_t f) { report.profiles[f] = context_profile(dist, f, cfg, options.budget); });

    // An exhaustive scan without any witness rules out every edge at that feature.
    const auto ruled_out = [&](std::size_t f) {
        return report.profiles[f].relevance.exact && !report.profiles[f].alpha;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (!ruled_out(i) && !ruled_out(j)) {
                pairs.emplace_back(i, j);
            }
        }
    }
    std::vector<SensitivityEdge> scanned(pairs.size());
    parallel_for(pairs.size(), options.threads, [&](std::size_t k) {
        scanned[k] = weak_sensitivity(dist, pairs[k].first, pairs[k].second, cfg, options.budget);
    });
    for (SensitivityEdge& e : scanned) {
        report.pairs_exhaustive = report.pairs_exhaustive && e.exact;
        if (!e.weak) {
            continue;
        }
        e.strong_i_to_j = strong_sensitivity(report.profiles[e.i], report.profiles[e.j], e);
        e.strong_j_to_i = strong_sensitivity(report.profiles[e.j], report.profiles[e.i], e);
        if (space.domain_size(e.i) * space.domain_size(e.j) <= kMaxPairTable) {
            e.class_given_pair = class_conditionals(dist, {e.i, e.j});
        }
        report.edges.push_back(std::move(e));
    }

    for (ValueIndex y = 0; y < space.class_count(); ++y) {
        report.class_marginal.push_back(event_probability(dist, Assignment{}.bind_class(y)));
    }
    if (!dist.is_counts()) {
        report.input_digest = distribution_digest(static_cast<const ExactDistribution&>(dist));
    }

    if (!cfg.empirical() && dist.is_counts()) {
        report.warnings.emplace_back(
            "exact comparison on sampled counts: sampling noise makes almost every feature appear primary");
    }
    const bool heuristic = std::any_of(report.profiles.begin(), report.profiles.end(),
                                       [](const ContextProfile& p) { return !p.relevance.exact; });
    if (heuristic || !report.pairs_exhaustive) {
        report.warnings.emplace_back("heuristic search: alpha values are upper bounds and beta values lower bounds");
    }
    if (std::any_of(report.profiles.begin(), report.profiles.end(),
                    [](const ContextProfile& p) { return p.insufficient_support; })) {
        report.warnings.emplace_back("some comparisons were skipped for insufficient support (min_support=" +
                                     std::to_string(cfg.min_support) + ")");
    }
    return report;
}

}  // namespace ctxscope

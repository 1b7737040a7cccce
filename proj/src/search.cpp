#include "ctxscope/search.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "ctxscope/error.hpp"
#include "internal.hpp"

namespace ctxscope {

namespace {

std::uint64_t low_bits(std::size_t k) {
    return k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
}

// Scatters the low bits of `compressed` onto the members of `ground`, lowest first.
std::uint64_t deposit(std::uint64_t compressed, std::uint64_t ground) {
    std::uint64_t out = 0;
    for (std::uint64_t rest = ground; rest != 0 && compressed != 0; rest &= rest - 1, compressed >>= 1) {
        if (compressed & 1U) {
            out |= rest & (~rest + 1);
        }
    }
    return out;
}

// Next integer with the same popcount (Gosper). Caller checks for the last pattern.
std::uint64_t next_same_popcount(std::uint64_t x) {
    const std::uint64_t lowest = x & (~x + 1);
    const std::uint64_t ripple = x + lowest;
    return (((ripple ^ x) >> 2) / lowest) | ripple;
}

bool is_last_pattern(std::uint64_t x, std::size_t k, std::size_t n) {
    return k == 0 || x == low_bits(k) << (n - k);
}

}  // namespace

void SearchBudget::validate() const {
    if (exact_limit < 1) {
        fail(ErrorKind::Usage, "exact_limit must be at least 1");
    }
    if (beam_width < 1) {
        fail(ErrorKind::Usage, "beam_width must be at least 1");
    }
}

ContextEnumerator::ContextEnumerator(std::size_t m, ContextSubset excluded, std::size_t max_size)
    : max_size_(max_size) {
    if (m > 64) {
        fail(ErrorKind::Usage, "at most 64 features are supported");
    }
    if (!excluded.is_subset_of(ContextSubset::all(m))) {
        fail(ErrorKind::Usage, "excluded set refers to features outside the space");
    }
    ground_ = ContextSubset(ContextSubset::all(m).bits() & ~excluded.bits()).members();
    max_size_ = std::min(max_size, ground_.size());
}

std::optional<ContextSubset> ContextEnumerator::next() {
    if (done_) {
        return std::nullopt;
    }
    const std::size_t n = ground_.size();
    if (!started_) {
        started_ = true;
    } else if (is_last_pattern(compressed_, size_, n)) {
        if (++size_ > max_size_) {
            done_ = true;
            return std::nullopt;
        }
        compressed_ = low_bits(size_);
    } else {
        compressed_ = next_same_popcount(compressed_);
    }
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < n; ++b) {
        if ((compressed_ >> b) & 1U) {
            bits |= std::uint64_t{1} << ground_[b];
        }
    }
    return ContextSubset(bits);
}

std::vector<ContextSubset> enumerate_contexts(std::size_t m, ContextSubset excluded, std::size_t max_size) {
    std::vector<ContextSubset> out;
    ContextEnumerator e(m, excluded, max_size);
    while (auto c = e.next()) {
        out.push_back(*c);
    }
    return out;
}

namespace detail {

bool for_each_subset_of_size(ContextSubset ground, std::size_t k, const std::function<bool(ContextSubset)>& visit) {
    const std::size_t n = ground.size();
    if (k > n) {
        return false;
    }
    for (std::uint64_t x = low_bits(k);; x = next_same_popcount(x)) {
        if (visit(ContextSubset(deposit(x, ground.bits())))) {
            return true;
        }
        if (is_last_pattern(x, k, n)) {
            return false;
        }
    }
}

void heuristic_lattice(ContextSubset ground, const SearchBudget& budget, std::uint64_t stream, bool stop_at_first,
                       const std::function<LatticeProbe(ContextSubset)>& evaluate) {
    std::unordered_map<std::uint64_t, LatticeProbe> visited;
    const auto probe = [&](ContextSubset c) {
        if (auto it = visited.find(c.bits()); it != visited.end()) {
            return it->second;
        }
        const LatticeProbe r = evaluate(c);
        visited.emplace(c.bits(), r);
        return r;
    };
    const auto by_score = [&](ContextSubset a, ContextSubset b) {
        const double sa = visited.at(a.bits()).score;
        const double sb = visited.at(b.bits()).score;
        return sa != sb ? sa > sb : a < b;
    };
    const std::vector<std::size_t> members = ground.members();
    const std::size_t levels = std::min(budget.max_context_size, members.size());

    // Upward beam from the empty context.
    if (!probe(ContextSubset{}).witness) {
        std::vector<ContextSubset> beam{ContextSubset{}};
        for (std::size_t level = 1; level <= levels; ++level) {
            std::set<ContextSubset> expansion;
            for (ContextSubset b : beam) {
                for (std::size_t f : members) {
                    if (!b.contains(f)) {
                        expansion.insert(b.with(f));
                    }
                }
            }
            bool level_hit = false;
            for (ContextSubset c : expansion) {
                if (probe(c).witness) {
                    level_hit = true;
                    if (stop_at_first) {
                        return;
                    }
                }
            }
            if (level_hit) {
                break;
            }
            beam.assign(expansion.begin(), expansion.end());
            std::sort(beam.begin(), beam.end(), by_score);
            beam.resize(std::min(beam.size(), budget.beam_width));
        }
    } else if (stop_at_first) {
        return;
    }

    // Greedy elimination downward from the full ground set.
    const bool descend = budget.max_context_size > 0;
    if (descend && probe(ground).witness) {
        if (stop_at_first) {
            return;
        }
    } else if (descend) {
        ContextSubset current = ground;
        for (std::size_t level = 1; level <= levels && !current.empty(); ++level) {
            std::vector<ContextSubset> children;
            for (std::size_t f : current.members()) {
                children.push_back(current.without(f));
            }
            std::sort(children.begin(), children.end());
            bool level_hit = false;
            for (ContextSubset c : children) {
                if (probe(c).witness) {
                    level_hit = true;
                    if (stop_at_first) {
                        return;
                    }
                }
            }
            if (level_hit) {
                break;
            }
            current = *std::min_element(children.begin(), children.end(), by_score);
        }
    }

    // Random probes: each member of the ground set kept with probability 1/2.
    std::seed_seq seq{static_cast<std::uint32_t>(budget.seed), static_cast<std::uint32_t>(budget.seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 engine(seq);
    for (std::size_t p = 0; p < budget.random_probes; ++p) {
        if (probe(ContextSubset(engine() & ground.bits())).witness && stop_at_first) {
            return;
        }
    }
}

}  // namespace detail

ScanResult exact_scan(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg) {
    detail::require_feature(dist, feature);
    detail::require_compatible(dist, cfg);
    const std::size_t m = dist.space().feature_count();
    const ContextSubset ground = ContextSubset::all_except(m, feature);
    const std::size_t n = m - 1;
    const Comparator cmp(cfg);

    ScanResult res;
    res.feature = feature;
    res.exhaustive = true;
    const auto witness_in = [&](ContextSubset c) -> std::optional<Witness> {
        ++res.contexts_evaluated;
        const auto eval = detail::evaluate_feature_context(dist, feature, c, cmp);
        res.insufficient_support = res.insufficient_support || eval.insufficient;
        if (!eval.witness) {
            return std::nullopt;
        }
        return detail::make_witness(dist, feature, c, *eval.witness);
    };

    // Smallest context: ascend from the empty set.
    for (std::size_t k = 0; k <= n && !res.alpha; ++k) {
        detail::for_each_subset_of_size(ground, k, [&](ContextSubset c) {
            if (auto w = witness_in(c)) {
                res.alpha = k;
                res.alpha_witness = std::move(w);
                return true;
            }
            return false;
        });
    }
    if (!res.alpha) {
        return res;
    }

    // Largest context: descend from the full set; the alpha level is already known.
    for (std::size_t k = n; k > *res.alpha && !res.beta; --k) {
        detail::for_each_subset_of_size(ground, k, [&](ContextSubset c) {
            if (auto w = witness_in(c)) {
                res.beta = k;
                res.beta_witness = std::move(w);
                return true;
            }
            return false;
        });
    }
    if (!res.beta) {
        res.beta = res.alpha;
        res.beta_witness = res.alpha_witness;
    }
    if (*res.beta == n) {
        res.strong_witness = res.beta_witness;
    }
    if (*res.alpha < n) {
        res.weak_witness = res.alpha_witness;
    }
    return res;
}

ScanResult heuristic_scan(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                          const SearchBudget& budget) {
    detail::require_feature(dist, feature);
    detail::require_compatible(dist, cfg);
    budget.validate();
    const std::size_t m = dist.space().feature_count();
    const ContextSubset ground = ContextSubset::all_except(m, feature);
    const Comparator cmp(cfg);

    ScanResult res;
    res.feature = feature;
    res.exhaustive = false;
    std::map<ContextSubset, detail::RawWitness> witnesses;  // canonical order
    detail::heuristic_lattice(ground, budget, feature, false, [&](ContextSubset c) {
        ++res.contexts_evaluated;
        const auto eval = detail::evaluate_feature_context(dist, feature, c, cmp);
        res.insufficient_support = res.insufficient_support || eval.insufficient;
        if (eval.witness) {
            witnesses.emplace(c, *eval.witness);
        }
        return detail::LatticeProbe{eval.witness.has_value(), eval.max_gap};
    });
    if (witnesses.empty()) {
        return res;
    }

    const auto materialize = [&](const auto& entry) {
        Witness w = detail::make_witness(dist, feature, entry.first, entry.second);
        if (!verify_witness(dist, w, cfg)) {
            fail(ErrorKind::Invariant, "heuristic witness failed re-verification");
        }
        return w;
    };
    const auto smallest = witnesses.begin();
    res.alpha = smallest->first.size();
    res.alpha_witness = materialize(*smallest);
    const std::size_t largest = witnesses.rbegin()->first.size();
    const auto first_largest = std::find_if(witnesses.begin(), witnesses.end(),
                                            [&](const auto& e) { return e.first.size() == largest; });
    res.beta = largest;
    res.beta_witness = materialize(*first_largest);
    if (auto full = witnesses.find(ground); full != witnesses.end()) {
        res.strong_witness = materialize(*full);
    }
    if (smallest->first != ground) {
        res.weak_witness = res.alpha_witness;
    }
    return res;
}

ScanResult scan_feature(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                        const SearchBudget& budget) {
    budget.validate();
    detail::require_feature(dist, feature);
    if (budget.exhaustive_for(dist.space().feature_count() - 1)) {
        return exact_scan(dist, feature, cfg);
    }
    return heuristic_scan(dist, feature, cfg, budget);
}

}  // namespace ctxscope

#pragma once

#include <cstdint>
#include <optional>

#include "ctxscope/rational.hpp"

namespace ctxscope {

enum class ComparisonMode { Exact, Empirical };

/// How two conditional class probabilities are judged "different".
///
/// Exact mode tests rational inequality. Empirical mode requires a gap larger
/// than epsilon, where epsilon is either fixed or derived per comparison from
/// `confidence` and the smaller conditioning count, and skips comparisons whose
/// conditioning cells hold fewer than `min_support` instances.
struct ComparisonConfig {
    ComparisonMode mode = ComparisonMode::Exact;
    Rational epsilon = 0;
    std::uint64_t min_support = 5;
    std::optional<double> confidence;
    bool bonferroni = false;
    /// Family size used by the Bonferroni correction; analyze() fills it in.
    std::uint64_t comparison_count = 1;

    static ComparisonConfig exact() { return {}; }
    static ComparisonConfig with_epsilon(Rational epsilon, std::uint64_t min_support = 5);
    static ComparisonConfig with_confidence(double confidence, std::uint64_t min_support = 5,
                                            bool bonferroni = false);

    bool empirical() const { return mode == ComparisonMode::Empirical; }
    /// Tail probability (1 - confidence), divided by the family size under Bonferroni.
    double delta() const;
    void validate() const;
};

enum class Comparison { Differs, Same, InsufficientSupport };

/// Two-sided Hoeffding radius sqrt(ln(2/(1-confidence)) / (2 n)), rounded up to a
/// multiple of 1e-12. Returns nothing for n = 0: such a comparison is skipped.
std::optional<Rational> epsilon_from_confidence(double confidence, std::uint64_t n_small);

/// Same radius for an explicit tail probability delta.
std::optional<Rational> hoeffding_radius(double delta, std::uint64_t n);

struct Conditional {
    Rational value;
    std::uint64_t support = 0;  // instance count of the conditioning cell
};

Comparison compare(const Conditional& lhs, const Conditional& rhs, const ComparisonConfig& cfg);

/// Integer fast path of compare() for conditionals given as weight ratios
/// (lhs = lhs_num / lhs_den). Used by the context scans.
class Comparator {
public:
    explicit Comparator(const ComparisonConfig& cfg);

    Comparison operator()(std::uint64_t lhs_num, std::uint64_t lhs_den, std::uint64_t rhs_num,
                          std::uint64_t rhs_den) const;

    const ComparisonConfig& config() const { return cfg_; }

private:
    ComparisonConfig cfg_;
    double delta_ = 0;
    BigInt eps_num_;
    BigInt eps_den_;
};

}  // namespace ctxscope

#include "ctxscope/estimation.hpp"

#include <cmath>

#include "ctxscope/error.hpp"

namespace ctxscope {

namespace {

constexpr std::uint64_t kEpsilonGrid = 1'000'000'000'000ULL;

}  // namespace

ComparisonConfig ComparisonConfig::with_epsilon(Rational epsilon, std::uint64_t min_support) {
    ComparisonConfig cfg;
    cfg.mode = ComparisonMode::Empirical;
    cfg.epsilon = std::move(epsilon);
    cfg.min_support = min_support;
    cfg.validate();
    return cfg;
}

ComparisonConfig ComparisonConfig::with_confidence(double confidence, std::uint64_t min_support, bool bonferroni) {
    ComparisonConfig cfg;
    cfg.mode = ComparisonMode::Empirical;
    cfg.confidence = confidence;
    cfg.min_support = min_support;
    cfg.bonferroni = bonferroni;
    cfg.validate();
    return cfg;
}

double ComparisonConfig::delta() const {
    if (!confidence) {
        return 0;
    }
    const double tail = 1.0 - *confidence;
    return bonferroni ? tail / static_cast<double>(comparison_count) : tail;
}

void ComparisonConfig::validate() const {
    if (mode == ComparisonMode::Exact) {
        if (epsilon != 0 || confidence || bonferroni) {
            fail(ErrorKind::Usage, "exact comparison takes no epsilon, confidence or Bonferroni correction");
        }
        return;
    }
    if (epsilon < 0) {
        fail(ErrorKind::Usage, "epsilon must be non-negative");
    }
    if (confidence && !(*confidence > 0.0 && *confidence < 1.0)) {
        fail(ErrorKind::Usage, "confidence must lie strictly between 0 and 1");
    }
    if (!confidence && epsilon <= 0) {
        fail(ErrorKind::Usage, "empirical comparison needs epsilon > 0 or a confidence level");
    }
    if (confidence && epsilon != 0) {
        fail(ErrorKind::Usage, "give either epsilon or a confidence level, not both");
    }
    if (bonferroni && !confidence) {
        fail(ErrorKind::Usage, "Bonferroni correction applies only to a confidence level");
    }
    if (min_support < 1) {
        fail(ErrorKind::Usage, "min_support must be at least 1");
    }
    if (comparison_count < 1) {
        fail(ErrorKind::Usage, "comparison_count must be at least 1");
    }
}

std::optional<Rational> hoeffding_radius(double delta, std::uint64_t n) {
    if (n == 0) {
        return std::nullopt;
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        fail(ErrorKind::Usage, "tail probability must lie strictly between 0 and 1");
    }
    const long double radius =
        std::sqrt(std::log(2.0L / static_cast<long double>(delta)) / (2.0L * static_cast<long double>(n)));
    const auto scaled = static_cast<std::uint64_t>(std::ceil(radius * static_cast<long double>(kEpsilonGrid)));
    return Rational(BigInt(scaled), BigInt(kEpsilonGrid));
}

std::optional<Rational> epsilon_from_confidence(double confidence, std::uint64_t n_small) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        fail(ErrorKind::Usage, "confidence must lie strictly between 0 and 1");
    }
    return hoeffding_radius(1.0 - confidence, n_small);
}

Comparison compare(const Conditional& lhs, const Conditional& rhs, const ComparisonConfig& cfg) {
    if (!cfg.empirical()) {
        return lhs.value != rhs.value ? Comparison::Differs : Comparison::Same;
    }
    if (lhs.support < cfg.min_support || rhs.support < cfg.min_support) {
        return Comparison::InsufficientSupport;
    }
    Rational eps = cfg.epsilon;
    if (cfg.confidence) {
        const auto radius = hoeffding_radius(cfg.delta(), std::min(lhs.support, rhs.support));
        if (!radius) {
            return Comparison::InsufficientSupport;
        }
        eps = *radius;
    }
    return abs(lhs.value - rhs.value) > eps ? Comparison::Differs : Comparison::Same;
}

Comparator::Comparator(const ComparisonConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.empirical()) {
        if (cfg_.confidence) {
            delta_ = cfg_.delta();
        } else {
            eps_num_ = numerator(cfg_.epsilon);
            eps_den_ = denominator(cfg_.epsilon);
        }
    }
}

Comparison Comparator::operator()(std::uint64_t lhs_num, std::uint64_t lhs_den, std::uint64_t rhs_num,
                                  std::uint64_t rhs_den) const {
    if (!cfg_.empirical()) {
        // Weights stay below 2^62, so both cross products fit in 128 bits.
        const auto left = static_cast<unsigned __int128>(lhs_num) * rhs_den;
        const auto right = static_cast<unsigned __int128>(rhs_num) * lhs_den;
        return left != right ? Comparison::Differs : Comparison::Same;
    }
    if (lhs_den < cfg_.min_support || rhs_den < cfg_.min_support) {
        return Comparison::InsufficientSupport;
    }
    BigInt eps_num = eps_num_;
    BigInt eps_den = eps_den_;
    if (cfg_.confidence) {
        const auto radius = hoeffding_radius(delta_, std::min(lhs_den, rhs_den));
        if (!radius) {
            return Comparison::InsufficientSupport;
        }
        eps_num = numerator(*radius);
        eps_den = denominator(*radius);
        if (lhs_den < (std::uint64_t{1} << 32) && rhs_den < (std::uint64_t{1} << 32) && eps_den <= kEpsilonGrid) {
            using Wide = unsigned __int128;
            const Wide left = Wide(lhs_num) * rhs_den;
            const Wide right = Wide(rhs_num) * lhs_den;
            const Wide gap = left > right ? left - right : right - left;
            const auto p = static_cast<std::uint64_t>(eps_num);
            const auto q = static_cast<std::uint64_t>(eps_den);
            return gap * q > Wide(p) * lhs_den * rhs_den ? Comparison::Differs : Comparison::Same;
        }
    }
    // |a/b - c/d| > p/q  <=>  |a d - c b| q > p b d
    BigInt gap = BigInt(lhs_num) * rhs_den - BigInt(rhs_num) * lhs_den;
    if (gap < 0) {
        gap = -gap;
    }
    return gap * eps_den > eps_num * lhs_den * rhs_den ? Comparison::Differs : Comparison::Same;
}

}  // namespace ctxscope

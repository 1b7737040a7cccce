#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxscope/distribution.hpp"
#include "ctxscope/estimation.hpp"
#include "ctxscope/relevance.hpp"
#include "ctxscope/search.hpp"

namespace ctxscope {

enum class Label {
    Primary,     // alpha = 0
    Contextual,  // alpha > 0
    Irrelevant,  // no context at all, established exhaustively in exact mode
    NoWitness,   // nothing found, but the search or the data cannot rule a context out
};

std::string_view to_string(Label label);

/// p(Y = y | bound values) for one positive-probability value combination.
struct ConditionalCell {
    std::vector<ValueIndex> values;
    ValueIndex y = 0;
    Rational p;
    std::uint64_t support = 0;

    bool operator==(const ConditionalCell&) const = default;
};

struct ContextProfile {
    std::size_t feature = 0;
    std::optional<std::size_t> alpha;
    std::optional<std::size_t> beta;
    std::optional<Witness> alpha_witness;
    std::optional<Witness> beta_witness;
    RelevanceVerdict relevance;
    Label label = Label::NoWitness;
    bool alpha_exact = true;
    bool beta_exact = true;
    std::size_t contexts_evaluated = 0;
    bool insufficient_support = false;
    std::vector<ConditionalCell> class_given_value;  // p(Y | X_i = v)
};

/// alpha = 0 -> Primary, alpha > 0 -> Contextual; without alpha the label is
/// Irrelevant only when the absence is conclusive.
Label classify_feature(std::optional<std::size_t> alpha, bool conclusive);

/// Minimum and maximum context sizes with witnesses; see ScanResult for the
/// meaning of the bounds in heuristic mode.
ScanResult context_sizes(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                         const SearchBudget& budget);

ContextProfile context_profile(const Distribution& dist, std::size_t feature, const ComparisonConfig& cfg,
                               const SearchBudget& budget);

/// One tuple (x_i, x_j, s', y) for which both
///   p(y | x_i, x_j, s') != p(y | x_j, s')   and   p(y | x_i, x_j, s') != p(y | x_i, s').
struct SensitivityWitness {
    ContextSubset context;
    Assignment context_assignment;
    ValueIndex value_i = 0;
    ValueIndex value_j = 0;
    ValueIndex y = 0;
    Rational p_both;     // p(y | x_i, x_j, s')
    Rational p_given_j;  // p(y | x_j, s')
    Rational p_given_i;  // p(y | x_i, s')
    std::uint64_t both_support = 0;
    std::uint64_t j_support = 0;
    std::uint64_t i_support = 0;

    bool operator==(const SensitivityWitness&) const = default;
};

struct SensitivityEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    bool weak = false;
    bool strong_i_to_j = false;
    bool strong_j_to_i = false;
    std::optional<SensitivityWitness> witness;
    bool exact = true;  // the subset scan was exhaustive
    std::size_t contexts_evaluated = 0;
    std::vector<ConditionalCell> class_given_pair;  // p(Y | X_i = u, X_j = v), filled by analyze()
};

/// Weak context-sensitivity of i and j. Strong flags are left false; see strong_sensitivity.
SensitivityEdge weak_sensitivity(const Distribution& dist, std::size_t i, std::size_t j, const ComparisonConfig& cfg,
                                 const SearchBudget& budget);

/// i is primary, j is contextual, and the pair is weakly sensitive.
bool strong_sensitivity(const ContextProfile& i, const ContextProfile& j, const SensitivityEdge& edge);

bool verify_sensitivity(const Distribution& dist, std::size_t i, std::size_t j, const SensitivityWitness& witness,
                        const ComparisonConfig& cfg);

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::vector<std::string> input_digests;
    std::optional<std::uint64_t> seed;
    std::string tool_version;
    std::optional<std::string> timestamp;
};

struct AnalysisOptions {
    ComparisonConfig comparison;
    SearchBudget budget;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct AnalysisReport {
    FeatureSpace space;
    std::vector<ContextProfile> profiles;
    std::vector<SensitivityEdge> edges;  // weak edges only, i < j
    bool pairs_exhaustive = true;
    ComparisonConfig config;
    SearchBudget budget;
    Distribution::Source source = Distribution::Source::Exact;
    std::uint64_t total = 0;  // common denominator, or instance count
    std::vector<Rational> class_marginal;
    std::vector<std::string> warnings;
    std::string input_digest;
    std::optional<RunManifest> manifest;
};

std::string_view tool_version();

/// p(Y = y | X_f = v for f in features) over every positive-probability combination.
std::vector<ConditionalCell> class_conditionals(const Distribution& dist, const std::vector<std::size_t>& features);

/// Profiles for every feature and sensitivity over every pair. Deterministic for
/// fixed inputs regardless of the thread count.
AnalysisReport analyze(const Distribution& dist, const AnalysisOptions& options);

}  // namespace ctxscope

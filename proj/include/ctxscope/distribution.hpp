#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxscope/rational.hpp"

namespace ctxscope {

using ValueIndex = std::uint32_t;

/// Set of feature indices, stored as a bitmask of width m (at most 64 features).
class ContextSubset {
public:
    constexpr ContextSubset() = default;
    constexpr explicit ContextSubset(std::uint64_t bits) : bits_(bits) {}

    static constexpr ContextSubset all(std::size_t m) {
        return ContextSubset(m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1);
    }
    static constexpr ContextSubset all_except(std::size_t m, std::size_t i) { return all(m).without(i); }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
    constexpr ContextSubset with(std::size_t i) const { return ContextSubset(bits_ | (std::uint64_t{1} << i)); }
    constexpr ContextSubset without(std::size_t i) const { return ContextSubset(bits_ & ~(std::uint64_t{1} << i)); }
    constexpr bool is_subset_of(ContextSubset other) const { return (bits_ & ~other.bits_) == 0; }

    std::vector<std::size_t> members() const;

    constexpr bool operator==(const ContextSubset&) const = default;

    /// Canonical order: cardinality first, then bitmask.
    constexpr std::strong_ordering operator<=>(const ContextSubset& other) const {
        if (auto c = size() <=> other.size(); c != 0) {
            return c;
        }
        return bits_ <=> other.bits_;
    }

private:
    std::uint64_t bits_ = 0;
};

/// Names and finite domains of m features plus the class.
///
/// Full feature assignments are packed into a 64-bit key: each feature owns a
/// bit field wide enough for its domain, feature 0 in the most significant
/// position. Masking a key to a subset of fields therefore preserves the
/// lexicographic order of the remaining assignment.
class FeatureSpace {
public:
    static FeatureSpace build(std::vector<std::string> names, std::vector<std::vector<std::string>> domains,
                              std::vector<std::string> class_values, std::string class_name = "Y");

    std::size_t feature_count() const { return names_.size(); }
    const std::string& feature_name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& feature_names() const { return names_; }
    const std::vector<std::string>& domain(std::size_t i) const { return domains_.at(i); }
    std::size_t domain_size(std::size_t i) const { return domains_.at(i).size(); }
    const std::string& class_name() const { return class_name_; }
    const std::vector<std::string>& class_domain() const { return class_values_; }
    std::size_t class_count() const { return class_values_.size(); }

    std::optional<std::size_t> find_feature(std::string_view name) const;
    std::size_t feature_index(std::string_view name) const;
    ValueIndex value_index(std::size_t feature, std::string_view value) const;
    ValueIndex class_index(std::string_view value) const;

    std::uint64_t field_mask(std::size_t i) const { return masks_.at(i); }
    std::uint64_t subset_mask(ContextSubset subset) const;
    std::uint64_t pack(std::span<const ValueIndex> values) const;
    ValueIndex unpack(std::uint64_t key, std::size_t i) const {
        return static_cast<ValueIndex>((key & masks_[i]) >> shifts_[i]);
    }
    std::uint64_t place(std::size_t i, ValueIndex value) const {
        return static_cast<std::uint64_t>(value) << shifts_[i];
    }

    bool operator==(const FeatureSpace& other) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> domains_;
    std::string class_name_;
    std::vector<std::string> class_values_;
    std::vector<unsigned> shifts_;
    std::vector<std::uint64_t> masks_;
};

struct Binding {
    std::size_t feature;
    ValueIndex value;
    bool operator==(const Binding&) const = default;
};

/// Partial assignment of feature values, optionally with a class value.
class Assignment {
public:
    Assignment() = default;

    Assignment& bind(std::size_t feature, ValueIndex value);
    Assignment& bind_class(ValueIndex y);

    std::span<const Binding> bindings() const { return bindings_; }
    std::optional<ValueIndex> class_value() const { return class_value_; }
    std::optional<ValueIndex> value_of(std::size_t feature) const;
    ContextSubset subset() const;

    /// Parses "X1=1,X2=0" (feature names) against a space; "Y=1" binds the class.
    static Assignment parse(const FeatureSpace& space, std::string_view text);
    std::string describe(const FeatureSpace& space) const;

    bool operator==(const Assignment&) const = default;

private:
    std::vector<Binding> bindings_;  // sorted by feature index
    std::optional<ValueIndex> class_value_;
};

/// One support cell of a joint table: packed feature key, class, integer weight.
struct Cell {
    std::uint64_t key;
    ValueIndex y;
    std::uint64_t weight;
};

/// Joint table over features x class held as integer weights over a common total.
/// The probability of a cell is exactly weight / total. Only cells with positive
/// weight are stored, sorted by (key, class).
class Distribution {
public:
    enum class Source { Exact, Counts };

    const FeatureSpace& space() const { return space_; }
    std::span<const Cell> cells() const { return cells_; }
    std::uint64_t total() const { return total_; }
    Source source() const { return source_; }
    bool is_counts() const { return source_ == Source::Counts; }

    /// Sum of weights of cells consistent with the assignment.
    std::uint64_t weight_of(const Assignment& event) const;

protected:
    Distribution(FeatureSpace space, std::vector<Cell> cells, std::uint64_t total, Source source);

private:
    FeatureSpace space_;
    std::vector<Cell> cells_;
    std::uint64_t total_;
    Source source_;
};

struct ProbabilityRow {
    std::vector<ValueIndex> values;
    ValueIndex y;
    Rational p;
};

class ExactDistribution : public Distribution {
public:
    /// Weights must be consistent with the space; the result is reduced by the gcd.
    static ExactDistribution from_weights(FeatureSpace space, std::vector<Cell> cells);

    Rational probability(std::uint64_t key, ValueIndex y) const;

private:
    using Distribution::Distribution;
};

/// Largest common denominator accepted when converting rationals to integer weights.
inline constexpr std::uint64_t kMaxDenominator = std::uint64_t{1} << 62;

class Dataset {
public:
    explicit Dataset(FeatureSpace space) : space_(std::move(space)) {}

    void add(std::span<const ValueIndex> values, ValueIndex y);
    void add_named(std::span<const std::string> values, std::string_view y);

    const FeatureSpace& space() const { return space_; }
    std::size_t size() const { return classes_.size(); }
    bool empty() const { return classes_.empty(); }
    std::span<const ValueIndex> values(std::size_t row) const {
        return std::span<const ValueIndex>(values_).subspan(row * space_.feature_count(), space_.feature_count());
    }
    ValueIndex class_of(std::size_t row) const { return classes_[row]; }

    bool operator==(const Dataset&) const = default;

private:
    FeatureSpace space_;
    std::vector<ValueIndex> values_;
    std::vector<ValueIndex> classes_;
};

class EmpiricalDistribution : public Distribution {
public:
    /// `cells` hold instance counts (plus pseudo-counts when smoothed); total is their sum.
    EmpiricalDistribution(FeatureSpace space, std::vector<Cell> cells, std::uint64_t n, bool smoothed);

    /// Number of observed instances (excludes pseudo-counts).
    std::uint64_t n() const { return n_; }
    bool smoothed() const { return smoothed_; }

private:
    std::uint64_t n_;
    bool smoothed_;
};

FeatureSpace build_space(std::vector<std::string> names, std::vector<std::vector<std::string>> domains,
                         std::vector<std::string> class_values, std::string class_name = "Y");

/// Validates rows and converts them to an exact table. Rows must sum to exactly 1.
ExactDistribution exact_from_rows(const FeatureSpace& space, std::span<const ProbabilityRow> rows);

Rational event_probability(const Distribution& dist, const Assignment& event);

/// p(Y = y | cond). Throws ErrorKind::UndefinedConditional when p(cond) = 0.
Rational conditional_class(const Distribution& dist, ValueIndex y, const Assignment& cond);

/// Raw frequencies by default; `laplace` adds one pseudo-count to every cell of the product space.
EmpiricalDistribution empirical_from_dataset(const Dataset& data, bool laplace = false);

/// Draws n i.i.d. instances. Deterministic for a given seed on every platform.
Dataset sample(const Distribution& dist, std::size_t n, std::uint64_t seed);

/// Projects onto the listed features (in the given order), summing the others out.
ExactDistribution marginalize(const ExactDistribution& dist, std::span<const std::size_t> keep);

/// Relabels features so that new feature k is old feature order[k].
ExactDistribution permute_features(const ExactDistribution& dist, std::span<const std::size_t> order);

}  // namespace ctxscope

#include "ctxscope/distribution.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "ctxscope/error.hpp"

namespace ctxscope {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

void check_unique(const std::vector<std::string>& values, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& v : values) {
        if (!seen.insert(v).second) {
            fail(ErrorKind::Input, "duplicate " + what + " '" + v + "'");
        }
    }
}

// Odometer over the full product of feature domains; false after the last assignment.
bool next_assignment(const FeatureSpace& space, std::vector<ValueIndex>& values) {
    for (std::size_t i = values.size(); i-- > 0;) {
        if (++values[i] < space.domain_size(i)) {
            return true;
        }
        values[i] = 0;
    }
    return false;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (b > kMaxDenominator || a > kMaxDenominator - b) {
        fail(ErrorKind::Input, "table weights exceed the supported total of 2^62");
    }
    return a + b;
}

}  // namespace

std::vector<std::size_t> ContextSubset::members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// FeatureSpace

FeatureSpace FeatureSpace::build(std::vector<std::string> names, std::vector<std::vector<std::string>> domains,
                                 std::vector<std::string> class_values, std::string class_name) {
    if (names.empty()) {
        fail(ErrorKind::Input, "a feature space needs at least one feature");
    }
    if (names.size() != domains.size()) {
        fail(ErrorKind::Input, "got " + std::to_string(names.size()) + " feature names but " +
                                   std::to_string(domains.size()) + " domains");
    }
    if (names.size() > 64) {
        fail(ErrorKind::Input, "at most 64 features are supported");
    }
    for (const auto& n : names) {
        if (n.empty()) {
            fail(ErrorKind::Input, "feature names must be non-empty");
        }
    }
    check_unique(names, "feature name");
    if (std::find(names.begin(), names.end(), class_name) != names.end()) {
        fail(ErrorKind::Input, "class column '" + class_name + "' collides with a feature name");
    }
    for (std::size_t i = 0; i < domains.size(); ++i) {
        if (domains[i].size() < 2) {
            fail(ErrorKind::Input, "feature '" + names[i] + "' has " + std::to_string(domains[i].size()) +
                                       " value(s); every domain needs at least 2");
        }
        check_unique(domains[i], "value of feature '" + names[i] + "'");
    }
    if (class_values.size() < 2) {
        fail(ErrorKind::Input, "the class domain needs at least 2 values");
    }
    check_unique(class_values, "class value");

    FeatureSpace space;
    space.shifts_.resize(names.size());
    space.masks_.resize(names.size());
    unsigned total_bits = 0;
    std::vector<unsigned> widths(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        widths[i] = static_cast<unsigned>(std::bit_width(domains[i].size() - 1));
        total_bits += widths[i];
    }
    if (total_bits > 64) {
        fail(ErrorKind::Input, "feature domains need " + std::to_string(total_bits) +
                                   " key bits; at most 64 are supported");
    }
    unsigned shift = total_bits;
    for (std::size_t i = 0; i < names.size(); ++i) {
        shift -= widths[i];
        space.shifts_[i] = shift;
        space.masks_[i] = ((widths[i] == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << widths[i]) - 1)) << shift;
    }
    space.names_ = std::move(names);
    space.domains_ = std::move(domains);
    space.class_values_ = std::move(class_values);
    space.class_name_ = std::move(class_name);
    return space;
}

FeatureSpace build_space(std::vector<std::string> names, std::vector<std::vector<std::string>> domains,
                         std::vector<std::string> class_values, std::string class_name) {
    return FeatureSpace::build(std::move(names), std::move(domains), std::move(class_values),
                               std::move(class_name));
}

std::optional<std::size_t> FeatureSpace::find_feature(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t FeatureSpace::feature_index(std::string_view name) const {
    if (auto i = find_feature(name)) {
        return *i;
    }
    fail(ErrorKind::Input, "unknown feature '" + std::string(name) + "'");
}

ValueIndex FeatureSpace::value_index(std::size_t feature, std::string_view value) const {
    const auto& dom = domains_.at(feature);
    for (std::size_t v = 0; v < dom.size(); ++v) {
        if (dom[v] == value) {
            return static_cast<ValueIndex>(v);
        }
    }
    fail(ErrorKind::Input,
         "value '" + std::string(value) + "' is outside the domain of feature '" + names_[feature] + "'");
}

ValueIndex FeatureSpace::class_index(std::string_view value) const {
    for (std::size_t v = 0; v < class_values_.size(); ++v) {
        if (class_values_[v] == value) {
            return static_cast<ValueIndex>(v);
        }
    }
    fail(ErrorKind::Input, "value '" + std::string(value) + "' is outside the class domain");
}

std::uint64_t FeatureSpace::subset_mask(ContextSubset subset) const {
    std::uint64_t mask = 0;
    for (std::uint64_t rest = subset.bits(); rest != 0; rest &= rest - 1) {
        mask |= masks_.at(static_cast<std::size_t>(std::countr_zero(rest)));
    }
    return mask;
}

std::uint64_t FeatureSpace::pack(std::span<const ValueIndex> values) const {
    if (values.size() != names_.size()) {
        fail(ErrorKind::Input, "expected " + std::to_string(names_.size()) + " feature values, got " +
                                   std::to_string(values.size()));
    }
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= domains_[i].size()) {
            fail(ErrorKind::Input, "value index " + std::to_string(values[i]) + " is outside the domain of '" +
                                       names_[i] + "'");
        }
        key |= place(i, values[i]);
    }
    return key;
}

bool FeatureSpace::operator==(const FeatureSpace& other) const {
    return names_ == other.names_ && domains_ == other.domains_ && class_name_ == other.class_name_ &&
           class_values_ == other.class_values_;
}

// ---------------------------------------------------------------------------
// Assignment

Assignment& Assignment::bind(std::size_t feature, ValueIndex value) {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), feature,
                               [](const Binding& b, std::size_t f) { return b.feature < f; });
    if (it != bindings_.end() && it->feature == feature) {
        it->value = value;
    } else {
        bindings_.insert(it, Binding{feature, value});
    }
    return *this;
}

Assignment& Assignment::bind_class(ValueIndex y) {
    class_value_ = y;
    return *this;
}

std::optional<ValueIndex> Assignment::value_of(std::size_t feature) const {
    for (const auto& b : bindings_) {
        if (b.feature == feature) {
            return b.value;
        }
    }
    return std::nullopt;
}

ContextSubset Assignment::subset() const {
    ContextSubset s;
    for (const auto& b : bindings_) {
        s = s.with(b.feature);
    }
    return s;
}

Assignment Assignment::parse(const FeatureSpace& space, std::string_view text) {
    Assignment a;
    text = trim(text);
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorKind::Input, "expected name=value, got '" + std::string(item) + "'");
        }
        const std::string_view name = trim(item.substr(0, eq));
        const std::string_view value = trim(item.substr(eq + 1));
        if (name == space.class_name()) {
            a.bind_class(space.class_index(value));
        } else {
            const std::size_t f = space.feature_index(name);
            a.bind(f, space.value_index(f, value));
        }
    }
    return a;
}

std::string Assignment::describe(const FeatureSpace& space) const {
    std::string out;
    for (const auto& b : bindings_) {
        if (!out.empty()) {
            out += ", ";
        }
        out += space.feature_name(b.feature) + "=" + space.domain(b.feature).at(b.value);
    }
    if (class_value_) {
        if (!out.empty()) {
            out += ", ";
        }
        out += space.class_name() + "=" + space.class_domain().at(*class_value_);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(FeatureSpace space, std::vector<Cell> cells, std::uint64_t total, Source source)
    : space_(std::move(space)), total_(total), source_(source) {
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return a.key != b.key ? a.key < b.key : a.y < b.y; });
    std::uint64_t sum = 0;
    for (const Cell& c : cells) {
        if (c.y >= space_.class_count()) {
            fail(ErrorKind::Input, "class index outside the class domain");
        }
        if (c.weight == 0) {
            continue;
        }
        sum = checked_add(sum, c.weight);
        if (!cells_.empty() && cells_.back().key == c.key && cells_.back().y == c.y) {
            cells_.back().weight += c.weight;
        } else {
            cells_.push_back(c);
        }
    }
    if (total_ == 0 || sum != total_) {
        fail(ErrorKind::Invariant, "table weights sum to " + std::to_string(sum) + " but the total is " +
                                       std::to_string(total_));
    }
}

std::uint64_t Distribution::weight_of(const Assignment& event) const {
    std::uint64_t mask = 0;
    std::uint64_t target = 0;
    for (const auto& b : event.bindings()) {
        if (b.feature >= space_.feature_count() || b.value >= space_.domain_size(b.feature)) {
            fail(ErrorKind::Usage, "assignment does not fit the feature space");
        }
        mask |= space_.field_mask(b.feature);
        target |= space_.place(b.feature, b.value);
    }
    const auto y = event.class_value();
    std::uint64_t sum = 0;
    for (const Cell& c : cells_) {
        if ((c.key & mask) == target && (!y || c.y == *y)) {
            sum += c.weight;
        }
    }
    return sum;
}

ExactDistribution ExactDistribution::from_weights(FeatureSpace space, std::vector<Cell> cells) {
    std::uint64_t total = 0;
    std::uint64_t g = 0;
    for (const Cell& c : cells) {
        total = checked_add(total, c.weight);
        g = std::gcd(g, c.weight);
    }
    if (total == 0) {
        fail(ErrorKind::Input, "distribution has no probability mass");
    }
    for (Cell& c : cells) {
        c.weight /= g;
    }
    return ExactDistribution(std::move(space), std::move(cells), total / g, Source::Exact);
}

Rational ExactDistribution::probability(std::uint64_t key, ValueIndex y) const {
    const auto all = cells();
    auto it = std::lower_bound(all.begin(), all.end(), std::pair{key, y}, [](const Cell& c, const auto& k) {
        return c.key != k.first ? c.key < k.first : c.y < k.second;
    });
    if (it == all.end() || it->key != key || it->y != y) {
        return Rational(0);
    }
    return Rational(it->weight, total());
}

EmpiricalDistribution::EmpiricalDistribution(FeatureSpace space, std::vector<Cell> cells, std::uint64_t n,
                                             bool smoothed)
    : Distribution(std::move(space), cells,
                   std::accumulate(cells.begin(), cells.end(), std::uint64_t{0},
                                   [](std::uint64_t s, const Cell& c) { return s + c.weight; }),
                   Source::Counts),
      n_(n),
      smoothed_(smoothed) {}

// ---------------------------------------------------------------------------
// Construction and queries

ExactDistribution exact_from_rows(const FeatureSpace& space, std::span<const ProbabilityRow> rows) {
    std::map<std::pair<std::uint64_t, ValueIndex>, Rational> table;
    Rational sum = 0;
    for (const auto& row : rows) {
        const std::uint64_t key = space.pack(row.values);
        if (row.y >= space.class_count()) {
            fail(ErrorKind::Input, "class index outside the class domain");
        }
        if (row.p < 0) {
            fail(ErrorKind::Input, "negative probability " + to_fraction_string(row.p));
        }
        if (!table.emplace(std::pair{key, row.y}, row.p).second) {
            Assignment a;
            for (std::size_t i = 0; i < row.values.size(); ++i) {
                a.bind(i, row.values[i]);
            }
            a.bind_class(row.y);
            fail(ErrorKind::Input, "duplicate row for " + a.describe(space));
        }
        sum += row.p;
    }
    if (sum != 1) {
        fail(ErrorKind::Input, "probabilities sum to " + to_literal(sum) + ", expected exactly 1");
    }

    BigInt lcd = 1;
    for (const auto& [cell, p] : table) {
        lcd = boost::multiprecision::lcm(lcd, denominator(p));
        if (lcd > kMaxDenominator) {
            fail(ErrorKind::Input, "common denominator of the probabilities exceeds 2^62");
        }
    }
    std::vector<Cell> cells;
    cells.reserve(table.size());
    for (const auto& [cell, p] : table) {
        const BigInt w = numerator(p) * (lcd / denominator(p));
        cells.push_back(Cell{cell.first, cell.second, w.convert_to<std::uint64_t>()});
    }
    return ExactDistribution::from_weights(space, std::move(cells));
}

Rational event_probability(const Distribution& dist, const Assignment& event) {
    return Rational(dist.weight_of(event), dist.total());
}

Rational conditional_class(const Distribution& dist, ValueIndex y, const Assignment& cond) {
    if (cond.class_value()) {
        fail(ErrorKind::Usage, "the conditioning event must not bind the class");
    }
    if (y >= dist.space().class_count()) {
        fail(ErrorKind::Usage, "class index outside the class domain");
    }
    const std::uint64_t den = dist.weight_of(cond);
    if (den == 0) {
        fail(ErrorKind::UndefinedConditional,
             "conditioning event {" + cond.describe(dist.space()) + "} has probability zero");
    }
    Assignment joint = cond;
    joint.bind_class(y);
    return Rational(dist.weight_of(joint), den);
}

void Dataset::add(std::span<const ValueIndex> values, ValueIndex y) {
    if (values.size() != space_.feature_count()) {
        fail(ErrorKind::Input, "instance has " + std::to_string(values.size()) + " values, expected " +
                                   std::to_string(space_.feature_count()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= space_.domain_size(i)) {
            fail(ErrorKind::Input, "instance value outside the domain of '" + space_.feature_name(i) + "'");
        }
    }
    if (y >= space_.class_count()) {
        fail(ErrorKind::Input, "instance class outside the class domain");
    }
    values_.insert(values_.end(), values.begin(), values.end());
    classes_.push_back(y);
}

void Dataset::add_named(std::span<const std::string> values, std::string_view y) {
    if (values.size() != space_.feature_count()) {
        fail(ErrorKind::Input, "instance has " + std::to_string(values.size()) + " values, expected " +
                                   std::to_string(space_.feature_count()));
    }
    std::vector<ValueIndex> idx(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        idx[i] = space_.value_index(i, values[i]);
    }
    add(idx, space_.class_index(y));
}

EmpiricalDistribution empirical_from_dataset(const Dataset& data, bool laplace) {
    if (data.empty()) {
        fail(ErrorKind::Input, "cannot estimate a distribution from an empty dataset");
    }
    const FeatureSpace& space = data.space();
    std::map<std::pair<std::uint64_t, ValueIndex>, std::uint64_t> counts;
    for (std::size_t r = 0; r < data.size(); ++r) {
        ++counts[{space.pack(data.values(r)), data.class_of(r)}];
    }
    if (laplace) {
        std::uint64_t cells = space.class_count();
        for (std::size_t i = 0; i < space.feature_count(); ++i) {
            cells *= space.domain_size(i);
            if (cells > (std::uint64_t{1} << 22)) {
                fail(ErrorKind::Usage, "Laplace smoothing needs the full product space, which exceeds 2^22 cells");
            }
        }
        std::vector<ValueIndex> values(space.feature_count(), 0);
        do {
            const std::uint64_t key = space.pack(values);
            for (ValueIndex y = 0; y < space.class_count(); ++y) {
                ++counts[{key, y}];
            }
        } while (next_assignment(space, values));
    }
    std::vector<Cell> cells;
    cells.reserve(counts.size());
    for (const auto& [cell, n] : counts) {
        cells.push_back(Cell{cell.first, cell.second, n});
    }
    return EmpiricalDistribution(space, std::move(cells), data.size(), laplace);
}

Dataset sample(const Distribution& dist, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        fail(ErrorKind::Usage, "sample size must be at least 1");
    }
    const auto cells = dist.cells();
    std::vector<std::uint64_t> cumulative(cells.size());
    std::uint64_t running = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        running += cells[c].weight;
        cumulative[c] = running;
    }
    const std::uint64_t total = dist.total();
    // Unbiased draw in [0, total) from raw engine output; distributions from <random>
    // are not specified bit-for-bit across standard libraries.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % total;
    std::mt19937_64 engine(seed);
    const FeatureSpace& space = dist.space();
    Dataset out(space);
    std::vector<ValueIndex> values(space.feature_count());
    for (std::size_t r = 0; r < n; ++r) {
        std::uint64_t draw = 0;
        do {
            draw = engine();
        } while (draw >= limit);
        draw %= total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), draw);
        const Cell& cell = cells[static_cast<std::size_t>(it - cumulative.begin())];
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = space.unpack(cell.key, i);
        }
        out.add(values, cell.y);
    }
    return out;
}

ExactDistribution marginalize(const ExactDistribution& dist, std::span<const std::size_t> keep) {
    const FeatureSpace& space = dist.space();
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> domains;
    std::set<std::size_t> seen;
    for (std::size_t f : keep) {
        if (f >= space.feature_count() || !seen.insert(f).second) {
            fail(ErrorKind::Usage, "marginalize: feature list must hold distinct valid indices");
        }
        names.push_back(space.feature_name(f));
        domains.push_back(space.domain(f));
    }
    FeatureSpace projected =
        FeatureSpace::build(std::move(names), std::move(domains), space.class_domain(), space.class_name());
    std::vector<Cell> cells;
    cells.reserve(dist.cells().size());
    std::vector<ValueIndex> values(keep.size());
    for (const Cell& c : dist.cells()) {
        for (std::size_t k = 0; k < keep.size(); ++k) {
            values[k] = space.unpack(c.key, keep[k]);
        }
        cells.push_back(Cell{projected.pack(values), c.y, c.weight});
    }
    return ExactDistribution::from_weights(std::move(projected), std::move(cells));
}

ExactDistribution permute_features(const ExactDistribution& dist, std::span<const std::size_t> order) {
    if (order.size() != dist.space().feature_count()) {
        fail(ErrorKind::Usage, "permutation must list every feature exactly once");
    }
    return marginalize(dist, order);
}

}  // namespace ctxscope

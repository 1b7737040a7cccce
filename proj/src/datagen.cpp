#include "ctxscope/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "ctxscope/error.hpp"

namespace ctxscope {

namespace {

const std::vector<std::string> kBinary{"0", "1"};

// Offsets from the uniform 25/400 cell, indexed [y][x1][x2].
constexpr int kTable2Offsets[2][2][2] = {{{-13, 7}, {3, 3}}, {{3, 3}, {-13, 7}}};

struct LocalCell {
    std::vector<ValueIndex> values;
    ValueIndex y;
    std::uint64_t weight;
};

struct RawComponent {
    std::vector<std::size_t> features;  // raw feature ids, local order
    bool class_bearing = false;
    std::vector<LocalCell> cells;
    std::uint64_t total = 0;
};

struct RawFeature {
    std::size_t component;
    std::size_t origin;  // the feature this one copies, or itself
    Label label;
    Relevance relevance;
};

struct Builder {
    std::vector<RawComponent> components;
    std::vector<RawFeature> features;
    std::set<std::pair<std::size_t, std::size_t>> planted_edges;  // between origins, smaller first

    std::size_t add_component(bool class_bearing, std::vector<LocalCell> cells, std::uint64_t total,
                              const std::vector<std::pair<Label, Relevance>>& truth) {
        const std::size_t c = components.size();
        RawComponent comp;
        comp.class_bearing = class_bearing;
        comp.cells = std::move(cells);
        comp.total = total;
        for (const auto& [label, relevance] : truth) {
            comp.features.push_back(features.size());
            features.push_back(RawFeature{c, features.size(), label, relevance});
        }
        components.push_back(std::move(comp));
        return features.size() - truth.size();
    }
};

std::pair<BigInt, BigInt> split(const Rational& r) { return {numerator(r), denominator(r)}; }

std::uint64_t to_u64(const BigInt& v) {
    if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) {
        fail(ErrorKind::Usage, "block parameter too large");
    }
    return static_cast<std::uint64_t>(v);
}

void add_table2(Builder& b, const Rational& contrast) {
    if (contrast < 0 || contrast > Rational(25, 13)) {
        fail(ErrorKind::Usage, "table2 contrast must lie in [0, 25/13]");
    }
    const auto [p, q] = split(contrast);
    std::vector<LocalCell> cells;
    for (ValueIndex y = 0; y < 2; ++y) {
        for (ValueIndex x1 = 0; x1 < 2; ++x1) {
            for (ValueIndex x2 = 0; x2 < 2; ++x2) {
                const std::uint64_t w = to_u64(25 * q + p * kTable2Offsets[y][x1][x2]);
                for (ValueIndex x3 = 0; x3 < 2; ++x3) {
                    cells.push_back({{x1, x2, x3}, y, w});
                }
            }
        }
    }
    const bool live = contrast != 0;
    const std::size_t first = b.add_component(
        true, std::move(cells), to_u64(400 * q),
        {{live ? Label::Primary : Label::Irrelevant, live ? Relevance::StronglyRelevant : Relevance::Irrelevant},
         {live ? Label::Contextual : Label::Irrelevant, live ? Relevance::StronglyRelevant : Relevance::Irrelevant},
         {Label::Irrelevant, Relevance::Irrelevant}});
    if (live) {
        b.planted_edges.emplace(first, first + 1);
    }
}

void add_xor(Builder& b, const Rational& noise) {
    if (noise < 0 || noise > 1) {
        fail(ErrorKind::Usage, "xor noise must lie in [0, 1]");
    }
    const auto [p, q] = split(noise);
    std::vector<LocalCell> cells;
    for (ValueIndex y = 0; y < 2; ++y) {
        for (ValueIndex a = 0; a < 2; ++a) {
            for (ValueIndex c = 0; c < 2; ++c) {
                const BigInt w = (y == (a ^ c)) ? q - p : p;
                cells.push_back({{a, c}, y, to_u64(w)});
            }
        }
    }
    const bool live = noise != Rational(1, 2);
    const auto truth = live ? std::pair{Label::Contextual, Relevance::StronglyRelevant}
                            : std::pair{Label::Irrelevant, Relevance::Irrelevant};
    const std::size_t first = b.add_component(true, std::move(cells), to_u64(4 * q), {truth, truth});
    if (live) {
        b.planted_edges.emplace(first, first + 1);
    }
}

void add_irrelevant(Builder& b, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
        b.add_component(false, {{{0}, 0, 1}, {{1}, 0, 1}}, 2, {{Label::Irrelevant, Relevance::Irrelevant}});
    }
}

void add_duplicate(Builder& b, const DuplicateBlock& block) {
    if (block.source >= b.features.size()) {
        fail(ErrorKind::Usage, "dup source " + std::to_string(block.source) + " refers to a feature not yet generated");
    }
    if (block.copies < 1) {
        fail(ErrorKind::Usage, "dup needs at least one copy");
    }
    const RawFeature source = b.features[block.source];
    RawComponent& comp = b.components[source.component];
    const auto pos = static_cast<std::size_t>(
        std::find(comp.features.begin(), comp.features.end(), block.source) - comp.features.begin());
    for (std::size_t k = 0; k < block.copies; ++k) {
        for (LocalCell& cell : comp.cells) {
            cell.values.push_back(cell.values[pos]);
        }
        comp.features.push_back(b.features.size());
        b.features.push_back(RawFeature{source.component, source.origin, source.label, source.relevance});
    }
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t draw = 0;
    do {
        draw = engine();
    } while (draw >= limit);
    return draw % n;
}

std::size_t parse_count(std::string_view text, std::string_view item) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        fail(ErrorKind::Usage, "bad count in block '" + std::string(item) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

ExactDistribution table2() {
    const FeatureSpace space = build_space({"X1", "X2", "X3"}, {kBinary, kBinary, kBinary}, kBinary);
    std::vector<ProbabilityRow> rows;
    for (ValueIndex y = 0; y < 2; ++y) {
        for (ValueIndex x1 = 0; x1 < 2; ++x1) {
            for (ValueIndex x2 = 0; x2 < 2; ++x2) {
                for (ValueIndex x3 = 0; x3 < 2; ++x3) {
                    rows.push_back({{x1, x2, x3}, y, Rational(25 + kTable2Offsets[y][x1][x2], 400)});
                }
            }
        }
    }
    return exact_from_rows(space, rows);
}

ExactDistribution duplicate_feature(const ExactDistribution& dist, std::size_t i) {
    const FeatureSpace& space = dist.space();
    const std::size_t m = space.feature_count();
    if (i >= m) {
        fail(ErrorKind::Usage, "feature index " + std::to_string(i) + " is out of range");
    }
    std::vector<std::string> names = space.feature_names();
    std::string name = "X" + std::to_string(m + 1);
    if (space.find_feature(name) || name == space.class_name()) {
        name = space.feature_name(i) + "_copy";
        while (space.find_feature(name) || name == space.class_name()) {
            name += "_";
        }
    }
    names.push_back(name);
    std::vector<std::vector<std::string>> domains;
    for (std::size_t f = 0; f < m; ++f) {
        domains.push_back(space.domain(f));
    }
    domains.push_back(space.domain(i));
    FeatureSpace wider = FeatureSpace::build(std::move(names), std::move(domains), space.class_domain(),
                                             space.class_name());
    std::vector<Cell> cells;
    cells.reserve(dist.cells().size());
    std::vector<ValueIndex> values(m + 1);
    for (const Cell& c : dist.cells()) {
        for (std::size_t f = 0; f < m; ++f) {
            values[f] = space.unpack(c.key, f);
        }
        values[m] = values[i];
        cells.push_back(Cell{wider.pack(values), c.y, c.weight});
    }
    return ExactDistribution::from_weights(std::move(wider), std::move(cells));
}

PlantedSpec parse_planted_spec(std::string_view text) {
    PlantedSpec spec;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string_view item = trim(text.substr(start, comma - start));
        start = comma + 1;
        if (item.empty()) {
            fail(ErrorKind::Usage, "empty block in planted spec");
        }
        const std::size_t at = item.find('@');
        const std::string_view head = item.substr(0, at);
        std::string_view param_text;
        if (at != std::string_view::npos) {
            param_text = item.substr(at + 1);
            if (param_text.empty()) {
                fail(ErrorKind::Usage, "missing parameter after '@' in '" + std::string(item) + "'");
            }
        }
        const std::size_t colon = head.find(':');
        const std::string_view kind = head.substr(0, colon);
        std::string_view count_text;
        if (colon != std::string_view::npos) {
            count_text = head.substr(colon + 1);
            if (count_text.empty()) {
                fail(ErrorKind::Usage, "missing count after ':' in '" + std::string(item) + "'");
            }
        }
        const std::size_t count = count_text.empty() ? 1 : parse_count(count_text, item);
        if (kind == "table2") {
            const Rational contrast = param_text.empty() ? Rational(1) : parse_rational(param_text);
            spec.blocks.insert(spec.blocks.end(), count, Table2Block{contrast});
        } else if (kind == "xor") {
            const Rational noise = param_text.empty() ? Rational(0) : parse_rational(param_text);
            spec.blocks.insert(spec.blocks.end(), count, XorBlock{noise});
        } else if (kind == "irrelevant") {
            if (!param_text.empty()) {
                fail(ErrorKind::Usage, "irrelevant takes no parameter");
            }
            spec.blocks.emplace_back(IrrelevantBlock{count});
        } else if (kind == "dup") {
            if (count_text.empty()) {
                fail(ErrorKind::Usage, "dup needs a source feature index");
            }
            const std::size_t copies = param_text.empty() ? 1 : parse_count(param_text, item);
            spec.blocks.emplace_back(DuplicateBlock{count, copies});
        } else {
            fail(ErrorKind::Usage, "unknown block kind '" + std::string(kind) + "'");
        }
        if (comma == text.size()) {
            break;
        }
    }
    if (spec.blocks.empty()) {
        fail(ErrorKind::Usage, "planted spec has no blocks");
    }
    return spec;
}

PlantedDistribution planted(const PlantedSpec& spec, std::uint64_t seed) {
    Builder b;
    for (const PlantedBlock& block : spec.blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, Table2Block>) {
                    add_table2(b, blk.contrast);
                } else if constexpr (std::is_same_v<T, XorBlock>) {
                    add_xor(b, blk.noise);
                } else if constexpr (std::is_same_v<T, DuplicateBlock>) {
                    add_duplicate(b, blk);
                } else {
                    add_irrelevant(b, blk.count);
                }
            },
            block);
        if (b.features.size() > kMaxPlantedFeatures) {
            fail(ErrorKind::Usage, "planted spec exceeds " + std::to_string(kMaxPlantedFeatures) + " features");
        }
    }
    const std::size_t m = b.features.size();
    if (m == 0) {
        fail(ErrorKind::Usage, "planted spec generates no features");
    }

    // position[raw] = final index
    std::vector<std::size_t> order(m);
    for (std::size_t k = 0; k < m; ++k) {
        order[k] = k;
    }
    if (spec.shuffle) {
        std::mt19937_64 engine(seed);
        for (std::size_t k = m - 1; k > 0; --k) {
            std::swap(order[k], order[uniform_below(engine, k + 1)]);
        }
    }
    std::vector<std::size_t> position(m);
    for (std::size_t k = 0; k < m; ++k) {
        position[order[k]] = k;
    }
    std::vector<std::string> names;
    for (std::size_t k = 0; k < m; ++k) {
        names.push_back("X" + std::to_string(k + 1));
    }

    std::vector<std::size_t> bearing;
    BigInt total = 1;
    BigInt support = 1;
    for (std::size_t c = 0; c < b.components.size(); ++c) {
        if (b.components[c].class_bearing) {
            bearing.push_back(c);
        }
        total *= b.components[c].total;
        support *= b.components[c].cells.size();
    }
    std::vector<std::string> class_values = kBinary;
    if (bearing.size() > 1) {
        class_values.clear();
        const std::size_t k = bearing.size();
        for (std::size_t v = 0; v < (std::size_t{1} << k); ++v) {
            std::string s;
            for (std::size_t bit = k; bit-- > 0;) {
                s += std::to_string((v >> bit) & 1U);
                s += bit ? "_" : "";
            }
            class_values.push_back(std::move(s));
        }
    }
    if (bearing.empty()) {
        total *= 2;
        support *= 2;
    }
    if (total > kMaxDenominator) {
        fail(ErrorKind::Usage, "planted distribution denominator exceeds 2^62");
    }
    if (support > kMaxPlantedCells) {
        fail(ErrorKind::Usage, "planted distribution would have more than " + std::to_string(kMaxPlantedCells) +
                                   " support cells");
    }

    std::vector<std::vector<std::string>> domains(m, kBinary);
    FeatureSpace space = build_space(names, domains, class_values);

    // Odometer over one cell per component (plus the free class when no block carries one).
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(support));
    std::vector<std::size_t> pick(b.components.size(), 0);
    std::vector<ValueIndex> values(m);
    const ValueIndex free_classes = bearing.empty() ? 2 : 1;
    for (bool more = true; more;) {
        std::uint64_t weight = 1;
        ValueIndex y = 0;
        for (std::size_t c = 0; c < b.components.size(); ++c) {
            const RawComponent& comp = b.components[c];
            const LocalCell& cell = comp.cells[pick[c]];
            weight *= cell.weight;
            for (std::size_t k = 0; k < comp.features.size(); ++k) {
                values[position[comp.features[k]]] = cell.values[k];
            }
            if (comp.class_bearing) {
                y = static_cast<ValueIndex>(y * 2 + cell.y);
            }
        }
        for (ValueIndex free = 0; free < free_classes; ++free) {
            cells.push_back(Cell{space.pack(values), static_cast<ValueIndex>(y + free), weight});
        }
        more = false;
        for (std::size_t c = b.components.size(); c-- > 0;) {
            if (++pick[c] < b.components[c].cells.size()) {
                more = true;
                break;
            }
            pick[c] = 0;
        }
    }

    PlantedDistribution out{ExactDistribution::from_weights(space, std::move(cells)), {}, {}};

    for (const RawComponent& comp : b.components) {
        std::vector<std::string> local_names;
        std::vector<std::size_t> global;
        for (std::size_t raw : comp.features) {
            global.push_back(position[raw]);
            local_names.push_back(names[position[raw]]);
        }
        FeatureSpace local_space =
            build_space(local_names, std::vector<std::vector<std::string>>(global.size(), kBinary), kBinary);
        std::vector<Cell> local_cells;
        for (const LocalCell& cell : comp.cells) {
            if (comp.class_bearing) {
                local_cells.push_back(Cell{local_space.pack(cell.values), cell.y, cell.weight});
            } else {
                for (ValueIndex y = 0; y < 2; ++y) {
                    local_cells.push_back(Cell{local_space.pack(cell.values), y, cell.weight});
                }
            }
        }
        out.components.push_back(PlantedComponent{
            global, comp.class_bearing, ExactDistribution::from_weights(std::move(local_space), std::move(local_cells))});
    }

    // Ground truth from the block rules alone.
    GroundTruth& truth = out.truth;
    truth.names = names;
    truth.labels.resize(m);
    truth.relevance.resize(m);
    std::map<std::size_t, std::size_t> group_size;
    for (const RawFeature& f : b.features) {
        ++group_size[f.origin];
    }
    const auto relevant = [&](std::size_t raw) { return b.features[raw].relevance != Relevance::Irrelevant; };
    for (std::size_t raw = 0; raw < m; ++raw) {
        const RawFeature& f = b.features[raw];
        truth.labels[position[raw]] = f.label;
        truth.relevance[position[raw]] =
            relevant(raw) && group_size[f.origin] > 1 ? Relevance::WeaklyRelevant : f.relevance;
    }
    const auto origin_edge = [&](std::size_t u, std::size_t v) {
        const std::size_t a = b.features[u].origin;
        const std::size_t c = b.features[v].origin;
        if (a == c || !relevant(u) || !relevant(v)) {
            return false;
        }
        const std::size_t ca = b.features[a].component;
        const std::size_t cc = b.features[c].component;
        if (ca != cc) {
            return b.components[ca].class_bearing && b.components[cc].class_bearing;
        }
        return b.planted_edges.count({std::min(a, c), std::max(a, c)}) > 0;
    };
    for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t v = 0; v < m; ++v) {
            const std::size_t i = position[u];
            const std::size_t j = position[v];
            if (i >= j || !origin_edge(u, v)) {
                continue;
            }
            truth.weak_edges.emplace_back(i, j);
        }
    }
    std::sort(truth.weak_edges.begin(), truth.weak_edges.end());
    for (const auto& [i, j] : truth.weak_edges) {
        if (truth.labels[i] == Label::Primary && truth.labels[j] == Label::Contextual) {
            truth.strong_edges.emplace_back(i, j);
        }
        if (truth.labels[j] == Label::Primary && truth.labels[i] == Label::Contextual) {
            truth.strong_edges.emplace_back(j, i);
        }
    }
    std::sort(truth.strong_edges.begin(), truth.strong_edges.end());
    return out;
}

std::string ground_truth_json(const GroundTruth& truth) {
    nlohmann::ordered_json doc;
    doc["schema"] = "ctxscope-ground-truth";
    doc["version"] = 1;
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < truth.names.size(); ++k) {
        features.push_back({{"name", truth.names[k]},
                            {"label", std::string(to_string(truth.labels[k]))},
                            {"relevance", std::string(to_string(truth.relevance[k]))}});
    }
    doc["features"] = std::move(features);
    nlohmann::ordered_json weak = nlohmann::ordered_json::array();
    for (const auto& [i, j] : truth.weak_edges) {
        weak.push_back({truth.names[i], truth.names[j]});
    }
    doc["weak_edges"] = std::move(weak);
    nlohmann::ordered_json strong = nlohmann::ordered_json::array();
    for (const auto& [i, j] : truth.strong_edges) {
        strong.push_back({{"primary", truth.names[i]}, {"contextual", truth.names[j]}});
    }
    doc["strong_edges"] = std::move(strong);
    return doc.dump(2) + "\n";
}

}  // namespace ctxscope

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ctxscope/context.hpp"
#include "ctxscope/distribution.hpp"
#include "ctxscope/relevance.hpp"

namespace ctxscope {

/// The 16-row reference table over boolean X1, X2, X3 and Y.
ExactDistribution table2();

/// Appends a perfect copy of feature i as a new last feature.
ExactDistribution duplicate_feature(const ExactDistribution& dist, std::size_t i);

/// Three features (primary, contextual, irrelevant) and a binary class. Each cell
/// is (25 + contrast * d) / 400 with d in {-13, 3, 7}; contrast 1 reproduces
/// table2(). Valid range [0, 25/13]; 0 makes the class independent of all three.
struct Table2Block {
    Rational contrast = 1;
};

/// Two uniform features; the class is their XOR, flipped with probability noise.
struct XorBlock {
    Rational noise = 0;
};

/// `copies` perfect copies of an earlier feature (0-based, in generation order).
struct DuplicateBlock {
    std::size_t source = 0;
    std::size_t copies = 1;
};

/// `count` uniform features independent of each other and of the class.
struct IrrelevantBlock {
    std::size_t count = 1;
};

using PlantedBlock = std::variant<Table2Block, XorBlock, DuplicateBlock, IrrelevantBlock>;

struct PlantedSpec {
    std::vector<PlantedBlock> blocks;
    bool shuffle = false;  // permute feature order with the seed
};

/// Comma-separated items: table2[:count[@contrast]], xor[:count[@noise]],
/// irrelevant[:count], dup:source[@copies].
PlantedSpec parse_planted_spec(std::string_view text);

inline constexpr std::size_t kMaxPlantedFeatures = 24;
inline constexpr std::size_t kMaxPlantedCells = std::size_t{1} << 20;

struct GroundTruth {
    std::vector<std::string> names;
    std::vector<Label> labels;
    std::vector<Relevance> relevance;
    std::vector<std::pair<std::size_t, std::size_t>> weak_edges;    // i < j
    std::vector<std::pair<std::size_t, std::size_t>> strong_edges;  // primary -> contextual
};

/// Features that are jointly dependent with each other; the product of all
/// components (with the class formed from the class-bearing ones) is the full table.
struct PlantedComponent {
    std::vector<std::size_t> features;  // global indices, in local order
    bool class_bearing = false;
    ExactDistribution local;
};

struct PlantedDistribution {
    ExactDistribution distribution;
    GroundTruth truth;
    std::vector<PlantedComponent> components;
};

/// Independent product of the blocks. The class is the tuple of the class
/// values of the class-bearing blocks, joined with '_' (a single block keeps its
/// own values); without any, an independent uniform binary class is added.
PlantedDistribution planted(const PlantedSpec& spec, std::uint64_t seed);

std::string ground_truth_json(const GroundTruth& truth);

}  // namespace ctxscope

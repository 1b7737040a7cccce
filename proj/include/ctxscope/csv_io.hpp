#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ctxscope/distribution.hpp"

namespace ctxscope {

// Distribution CSV: header `feat1,...,featm,class,p`, one row per cell; `p` takes
// decimal (0.03) or fraction (3/100) literals. Dataset CSV: header
// `feat1,...,featm,class`, one instance per row. Blank lines and lines starting
// with '#' are ignored. Domains are inferred from the values present and ordered
// numerically when every value is a number, lexicographically otherwise.

ExactDistribution read_distribution_csv(std::istream& in);
ExactDistribution load_distribution_csv(const std::filesystem::path& path);
void write_distribution_csv(std::ostream& out, const ExactDistribution& dist);
void save_distribution_csv(const std::filesystem::path& path, const ExactDistribution& dist);

Dataset read_dataset_csv(std::istream& in);
/// Reads against a declared space; values outside its domains are rejected.
Dataset read_dataset_csv(std::istream& in, const FeatureSpace& space);
Dataset load_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);
void save_dataset_csv(const std::filesystem::path& path, const Dataset& data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// "sha256:<hex>" of the given bytes.
std::string content_digest(std::string_view bytes);

/// Digest of the canonical CSV serialization, independent of how the table was loaded.
std::string distribution_digest(const ExactDistribution& dist);
std::string dataset_digest(const Dataset& data);

}  // namespace ctxscope

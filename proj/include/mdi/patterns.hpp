#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdi/dataset.hpp"

namespace mdi {

// Pairwise association: Cramer's V for categorical pairs, Pearson r for
// continuous pairs, absent for mixed pairs.
struct AssociationMatrix {
    std::size_t size = 0;
    std::vector<std::optional<double>> values;  // size x size, row-major
    std::vector<bool> degenerate;               // constant on pairwise-complete cells

    const std::optional<double>& at(std::size_t a, std::size_t b) const { return values[a * size + b]; }
    bool is_degenerate(std::size_t a, std::size_t b) const { return degenerate[a * size + b]; }
};

AssociationMatrix feature_association(const Dataset& ds);

// Cramer's V of two category code vectors, ignoring pairs where either side
// is negative. Returns nullopt when either side is constant.
std::optional<double> cramers_v(const std::vector<int>& a, const std::vector<int>& b);
std::optional<double> pearson_r(const std::vector<double>& a, const std::vector<double>& b);

struct PatternReport {
    std::vector<std::string> feature_names;
    std::size_t rows = 0;
    std::vector<double> feature_missing_fraction;
    // Share of all missing cells that fall in each feature.
    std::vector<double> missing_cell_share;
    // histogram[c] = number of rows with exactly c missing cells, c = 0..K.
    std::vector<std::size_t> row_missing_histogram;
    double rows_with_missing_fraction = 0.0;
    double cell_missing_fraction = 0.0;
    // Fraction of rows missing in both features; diagonal = feature fraction.
    std::vector<std::vector<double>> co_missing;
    AssociationMatrix association;

    double co_missing_between(const std::string& a, const std::string& b) const;
    std::size_t feature_index(const std::string& name) const;
};

PatternReport missing_pattern_summary(const Dataset& ds);

nlohmann::json to_json(const PatternReport& report);

}  // namespace mdi

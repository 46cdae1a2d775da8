#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mdi {

enum class FeatureKind { categorical, continuous };

const char* to_string(FeatureKind kind);

struct FeatureSchema {
    std::string name;
    FeatureKind kind = FeatureKind::categorical;
    // Category tokens in first-seen order; never contains the missing symbol.
    std::vector<std::string> categories;
    // Whether the feature had any missing cell in the dataset it was learned
    // from (the full dataset, before splitting).
    bool has_missing = false;

    bool is_categorical() const { return kind == FeatureKind::categorical; }
    std::optional<int> category_index(const std::string& token) const;
    bool operator==(const FeatureSchema&) const = default;
};

using Schema = std::vector<FeatureSchema>;

// Throws InvalidArgument if names or category tokens are duplicated, or a
// continuous feature lists categories.
void validate_schema(const Schema& schema);

// n x K binary matrix, 1 = missing.
class MissingMask {
public:
    MissingMask() = default;
    MissingMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * cols_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool missing) { bits_[i * cols_ + j] = missing ? 1 : 0; }

    std::size_t count() const;
    std::size_t count_row(std::size_t i) const;
    std::size_t count_col(std::size_t j) const;
    double fraction() const;

    void append_row(const std::vector<std::uint8_t>& row);
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    bool operator==(const MissingMask&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Mixed-type n x K table with a label per row. Categorical cells hold an
// index into the feature's category list, continuous cells a real value.
// The mask is maintained by every mutator, so `mask()(i, j)` is always
// equivalent to `is_missing(i, j)`.
class Dataset {
public:
    Dataset() = default;
    Dataset(Schema schema, std::vector<std::string> classes);

    std::size_t rows() const { return labels_.size(); }
    std::size_t features() const { return schema_.size(); }
    const Schema& schema() const { return schema_; }
    const FeatureSchema& feature(std::size_t j) const { return schema_[j]; }
    const std::vector<std::string>& classes() const { return classes_; }
    std::size_t n_classes() const { return classes_.size(); }
    const MissingMask& mask() const { return mask_; }
    const std::vector<int>& labels() const { return labels_; }
    int label(std::size_t i) const { return labels_[i]; }
    // Index of each row in the dataset it was originally loaded from.
    const std::vector<std::size_t>& origin() const { return origin_; }
    std::size_t origin(std::size_t i) const { return origin_[i]; }

    bool is_missing(std::size_t i, std::size_t j) const { return mask_(i, j); }
    int category(std::size_t i, std::size_t j) const { return static_cast<int>(cells_[i * features() + j]); }
    double value(std::size_t i, std::size_t j) const { return cells_[i * features() + j]; }
    // Raw cell: category index or real value; NaN when missing.
    double cell(std::size_t i, std::size_t j) const { return cells_[i * features() + j]; }

    // Appends a row of raw cells (NaN = missing) and returns its index.
    std::size_t append_row(const std::vector<double>& cells, int label, std::size_t origin);
    void set_missing(std::size_t i, std::size_t j);
    void set_category(std::size_t i, std::size_t j, int code);
    void set_value(std::size_t i, std::size_t j, double v);
    void set_cell(std::size_t i, std::size_t j, double raw);

    std::vector<double> row(std::size_t i) const;
    bool row_complete(std::size_t i) const;

    // Row subset in the given order, preserving schema and provenance.
    Dataset select_rows(const std::vector<std::size_t>& rows) const;
    Dataset drop_feature(std::size_t j) const;
    Dataset with_schema(Schema schema) const;

    std::vector<std::size_t> categorical_features() const;
    std::vector<std::size_t> continuous_features() const;

    // Throws Error if any invariant does not hold.
    void validate() const;

    // Same schema, classes, labels, provenance, mask and observed cell values.
    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    Schema schema_;
    std::vector<std::string> classes_;
    std::vector<double> cells_;
    MissingMask mask_;
    std::vector<int> labels_;
    std::vector<std::size_t> origin_;
};

inline constexpr double kMissingCell = std::numeric_limits<double>::quiet_NaN();

// floor(x + 0.5); split sizes and perturbation counts use this convention.
inline std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

struct SplitResult {
    Dataset train;
    Dataset test;
};

// Uniform random partition; |train| = round_half_up(train_fraction * n).
// With `stratified`, the same rule is applied within each class.
SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed, bool stratified = false);

// Rows without any missing cell, in order; throws EmptyDataError if none.
Dataset complete_cases(const Dataset& ds);

}  // namespace mdi

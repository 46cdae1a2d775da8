#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mdi/dataset.hpp"

namespace mdi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Standard deviations below this are treated as zero: the column is encoded
// as constant 0.
inline constexpr double kDegenerateStd = 1e-12;

struct FeatureEncoding {
    std::size_t feature = 0;
    FeatureKind kind = FeatureKind::categorical;
    std::size_t first_column = 0;
    // categorical
    std::size_t n_categories = 0;
    bool missing_column = false;  // placed after the category columns
    // continuous
    double mean = 0.0;
    double stdev = 1.0;
    bool degenerate = false;
    bool indicator = false;  // placed right after the value column

    std::size_t width() const {
        return kind == FeatureKind::categorical ? n_categories + (missing_column ? 1 : 0) : 1 + (indicator ? 1 : 0);
    }
};

struct EncoderModel {
    Schema schema;
    std::vector<FeatureEncoding> features;
    std::size_t width = 0;
    std::vector<std::string> notes;
};

enum class ColumnRole { category, missing_category, value, missing_indicator };

const char* to_string(ColumnRole role);

struct ColumnProvenance {
    std::size_t column = 0;
    std::size_t feature = 0;
    std::string feature_name;
    ColumnRole role = ColumnRole::category;
    std::string category;  // category token for `category` columns
};

struct EncodedMatrix {
    Matrix x;  // n x D
    std::vector<int> labels;
    std::size_t n_classes = 0;
    std::vector<ColumnProvenance> provenance;

    std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }
};

// Means and standard deviations (n-1 denominator) come from the OBSERVED
// continuous cells of `train`. A categorical feature gets a MISSING column when
// `full_schema` marks it as ever missing or `train` itself has missing cells
// in it; a continuous feature gets an indicator column under the same rule.
EncoderModel fit_encoder(const Dataset& train, const Schema& full_schema);
EncoderModel fit_encoder(const Dataset& train);

EncodedMatrix encode(const Dataset& ds, const EncoderModel& model);

std::vector<ColumnProvenance> decode_column_provenance(const EncoderModel& model);

nlohmann::json to_json(const std::vector<ColumnProvenance>& provenance);

// Headerless numeric CSV, one row per example; labels are not included.
void write_matrix_csv(std::ostream& out, const EncodedMatrix& m);

}  // namespace mdi

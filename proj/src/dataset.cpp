#include "mdi/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mdi/error.hpp"
#include "mdi/random.hpp"

namespace mdi {

const char* to_string(FeatureKind kind) {
    return kind == FeatureKind::categorical ? "categorical" : "continuous";
}

std::optional<int> FeatureSchema::category_index(const std::string& token) const {
    auto it = std::find(categories.begin(), categories.end(), token);
    if (it == categories.end()) return std::nullopt;
    return static_cast<int>(it - categories.begin());
}

void validate_schema(const Schema& schema) {
    std::set<std::string> names;
    for (const auto& f : schema) {
        if (!names.insert(f.name).second) throw InvalidArgument("duplicate feature name: " + f.name);
        if (f.kind == FeatureKind::continuous && !f.categories.empty())
            throw InvalidArgument("continuous feature lists categories: " + f.name);
        std::set<std::string> tokens(f.categories.begin(), f.categories.end());
        if (tokens.size() != f.categories.size())
            throw InvalidArgument("duplicate category token in feature " + f.name);
    }
}

std::size_t MissingMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t MissingMask::count_row(std::size_t i) const {
    const auto first = bits_.begin() + static_cast<std::ptrdiff_t>(i * cols_);
    return static_cast<std::size_t>(std::count(first, first + static_cast<std::ptrdiff_t>(cols_), std::uint8_t{1}));
}

std::size_t MissingMask::count_col(std::size_t j) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < rows_; ++i) c += bits_[i * cols_ + j];
    return c;
}

double MissingMask::fraction() const {
    if (bits_.empty()) return 0.0;
    return static_cast<double>(count()) / static_cast<double>(bits_.size());
}

void MissingMask::append_row(const std::vector<std::uint8_t>& row) {
    if (row.size() != cols_) throw InvalidArgument("mask row width mismatch");
    bits_.insert(bits_.end(), row.begin(), row.end());
    ++rows_;
}

Dataset::Dataset(Schema schema, std::vector<std::string> classes)
    : schema_(std::move(schema)), classes_(std::move(classes)), mask_(0, schema_.size()) {
    validate_schema(schema_);
}

std::size_t Dataset::append_row(const std::vector<double>& cells, int label, std::size_t origin) {
    if (cells.size() != features()) throw InvalidArgument("row width does not match schema");
    if (label < 0 || static_cast<std::size_t>(label) >= classes_.size())
        throw InvalidArgument("label index out of range");
    std::vector<std::uint8_t> bits(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
        bits[j] = std::isnan(cells[j]) ? 1 : 0;
        if (!bits[j] && schema_[j].is_categorical()) {
            const double c = cells[j];
            if (c < 0 || c >= static_cast<double>(schema_[j].categories.size()) || c != std::floor(c))
                throw InvalidArgument("category code out of range in feature " + schema_[j].name);
        }
    }
    cells_.insert(cells_.end(), cells.begin(), cells.end());
    mask_.append_row(bits);
    labels_.push_back(label);
    origin_.push_back(origin);
    return labels_.size() - 1;
}

void Dataset::set_missing(std::size_t i, std::size_t j) {
    cells_[i * features() + j] = kMissingCell;
    mask_.set(i, j, true);
}

void Dataset::set_category(std::size_t i, std::size_t j, int code) {
    if (!schema_[j].is_categorical()) throw InvalidArgument("set_category on continuous feature " + schema_[j].name);
    if (code < 0 || static_cast<std::size_t>(code) >= schema_[j].categories.size())
        throw InvalidArgument("category code out of range in feature " + schema_[j].name);
    cells_[i * features() + j] = code;
    mask_.set(i, j, false);
}

void Dataset::set_value(std::size_t i, std::size_t j, double v) {
    if (schema_[j].is_categorical()) throw InvalidArgument("set_value on categorical feature " + schema_[j].name);
    if (std::isnan(v)) throw InvalidArgument("NaN is not an observed value");
    cells_[i * features() + j] = v;
    mask_.set(i, j, false);
}

void Dataset::set_cell(std::size_t i, std::size_t j, double raw) {
    if (std::isnan(raw))
        set_missing(i, j);
    else if (schema_[j].is_categorical())
        set_category(i, j, static_cast<int>(raw));
    else
        set_value(i, j, raw);
}

std::vector<double> Dataset::row(std::size_t i) const {
    const auto first = cells_.begin() + static_cast<std::ptrdiff_t>(i * features());
    return {first, first + static_cast<std::ptrdiff_t>(features())};
}

bool Dataset::row_complete(std::size_t i) const { return mask_.count_row(i) == 0; }

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out(schema_, classes_);
    out.cells_.reserve(rows.size() * features());
    for (auto r : rows) out.append_row(row(r), labels_[r], origin_[r]);
    return out;
}

Dataset Dataset::drop_feature(std::size_t j) const {
    Schema s = schema_;
    s.erase(s.begin() + static_cast<std::ptrdiff_t>(j));
    Dataset out(std::move(s), classes_);
    for (std::size_t i = 0; i < rows(); ++i) {
        auto r = row(i);
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(j));
        out.append_row(r, labels_[i], origin_[i]);
    }
    return out;
}

Dataset Dataset::with_schema(Schema schema) const {
    if (schema.size() != schema_.size()) throw InvalidArgument("schema width mismatch");
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (schema[j].kind != schema_[j].kind || schema[j].categories.size() < schema_[j].categories.size())
            throw InvalidArgument("incompatible schema for feature " + schema[j].name);
    }
    Dataset out = *this;
    out.schema_ = std::move(schema);
    validate_schema(out.schema_);
    return out;
}

std::vector<std::size_t> Dataset::categorical_features() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < features(); ++j)
        if (schema_[j].is_categorical()) out.push_back(j);
    return out;
}

std::vector<std::size_t> Dataset::continuous_features() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < features(); ++j)
        if (!schema_[j].is_categorical()) out.push_back(j);
    return out;
}

void Dataset::validate() const {
    validate_schema(schema_);
    if (mask_.rows() != rows() || mask_.cols() != features()) throw Error("mask shape mismatch");
    if (origin_.size() != rows()) throw Error("provenance length mismatch");
    for (std::size_t i = 0; i < rows(); ++i) {
        if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= classes_.size()) throw Error("label out of range");
        for (std::size_t j = 0; j < features(); ++j) {
            const double c = cell(i, j);
            if (std::isnan(c) != mask_(i, j)) throw Error("mask inconsistent with values");
            if (!std::isnan(c) && schema_[j].is_categorical() &&
                (c < 0 || c >= static_cast<double>(schema_[j].categories.size())))
                throw Error("category code out of range");
        }
    }
}

bool operator==(const Dataset& a, const Dataset& b) {
    if (a.schema_ != b.schema_ || a.classes_ != b.classes_ || a.labels_ != b.labels_ || a.origin_ != b.origin_ ||
        a.mask_ != b.mask_)
        return false;
    for (std::size_t k = 0; k < a.cells_.size(); ++k) {
        if (a.mask_.bits()[k]) continue;
        if (a.cells_[k] != b.cells_[k]) return false;
    }
    return true;
}

SplitResult split(const Dataset& ds, double train_fraction, std::uint64_t seed, bool stratified) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train_fraction must be in (0, 1)");
    Rng rng = make_rng(seed);
    std::vector<std::size_t> train_rows;

    auto take = [&](std::vector<std::size_t> pool) {
        shuffle_range(pool.begin(), pool.end(), rng);
        const auto n_train = std::min(pool.size(), round_half_up(train_fraction * static_cast<double>(pool.size())));
        train_rows.insert(train_rows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
    };

    if (stratified) {
        for (std::size_t c = 0; c < ds.n_classes(); ++c) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < ds.rows(); ++i)
                if (ds.label(i) == static_cast<int>(c)) pool.push_back(i);
            take(std::move(pool));
        }
    } else {
        std::vector<std::size_t> pool(ds.rows());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        take(std::move(pool));
    }

    std::sort(train_rows.begin(), train_rows.end());
    std::vector<std::size_t> test_rows;
    test_rows.reserve(ds.rows() - train_rows.size());
    std::size_t t = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (t < train_rows.size() && train_rows[t] == i)
            ++t;
        else
            test_rows.push_back(i);
    }
    if (train_rows.empty() || test_rows.empty()) throw EmptyDataError("split leaves an empty partition");
    return {ds.select_rows(train_rows), ds.select_rows(test_rows)};
}

Dataset complete_cases(const Dataset& ds) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.row_complete(i)) keep.push_back(i);
    if (keep.empty()) throw EmptyDataError("no complete cases");
    return ds.select_rows(keep);
}

}  // namespace mdi

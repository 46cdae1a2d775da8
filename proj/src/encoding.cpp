#include "mdi/encoding.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "mdi/error.hpp"

namespace mdi {

const char* to_string(ColumnRole role) {
    switch (role) {
        case ColumnRole::category: return "category";
        case ColumnRole::missing_category: return "missing";
        case ColumnRole::value: return "value";
        case ColumnRole::missing_indicator: return "indicator";
    }
    return "unknown";
}

EncoderModel fit_encoder(const Dataset& train, const Schema& full_schema) {
    if (train.rows() == 0) throw EmptyDataError("cannot fit an encoder on an empty dataset");
    if (full_schema.size() != train.features()) throw InvalidArgument("full schema width does not match dataset");
    EncoderModel m;
    m.schema = train.schema();
    std::size_t col = 0;
    for (std::size_t j = 0; j < train.features(); ++j) {
        const auto& fs = full_schema[j];
        if (fs.kind != train.feature(j).kind) throw InvalidArgument("schema kind mismatch for " + fs.name);
        FeatureEncoding e;
        e.feature = j;
        e.kind = fs.kind;
        e.first_column = col;
        const bool ever_missing = fs.has_missing || train.mask().count_col(j) > 0;
        if (fs.is_categorical()) {
            e.n_categories = std::max(fs.categories.size(), train.feature(j).categories.size());
            e.missing_column = ever_missing;
            m.schema[j].categories =
                fs.categories.size() >= train.feature(j).categories.size() ? fs.categories : train.feature(j).categories;
        } else {
            double sum = 0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < train.rows(); ++i)
                if (!train.is_missing(i, j)) {
                    sum += train.value(i, j);
                    ++n;
                }
            if (n == 0) throw EmptyDataError("continuous feature " + fs.name + " has no observed training cells");
            e.mean = sum / static_cast<double>(n);
            double ss = 0;
            for (std::size_t i = 0; i < train.rows(); ++i)
                if (!train.is_missing(i, j)) {
                    const double d = train.value(i, j) - e.mean;
                    ss += d * d;
                }
            e.stdev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            if (e.stdev < kDegenerateStd) {
                e.degenerate = true;
                m.notes.push_back("feature " + fs.name + " is constant on training data; encoded as 0");
            }
            e.indicator = ever_missing;
        }
        m.schema[j].has_missing = fs.has_missing;
        col += e.width();
        m.features.push_back(e);
    }
    m.width = col;
    return m;
}

EncoderModel fit_encoder(const Dataset& train) { return fit_encoder(train, train.schema()); }

EncodedMatrix encode(const Dataset& ds, const EncoderModel& model) {
    if (ds.features() != model.features.size()) throw InvalidArgument("dataset does not conform to encoder schema");
    EncodedMatrix out;
    const auto n = ds.rows();
    out.x = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(model.width));
    out.labels = ds.labels();
    out.n_classes = ds.n_classes();
    out.provenance = decode_column_provenance(model);
    for (const auto& e : model.features) {
        const auto j = e.feature;
        const auto& fs = ds.feature(j);
        if (fs.kind != e.kind) throw InvalidArgument("feature kind mismatch for " + fs.name);
        if (e.kind == FeatureKind::categorical) {
            if (fs.categories.size() > e.n_categories)
                throw InvalidArgument("feature " + fs.name + " has categories unknown to the encoder");
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t c;
                if (ds.is_missing(i, j)) {
                    if (!e.missing_column)
                        throw InvalidArgument("missing cell in feature " + fs.name + " but encoder has no MISSING column");
                    c = e.first_column + e.n_categories;
                } else {
                    c = e.first_column + static_cast<std::size_t>(ds.category(i, j));
                }
                out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = 1.0;
            }
        } else {
            const auto vc = static_cast<Eigen::Index>(e.first_column);
            for (std::size_t i = 0; i < n; ++i) {
                const auto r = static_cast<Eigen::Index>(i);
                if (ds.is_missing(i, j)) {
                    if (!e.indicator)
                        throw InvalidArgument("missing cell in feature " + fs.name + " but encoder has no indicator");
                    out.x(r, vc + 1) = 1.0;
                } else if (!e.degenerate) {
                    out.x(r, vc) = (ds.value(i, j) - e.mean) / e.stdev;
                }
            }
        }
    }
    return out;
}

std::vector<ColumnProvenance> decode_column_provenance(const EncoderModel& model) {
    std::vector<ColumnProvenance> out;
    out.reserve(model.width);
    for (const auto& e : model.features) {
        const auto& fs = model.schema[e.feature];
        auto push = [&](ColumnRole role, std::string category) {
            out.push_back({out.size(), e.feature, fs.name, role, std::move(category)});
        };
        if (e.kind == FeatureKind::categorical) {
            for (std::size_t c = 0; c < e.n_categories; ++c) push(ColumnRole::category, fs.categories[c]);
            if (e.missing_column) push(ColumnRole::missing_category, "");
        } else {
            push(ColumnRole::value, "");
            if (e.indicator) push(ColumnRole::missing_indicator, "");
        }
    }
    return out;
}

nlohmann::json to_json(const std::vector<ColumnProvenance>& provenance) {
    auto arr = nlohmann::json::array();
    for (const auto& p : provenance) {
        nlohmann::json j = {{"column", p.column}, {"feature", p.feature}, {"name", p.feature_name}, {"role", to_string(p.role)}};
        if (p.role == ColumnRole::category) j["category"] = p.category;
        arr.push_back(std::move(j));
    }
    return arr;
}

void write_matrix_csv(std::ostream& out, const EncodedMatrix& m) {
    char buf[64];
    for (Eigen::Index i = 0; i < m.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.x.cols(); ++j) {
            if (j) out << ',';
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m.x(i, j));
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

}  // namespace mdi

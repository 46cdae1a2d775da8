#include "mdi/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mdi/error.hpp"

namespace mdi {

std::optional<double> cramers_v(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw InvalidArgument("cramers_v: length mismatch");
    std::map<int, std::size_t> ra, rb;
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || b[i] < 0) continue;
        pairs.emplace_back(a[i], b[i]);
        ra.emplace(a[i], 0);
        rb.emplace(b[i], 0);
    }
    if (ra.size() < 2 || rb.size() < 2) return std::nullopt;
    std::size_t idx = 0;
    for (auto& [k, v] : ra) v = idx++;
    idx = 0;
    for (auto& [k, v] : rb) v = idx++;
    const auto r = ra.size(), c = rb.size();
    std::vector<double> table(r * c, 0.0), row(r, 0.0), col(c, 0.0);
    for (auto [x, y] : pairs) {
        const auto i = ra[x], j = rb[y];
        table[i * c + j] += 1;
        row[i] += 1;
        col[j] += 1;
    }
    const double n = static_cast<double>(pairs.size());
    double chi2 = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double e = row[i] * col[j] / n;
            const double d = table[i * c + j] - e;
            chi2 += d * d / e;
        }
    const double v = std::sqrt(chi2 / (n * static_cast<double>(std::min(r, c) - 1)));
    return std::min(v, 1.0);
}

std::optional<double> pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InvalidArgument("pearson_r: length mismatch");
    double sa = 0, sb = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isnan(a[i]) || std::isnan(b[i])) continue;
        sa += a[i];
        sb += b[i];
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double ma = sa / static_cast<double>(n), mb = sb / static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isnan(a[i]) || std::isnan(b[i])) continue;
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0 || sbb <= 0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

AssociationMatrix feature_association(const Dataset& ds) {
    const auto k = ds.features();
    if (k < 2) throw InvalidArgument("feature_association needs at least two features");
    std::vector<std::vector<int>> codes(k);
    std::vector<std::vector<double>> values(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (ds.feature(j).is_categorical()) {
            codes[j].resize(ds.rows());
            for (std::size_t i = 0; i < ds.rows(); ++i) codes[j][i] = ds.is_missing(i, j) ? -1 : ds.category(i, j);
        } else {
            values[j].resize(ds.rows());
            for (std::size_t i = 0; i < ds.rows(); ++i) values[j][i] = ds.cell(i, j);
        }
    }
    AssociationMatrix m;
    m.size = k;
    m.values.assign(k * k, std::nullopt);
    m.degenerate.assign(k * k, false);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            const bool ca = ds.feature(a).is_categorical(), cb = ds.feature(b).is_categorical();
            if (ca != cb) continue;
            std::optional<double> v = ca ? cramers_v(codes[a], codes[b]) : pearson_r(values[a], values[b]);
            bool degenerate = !v.has_value();
            if (a == b) v = 1.0;
            else if (!v) v = 0.0;
            m.values[a * k + b] = m.values[b * k + a] = v;
            m.degenerate[a * k + b] = m.degenerate[b * k + a] = degenerate;
        }
    }
    return m;
}

std::size_t PatternReport::feature_index(const std::string& name) const {
    auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw InvalidArgument("unknown feature: " + name);
    return static_cast<std::size_t>(it - feature_names.begin());
}

double PatternReport::co_missing_between(const std::string& a, const std::string& b) const {
    return co_missing[feature_index(a)][feature_index(b)];
}

PatternReport missing_pattern_summary(const Dataset& ds) {
    const auto n = ds.rows(), k = ds.features();
    const auto& mask = ds.mask();
    PatternReport r;
    r.rows = n;
    for (const auto& f : ds.schema()) r.feature_names.push_back(f.name);
    r.row_missing_histogram.assign(k + 1, 0);
    std::vector<std::size_t> col(k, 0);
    std::vector<std::vector<std::size_t>> both(k, std::vector<std::size_t>(k, 0));
    std::vector<std::size_t> missing_js;
    std::size_t rows_with = 0, cells = 0;
    for (std::size_t i = 0; i < n; ++i) {
        missing_js.clear();
        for (std::size_t j = 0; j < k; ++j)
            if (mask(i, j)) missing_js.push_back(j);
        r.row_missing_histogram[missing_js.size()]++;
        if (!missing_js.empty()) ++rows_with;
        cells += missing_js.size();
        for (auto a : missing_js) {
            ++col[a];
            for (auto b : missing_js) ++both[a][b];
        }
    }
    const double dn = n ? static_cast<double>(n) : 1.0;
    r.rows_with_missing_fraction = static_cast<double>(rows_with) / dn;
    r.cell_missing_fraction = n ? static_cast<double>(cells) / static_cast<double>(n * k) : 0.0;
    r.feature_missing_fraction.resize(k);
    r.missing_cell_share.resize(k);
    r.co_missing.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        r.feature_missing_fraction[j] = static_cast<double>(col[j]) / dn;
        r.missing_cell_share[j] = cells ? static_cast<double>(col[j]) / static_cast<double>(cells) : 0.0;
        for (std::size_t b = 0; b < k; ++b) r.co_missing[j][b] = static_cast<double>(both[j][b]) / dn;
    }
    if (k >= 2) r.association = feature_association(ds);
    return r;
}

nlohmann::json to_json(const PatternReport& r) {
    nlohmann::json j;
    j["rows"] = r.rows;
    j["features"] = r.feature_names;
    j["rows_with_missing_fraction"] = r.rows_with_missing_fraction;
    j["cell_missing_fraction"] = r.cell_missing_fraction;
    j["feature_missing_fraction"] = r.feature_missing_fraction;
    j["missing_cell_share"] = r.missing_cell_share;
    j["row_missing_histogram"] = r.row_missing_histogram;
    j["co_missing"] = r.co_missing;
    auto assoc = nlohmann::json::array();
    auto degenerate = nlohmann::json::array();
    for (std::size_t a = 0; a < r.association.size; ++a) {
        auto row = nlohmann::json::array();
        auto drow = nlohmann::json::array();
        for (std::size_t b = 0; b < r.association.size; ++b) {
            const auto& v = r.association.at(a, b);
            row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
            drow.push_back(static_cast<bool>(r.association.is_degenerate(a, b)));
        }
        assoc.push_back(std::move(row));
        degenerate.push_back(std::move(drow));
    }
    j["association"] = std::move(assoc);
    j["association_degenerate"] = std::move(degenerate);
    return j;
}

}  // namespace mdi

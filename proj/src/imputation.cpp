#include "mdi/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mdi/error.hpp"
#include "mdi/random.hpp"

namespace mdi {

const char* to_string(ImputationMethod m) {
    switch (m) {
        case ImputationMethod::mode: return "mode";
        case ImputationMethod::random_replacement: return "random_replacement";
        case ImputationMethod::knn: return "knn";
        case ImputationMethod::model: return "model";
    }
    return "unknown";
}

const char* to_string(PredictorFamily p) {
    switch (p) {
        case PredictorFamily::logistic: return "logistic";
        case PredictorFamily::random_forest: return "random_forest";
        case PredictorFamily::linear_svm: return "linear_svm";
    }
    return "unknown";
}

const char* to_string(DonorFallback f) { return f == DonorFallback::none ? "none" : "per_feature"; }

ImputationMethod parse_imputation_method(const std::string& s) {
    for (auto m : {ImputationMethod::mode, ImputationMethod::random_replacement, ImputationMethod::knn,
                   ImputationMethod::model})
        if (s == to_string(m)) return m;
    throw InvalidArgument("unknown imputation method: " + s);
}

PredictorFamily parse_predictor_family(const std::string& s) {
    for (auto p : {PredictorFamily::logistic, PredictorFamily::random_forest, PredictorFamily::linear_svm})
        if (s == to_string(p)) return p;
    throw InvalidArgument("unknown predictor family: " + s);
}

DonorFallback parse_donor_fallback(const std::string& s) {
    if (s == "none") return DonorFallback::none;
    if (s == "per_feature") return DonorFallback::per_feature;
    throw InvalidArgument("unknown donor fallback: " + s);
}

std::string ImputerParams::label() const {
    if (method == ImputationMethod::model) return std::string("model-") + to_string(predictor);
    return to_string(method);
}

ImputerParams parse_imputer(const std::string& name) {
    ImputerParams p;
    const std::string prefix = "model-";
    if (name.rfind(prefix, 0) == 0) {
        p.method = ImputationMethod::model;
        p.predictor = parse_predictor_family(name.substr(prefix.size()));
    } else {
        p.method = parse_imputation_method(name);
        if (p.method == ImputationMethod::model) p.predictor = PredictorFamily::logistic;
    }
    return p;
}

// ---------------------------------------------------------------------------

KnnIndex::KnnIndex(Dataset donors, std::vector<double> scale) : donors_(std::move(donors)), scale_(std::move(scale)) {
    if (scale_.size() != donors_.features()) throw InvalidArgument("scale width does not match donors");
    for (std::size_t i = 0; i < donors_.rows(); ++i)
        if (!donors_.row_complete(i)) throw InvalidArgument("donor rows must be complete");
}

double KnnIndex::distance(const std::vector<double>& query, std::size_t donor) const {
    double d = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
        if (std::isnan(query[j])) continue;
        const double v = donors_.cell(donor, j);
        if (donors_.feature(j).is_categorical()) {
            d += v != query[j] ? 1.0 : 0.0;
        } else {
            const double z = (v - query[j]) / scale_[j];
            d += z * z;
        }
    }
    return d;
}

std::vector<std::pair<double, std::size_t>> KnnIndex::neighbors(const std::vector<double>& query, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    if (query.size() != donors_.features()) throw InvalidArgument("query width does not match donors");
    k = std::min(k, donors_.rows());
    // Max-heap on (distance, index): the top is the current worst neighbour.
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t i = 0; i < donors_.rows(); ++i) {
        const double d = distance(query, i);
        if (heap.size() < k) {
            heap.emplace(d, i);
        } else if (std::make_pair(d, i) < heap.top()) {
            heap.pop();
            heap.emplace(d, i);
        }
    }
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(heap.size());
    for (; !heap.empty(); heap.pop()) out.push_back(heap.top());
    std::reverse(out.begin(), out.end());
    return out;
}

namespace {

// Mode of the donors' values for a categorical feature; among tied counts the
// value of the earliest (nearest) donor wins.
double donor_mode(const std::vector<double>& values) {
    std::size_t best_count = 0;
    double best = values.front();
    for (std::size_t a = 0; a < values.size(); ++a) {
        const auto c = static_cast<std::size_t>(std::count(values.begin(), values.end(), values[a]));
        if (c > best_count) {
            best_count = c;
            best = values[a];
        }
    }
    return best;
}

double donor_mean(const std::vector<double>& values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double aggregate(const FeatureSchema& fs, const std::vector<double>& values) {
    return fs.is_categorical() ? donor_mode(values) : donor_mean(values);
}

}  // namespace

std::optional<std::vector<double>> KnnIndex::fill(const std::vector<double>& query, std::size_t k) const {
    if (std::all_of(query.begin(), query.end(), [](double v) { return std::isnan(v); })) return std::nullopt;
    const auto nn = neighbors(query, k);
    auto out = query;
    std::vector<double> values(nn.size());
    for (std::size_t j = 0; j < query.size(); ++j) {
        if (!std::isnan(query[j])) continue;
        for (std::size_t a = 0; a < nn.size(); ++a) values[a] = donors_.cell(nn[a].second, j);
        out[j] = aggregate(donors_.feature(j), values);
    }
    return out;
}

// ---------------------------------------------------------------------------

Dataset prefill(const Dataset& ds, const std::vector<double>& fill) {
    if (fill.size() != ds.features()) throw InvalidArgument("fill width does not match dataset");
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.rows(); ++i)
        for (std::size_t j = 0; j < ds.features(); ++j)
            if (ds.is_missing(i, j)) out.set_cell(i, j, fill[j]);
    return out;
}

namespace {

void check_conforms(const Schema& fitted, const Dataset& ds) {
    if (ds.features() != fitted.size()) throw InvalidArgument("dataset width does not match the imputer");
    for (std::size_t j = 0; j < fitted.size(); ++j) {
        const auto& a = fitted[j];
        const auto& b = ds.feature(j);
        if (a.name != b.name || a.kind != b.kind) throw InvalidArgument("dataset schema does not match the imputer at " + b.name);
        if (b.categories.size() > a.categories.size() ||
            !std::equal(b.categories.begin(), b.categories.end(), a.categories.begin()))
            throw InvalidArgument("feature " + b.name + " has categories unknown to the imputer");
    }
}

Schema predictor_schema(Schema s) {
    for (auto& f : s) f.has_missing = false;
    return s;
}

FeaturePredictor fit_predictor(const Dataset& filled, const std::vector<std::size_t>& rows, std::size_t j,
                               const ImputerParams& params, std::uint64_t seed, std::vector<std::string>& notes) {
    FeaturePredictor fp;
    fp.target = j;
    const auto& fs = filled.feature(j);
    const Dataset sub = filled.select_rows(rows);
    const Dataset others = sub.drop_feature(j).with_schema(predictor_schema(filled.drop_feature(j).schema()));
    fp.encoder = fit_encoder(others);

    std::vector<double> target(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) target[r] = sub.cell(r, j);
    const bool constant = std::all_of(target.begin(), target.end(), [&](double v) { return v == target.front(); });
    if (constant) {
        fp.constant = target.front();
        notes.push_back("feature " + fs.name + " is constant on the predictor's training rows; constant fill");
        return fp;
    }

    EncodedMatrix m = encode(others, fp.encoder);
    if (fs.is_categorical()) {
        m.n_classes = fs.categories.size();
        for (std::size_t r = 0; r < rows.size(); ++r) m.labels[r] = static_cast<int>(target[r]);
        ClassifierSpec spec;
        const auto s = substream(seed, j);
        switch (params.predictor) {
            case PredictorFamily::logistic:
                spec.kind = ModelKind::logistic;
                spec.mlp = params.logistic;
                spec.mlp.seed = s;
                break;
            case PredictorFamily::random_forest:
                spec.kind = ModelKind::random_forest;
                spec.forest = params.forest;
                spec.forest.seed = s;
                break;
            case PredictorFamily::linear_svm:
                spec.kind = ModelKind::linear_svm;
                spec.svm = params.svm;
                spec.svm.seed = s;
                break;
        }
        fp.classifier = train(m, spec);
    } else {
        const auto n = m.x.rows();
        Matrix a(n, m.x.cols() + 1);
        a.leftCols(m.x.cols()) = m.x;
        a.col(m.x.cols()).setOnes();
        Vector y = Eigen::Map<const Vector>(target.data(), n);
        fp.coefficients = a.completeOrthogonalDecomposition().solve(y);
    }
    return fp;
}

}  // namespace

ImputerModel fit_imputer(const Dataset& train, const ImputerParams& params, std::uint64_t seed) {
    if (train.rows() == 0) throw EmptyDataError("cannot fit an imputer on an empty dataset");
    if (params.k == 0) throw InvalidArgument("k must be at least 1");
    ImputerModel m;
    m.params_ = params;
    m.seed_ = seed;
    m.schema_ = train.schema();

    const auto K = train.features();
    m.fill_.assign(K, 0.0);
    m.scale_.assign(K, 1.0);
    for (std::size_t j = 0; j < K; ++j) {
        const auto& fs = train.feature(j);
        const auto observed = train.rows() - train.mask().count_col(j);
        if (observed == 0) throw EmptyDataError("feature " + fs.name + " has no observed training cells");
        if (fs.is_categorical()) {
            std::vector<std::size_t> counts(fs.categories.size(), 0);
            for (std::size_t i = 0; i < train.rows(); ++i)
                if (!train.is_missing(i, j)) ++counts[static_cast<std::size_t>(train.category(i, j))];
            m.fill_[j] = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        } else {
            double s = 0, ss = 0;
            for (std::size_t i = 0; i < train.rows(); ++i)
                if (!train.is_missing(i, j)) s += train.value(i, j);
            const double mean = s / static_cast<double>(observed);
            for (std::size_t i = 0; i < train.rows(); ++i)
                if (!train.is_missing(i, j)) ss += (train.value(i, j) - mean) * (train.value(i, j) - mean);
            m.fill_[j] = mean;
            const double sd = observed > 1 ? std::sqrt(ss / static_cast<double>(observed - 1)) : 0.0;
            if (sd >= kDegenerateStd) m.scale_[j] = sd;
        }
    }
    if (params.method == ImputationMethod::mode) return m;

    std::vector<std::size_t> complete;
    for (std::size_t i = 0; i < train.rows(); ++i)
        if (train.row_complete(i)) complete.push_back(i);
    if (complete.empty()) {
        if (params.fallback == DonorFallback::none)
            throw EmptyDataError("no complete training case to serve as donor pool for " + params.label());
        m.fallback_active_ = true;
        m.notes_.push_back("no complete training case; donors drawn per feature from rows observing it");
        m.train_ = train;
        m.observing_.resize(K);
        for (std::size_t j = 0; j < K; ++j)
            for (std::size_t i = 0; i < train.rows(); ++i)
                if (!train.is_missing(i, j)) m.observing_[j].push_back(i);
    } else {
        m.pool_ = train.select_rows(complete);
    }

    if (params.method == ImputationMethod::knn) {
        m.k_ = params.k;
        if (!m.fallback_active_) {
            if (m.k_ > m.pool_.rows()) {
                m.notes_.push_back("k=" + std::to_string(params.k) + " exceeds the donor pool; clamped to " +
                                   std::to_string(m.pool_.rows()));
                m.k_ = m.pool_.rows();
            }
            m.index_ = KnnIndex(m.pool_, m.scale_);
        }
    }

    if (params.method == ImputationMethod::model) {
        const Dataset filled = prefill(train, m.fill_);
        for (std::size_t j = 0; j < K; ++j) {
            if (!train.feature(j).has_missing && train.mask().count_col(j) == 0) continue;
            const auto& rows = m.fallback_active_ ? m.observing_[j] : complete;
            m.predictors_.push_back(fit_predictor(filled, rows, j, params, seed, m.notes_));
        }
    }
    return m;
}

namespace {

// Fallback k-NN: donors are training rows observing the target feature;
// distance uses features observed by both rows, rescaled by the share of the
// query's observed features they cover.
double knn_fallback_fill(const ImputerModel& m, const Dataset& train, const std::vector<std::size_t>& pool,
                         const std::vector<double>& query, std::size_t j, const std::vector<double>& scale,
                         bool& clamped) {
    std::size_t q_obs = 0;
    for (double v : query) q_obs += !std::isnan(v);
    const std::size_t k = m.params().k;
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t a = 0; a < pool.size(); ++a) {
        const auto r = pool[a];
        double d = 0.0;
        std::size_t common = 0;
        for (std::size_t f = 0; f < query.size(); ++f) {
            if (std::isnan(query[f]) || train.is_missing(r, f)) continue;
            ++common;
            const double v = train.cell(r, f);
            if (train.feature(f).is_categorical()) {
                d += v != query[f] ? 1.0 : 0.0;
            } else {
                const double z = (v - query[f]) / scale[f];
                d += z * z;
            }
        }
        if (common == 0) continue;
        d *= static_cast<double>(q_obs) / static_cast<double>(common);
        if (heap.size() < k) {
            heap.emplace(d, a);
        } else if (std::make_pair(d, a) < heap.top()) {
            heap.pop();
            heap.emplace(d, a);
        }
    }
    if (heap.empty()) return m.fill_values()[j];
    if (heap.size() < k) clamped = true;
    std::vector<std::size_t> order;
    for (; !heap.empty(); heap.pop()) order.push_back(heap.top().second);
    std::reverse(order.begin(), order.end());
    std::vector<double> values;
    values.reserve(order.size());
    for (auto a : order) values.push_back(train.cell(pool[a], j));
    return aggregate(train.feature(j), values);
}

}  // namespace

Dataset transform(const ImputerModel& m, const Dataset& ds, ImputationReceipt* receipt) {
    check_conforms(m.schema_, ds);
    ImputationReceipt local;
    auto& rec = receipt ? *receipt : local;
    rec = {};
    rec.notes = m.notes_;
    const auto K = ds.features();
    Dataset out = ds;
    bool fallback_clamped = false;
    std::size_t all_missing_rows = 0;

    std::vector<std::size_t> incomplete;
    for (std::size_t i = 0; i < ds.rows(); ++i)
        if (!ds.row_complete(i)) incomplete.push_back(i);

    switch (m.params_.method) {
        case ImputationMethod::mode:
            out = prefill(ds, m.fill_);
            break;
        case ImputationMethod::random_replacement:
            for (auto i : incomplete) {
                Rng rng = make_rng(substream(m.seed_, i));
                if (!m.fallback_active_) {
                    const auto donor = uniform_index(rng, m.pool_.rows());
                    for (std::size_t j = 0; j < K; ++j)
                        if (ds.is_missing(i, j)) out.set_cell(i, j, m.pool_.cell(donor, j));
                } else {
                    for (std::size_t j = 0; j < K; ++j) {
                        if (!ds.is_missing(i, j)) continue;
                        const auto& pool = m.observing_[j];
                        out.set_cell(i, j, m.train_.cell(pool[uniform_index(rng, pool.size())], j));
                    }
                }
            }
            break;
        case ImputationMethod::knn:
            for (auto i : incomplete) {
                const auto query = ds.row(i);
                if (ds.mask().count_row(i) == K) {
                    ++all_missing_rows;
                    for (std::size_t j = 0; j < K; ++j) out.set_cell(i, j, m.fill_[j]);
                    continue;
                }
                if (!m.fallback_active_) {
                    const auto filled = *m.index_.fill(query, m.k_);
                    for (std::size_t j = 0; j < K; ++j)
                        if (ds.is_missing(i, j)) out.set_cell(i, j, filled[j]);
                } else {
                    for (std::size_t j = 0; j < K; ++j)
                        if (ds.is_missing(i, j))
                            out.set_cell(i, j,
                                         knn_fallback_fill(m, m.train_, m.observing_[j], query, j, m.scale_,
                                                           fallback_clamped));
                }
            }
            break;
        case ImputationMethod::model: {
            const Dataset filled = prefill(ds, m.fill_);
            std::vector<bool> covered(K, false);
            for (const auto& fp : m.predictors_) {
                covered[fp.target] = true;
                std::vector<std::size_t> rows;
                for (std::size_t i = 0; i < ds.rows(); ++i)
                    if (ds.is_missing(i, fp.target)) rows.push_back(i);
                if (rows.empty()) continue;
                if (fp.constant) {
                    for (auto i : rows) out.set_cell(i, fp.target, *fp.constant);
                    continue;
                }
                const Dataset others = filled.select_rows(rows).drop_feature(fp.target).with_schema(fp.encoder.schema);
                const EncodedMatrix x = encode(others, fp.encoder);
                if (fp.classifier) {
                    const auto pred = fp.classifier->predict(x.x);
                    for (std::size_t r = 0; r < rows.size(); ++r) out.set_cell(rows[r], fp.target, pred[r]);
                } else {
                    const Vector y = x.x * fp.coefficients.head(x.x.cols()) +
                                     Vector::Constant(x.x.rows(), fp.coefficients(x.x.cols()));
                    for (std::size_t r = 0; r < rows.size(); ++r) out.set_cell(rows[r], fp.target, y(static_cast<Eigen::Index>(r)));
                }
            }
            // Features with no training missingness have no predictor; any
            // missing cell there takes the training mode or mean.
            for (std::size_t j = 0; j < K; ++j)
                if (!covered[j])
                    for (auto i : incomplete)
                        if (ds.is_missing(i, j)) out.set_cell(i, j, m.fill_[j]);
            break;
        }
    }
    if (fallback_clamped) rec.notes.push_back("fewer than k donors observed some target features; used all available");
    if (all_missing_rows)
        rec.notes.push_back(std::to_string(all_missing_rows) + " rows observed no feature; filled with training modes/means");
    rec.cells_filled = ds.mask().count();
    rec.rows_touched = incomplete.size();
    return out;
}

}  // namespace mdi

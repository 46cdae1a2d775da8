#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdi/dataset.hpp"
#include "mdi/encoding.hpp"
#include "mdi/model.hpp"

namespace mdi {

enum class ImputationMethod { mode, random_replacement, knn, model };
enum class PredictorFamily { logistic, random_forest, linear_svm };

// What donor-based and model imputers do when the training set has no
// complete case. `none` refuses; `per_feature` draws, for each target
// feature, from the training rows that observe it.
enum class DonorFallback { none, per_feature };

const char* to_string(ImputationMethod m);
const char* to_string(PredictorFamily p);
const char* to_string(DonorFallback f);
ImputationMethod parse_imputation_method(const std::string& s);
PredictorFamily parse_predictor_family(const std::string& s);
DonorFallback parse_donor_fallback(const std::string& s);

struct ImputerParams {
    ImputationMethod method = ImputationMethod::mode;
    std::size_t k = 5;
    PredictorFamily predictor = PredictorFamily::logistic;
    DonorFallback fallback = DonorFallback::none;
    // Predictor settings for model imputation; seeds are overwritten per
    // target feature.
    MlpParams logistic = [] {
        MlpParams p;
        p.hidden.clear();
        p.dropout.clear();
        p.epochs = 10;
        return p;
    }();
    ForestParams forest = [] {
        ForestParams p;
        p.n_trees = 50;
        return p;
    }();
    SvmParams svm;

    // "mode", "knn", "model-logistic", ...
    std::string label() const;
};

// Parses a treatment-style name: mode, random_replacement, knn,
// model-logistic, model-random_forest, model-linear_svm.
ImputerParams parse_imputer(const std::string& name);

// Nearest-neighbour search over a fixed set of complete donors. Distance is
// the number of categorical mismatches plus the sum of squared continuous
// differences divided by the per-feature scale, taken over the features the
// query observes.
class KnnIndex {
public:
    KnnIndex() = default;
    KnnIndex(Dataset donors, std::vector<double> scale);

    const Dataset& donors() const { return donors_; }
    double distance(const std::vector<double>& query, std::size_t donor) const;
    // k nearest donors as (distance, donor index), ties by lower index.
    std::vector<std::pair<double, std::size_t>> neighbors(const std::vector<double>& query, std::size_t k) const;
    // Fills the query's NaN cells from its k nearest donors: mode for
    // categorical features (ties go to the nearest donor's value), mean for
    // continuous ones. Returns nullopt when the query observes nothing.
    std::optional<std::vector<double>> fill(const std::vector<double>& query, std::size_t k) const;

private:
    Dataset donors_;
    std::vector<double> scale_;
};

// Per-feature predictor for model imputation.
struct FeaturePredictor {
    std::size_t target = 0;
    EncoderModel encoder;  // over the other features
    std::optional<double> constant;
    std::optional<TrainedModel> classifier;  // categorical targets
    Vector coefficients;                     // continuous targets; last entry is the intercept
};

struct ImputationReceipt {
    std::size_t cells_filled = 0;
    std::size_t rows_touched = 0;
    std::vector<std::string> notes;
};

// Fitted imputer. Holds only training-derived state and is immutable once
// fitted.
class ImputerModel {
public:
    const ImputerParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    const Schema& schema() const { return schema_; }
    // Train mode (category index) or mean per feature.
    const std::vector<double>& fill_values() const { return fill_; }
    // Complete training cases; empty under the per-feature fallback.
    const Dataset& donor_pool() const { return pool_; }
    bool uses_fallback() const { return fallback_active_; }
    std::size_t effective_k() const { return k_; }
    const std::vector<FeaturePredictor>& predictors() const { return predictors_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    friend ImputerModel fit_imputer(const Dataset&, const ImputerParams&, std::uint64_t);
    friend Dataset transform(const ImputerModel&, const Dataset&, ImputationReceipt*);

    ImputerParams params_;
    std::uint64_t seed_ = 0;
    Schema schema_;
    std::vector<double> fill_;
    std::vector<double> scale_;
    Dataset pool_;
    KnnIndex index_;
    bool fallback_active_ = false;
    Dataset train_;                                 // fallback only
    std::vector<std::vector<std::size_t>> observing_;  // fallback only: train rows observing feature j
    std::size_t k_ = 0;
    std::vector<FeaturePredictor> predictors_;
    std::vector<std::string> notes_;
};

// Throws EmptyDataError for an empty training set, a feature with no observed
// training cell, or (with DonorFallback::none) donor-based and model methods
// when no training row is complete.
ImputerModel fit_imputer(const Dataset& train, const ImputerParams& params, std::uint64_t seed);

// Returns a copy of `ds` without missing cells. Observed cells, labels and
// provenance are unchanged. Randomness for row i comes from
// substream(seed, i).
Dataset transform(const ImputerModel& model, const Dataset& ds, ImputationReceipt* receipt = nullptr);

// Replaces every missing cell with the model's training mode or mean.
Dataset prefill(const Dataset& ds, const std::vector<double>& fill);

}  // namespace mdi

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mdi/encoding.hpp"
#include "mdi/linear_svm.hpp"
#include "mdi/mlp.hpp"
#include "mdi/tree.hpp"

namespace mdi {

enum class ModelKind { decision_tree, random_forest, mlp, logistic, linear_svm };

const char* to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

// What to train: the kind plus the parameter block it reads.
struct ClassifierSpec {
    ModelKind kind = ModelKind::decision_tree;
    TreeParams tree;
    ForestParams forest;
    MlpParams mlp;
    SvmParams svm;
};

struct TrainingMetadata {
    double training_error = 0.0;
    int epochs_run = 0;
    std::uint64_t seed = 0;
};

class TrainedModel {
public:
    using Variant = std::variant<DecisionTree, RandomForest, Mlp, LinearSvm>;

    TrainedModel() = default;
    TrainedModel(ModelKind kind, Variant model, std::size_t width, std::size_t n_classes, TrainingMetadata meta)
        : kind_(kind), model_(std::move(model)), width_(width), n_classes_(n_classes), meta_(meta) {}

    ModelKind kind() const { return kind_; }
    const Variant& model() const { return model_; }
    std::size_t width() const { return width_; }
    std::size_t n_classes() const { return n_classes_; }
    const TrainingMetadata& metadata() const { return meta_; }

    std::vector<int> predict(const Matrix& x) const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static TrainedModel load(const std::filesystem::path& path);

private:
    ModelKind kind_ = ModelKind::decision_tree;
    Variant model_;
    std::size_t width_ = 0;
    std::size_t n_classes_ = 0;
    TrainingMetadata meta_;
};

// Trains per spec and records the final training error in the metadata.
TrainedModel train(const EncodedMatrix& data, const ClassifierSpec& spec);

// Throws InvalidArgument when the matrix width differs from the model's.
std::vector<int> predict(const TrainedModel& model, const EncodedMatrix& data);

// (# mismatches) / n
double error_rate(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace mdi

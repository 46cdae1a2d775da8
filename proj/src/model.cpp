#include "mdi/model.hpp"

#include <fstream>

#include "mdi/error.hpp"

namespace mdi {

namespace {
constexpr int kModelFormatVersion = 1;
}

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::decision_tree: return "decision_tree";
        case ModelKind::random_forest: return "random_forest";
        case ModelKind::mlp: return "mlp";
        case ModelKind::logistic: return "logistic";
        case ModelKind::linear_svm: return "linear_svm";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
    for (auto k : {ModelKind::decision_tree, ModelKind::random_forest, ModelKind::mlp, ModelKind::logistic,
                   ModelKind::linear_svm})
        if (s == to_string(k)) return k;
    throw InvalidArgument("unknown classifier kind: " + s);
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != width_)
        throw InvalidArgument("matrix width " + std::to_string(x.cols()) + " does not match model width " +
                              std::to_string(width_));
    return std::visit([&](const auto& m) { return m.predict(x); }, model_);
}

nlohmann::json TrainedModel::to_json() const {
    nlohmann::json j;
    j["format"] = "mdi-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = to_string(kind_);
    j["width"] = width_;
    j["classes"] = n_classes_;
    j["training"] = {{"training_error", meta_.training_error}, {"epochs_run", meta_.epochs_run}, {"seed", meta_.seed}};
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RandomForest>) {
                auto trees = nlohmann::json::array();
                for (const auto& t : m.trees()) trees.push_back(t.to_json());
                j["model"] = {{"trees", std::move(trees)}};
            } else {
                j["model"] = m.to_json();
            }
        },
        model_);
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "mdi-model") throw ParseError("not an mdi model document", 0);
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) throw ParseError("unsupported model version " + std::to_string(version), 0);
        const auto kind = parse_model_kind(j.at("kind").get<std::string>());
        const auto width = j.at("width").get<std::size_t>();
        const auto classes = j.at("classes").get<std::size_t>();
        TrainingMetadata meta;
        meta.training_error = j.at("training").at("training_error").get<double>();
        meta.epochs_run = j.at("training").at("epochs_run").get<int>();
        meta.seed = j.at("training").at("seed").get<std::uint64_t>();
        const auto& jm = j.at("model");
        switch (kind) {
            case ModelKind::decision_tree:
                return {kind, DecisionTree::from_json(jm, width, classes), width, classes, meta};
            case ModelKind::random_forest: {
                std::vector<DecisionTree> trees;
                for (const auto& t : jm.at("trees")) trees.push_back(DecisionTree::from_json(t, width, classes));
                return {kind, RandomForest(std::move(trees), classes), width, classes, meta};
            }
            case ModelKind::mlp:
            case ModelKind::logistic: {
                auto net = Mlp::from_json(jm);
                if (net.inputs() != width || net.classes() != classes) throw ParseError("network shape mismatch", 0);
                return {kind, std::move(net), width, classes, meta};
            }
            case ModelKind::linear_svm: {
                auto svm = LinearSvm::from_json(jm);
                if (svm.inputs() != width || svm.classes() != classes) throw ParseError("SVM shape mismatch", 0);
                return {kind, std::move(svm), width, classes, meta};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what(), 0);
    }
    throw ParseError("unreachable model kind", 0);
}

void TrainedModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json().dump() << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
    return from_json(j);
}

TrainedModel train(const EncodedMatrix& data, const ClassifierSpec& spec) {
    TrainingMetadata meta;
    TrainedModel::Variant model;
    switch (spec.kind) {
        case ModelKind::decision_tree:
            model = train_decision_tree(data, spec.tree);
            break;
        case ModelKind::random_forest:
            model = train_random_forest(data, spec.forest);
            meta.seed = spec.forest.seed;
            break;
        case ModelKind::mlp:
        case ModelKind::logistic: {
            MlpTrainingInfo info;
            model = spec.kind == ModelKind::mlp ? train_mlp(data, spec.mlp, &info) : train_logistic(data, spec.mlp, &info);
            meta.epochs_run = info.epochs_run;
            meta.seed = spec.mlp.seed;
            break;
        }
        case ModelKind::linear_svm:
            model = train_linear_svm(data, spec.svm);
            meta.epochs_run = spec.svm.epochs;
            meta.seed = spec.svm.seed;
            break;
    }
    TrainedModel trained(spec.kind, std::move(model), data.cols(), data.n_classes, meta);
    meta.training_error = error_rate(trained.predict(data.x), data.labels);
    return TrainedModel(spec.kind, trained.model(), data.cols(), data.n_classes, meta);
}

std::vector<int> predict(const TrainedModel& model, const EncodedMatrix& data) { return model.predict(data.x); }

double error_rate(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw InvalidArgument("prediction and truth lengths differ");
    if (truth.empty()) throw EmptyDataError("error rate of an empty prediction set");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

}  // namespace mdi

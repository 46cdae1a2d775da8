#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mdi/encoding.hpp"
#include "mdi/random.hpp"

namespace mdi {

// Gini impurity 1 - sum p_k^2 of a class-count vector; 0 for an empty node.
double gini(const std::vector<std::size_t>& counts);

struct TreeParams {
    std::optional<int> max_depth;  // nullopt = unlimited
    std::size_t min_samples_split = 2;
};

enum class FeatureRule { sqrt, log2, all };

const char* to_string(FeatureRule rule);
FeatureRule parse_feature_rule(const std::string& s);
std::size_t features_per_split(FeatureRule rule, std::size_t width);

struct ForestParams {
    std::size_t n_trees = 100;
    FeatureRule mtry = FeatureRule::sqrt;
    bool bootstrap = true;
    TreeParams tree;
    std::uint64_t seed = 0;
    // Trees are independent given their seed substream; any thread count
    // yields the same forest.
    unsigned threads = 1;
};

// Column-wise rank encoding shared by every tree grown on one matrix: each
// cell is replaced by the index of its value among the column's sorted
// distinct values.
class BinnedMatrix {
public:
    explicit BinnedMatrix(const Matrix& x);
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return values_.size(); }
    std::uint32_t bin(std::size_t row, std::size_t col) const { return bins_[col * rows_ + row]; }
    const std::vector<double>& values(std::size_t col) const { return values_[col]; }

private:
    std::size_t rows_ = 0;
    std::vector<std::vector<double>> values_;
    std::vector<std::uint32_t> bins_;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int prediction = 0;
    std::size_t samples = 0;
    double impurity = 0.0;
};

// CART classifier: binary splits `x[feature] <= threshold` chosen to minimize
// the weighted Gini impurity of the children, thresholds at midpoints of
// adjacent distinct values present in the node.
class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::size_t width, std::size_t n_classes)
        : nodes_(std::move(nodes)), width_(width), n_classes_(n_classes) {}

    int predict_row(const double* row, Eigen::Index stride) const;
    std::vector<int> predict(const Matrix& x) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t width() const { return width_; }
    std::size_t n_classes() const { return n_classes_; }
    int depth() const;

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j, std::size_t width, std::size_t n_classes);

    bool operator==(const DecisionTree& other) const;

private:
    std::vector<TreeNode> nodes_;
    std::size_t width_ = 0;
    std::size_t n_classes_ = 0;
};

// Grows one tree on `samples` (row indices; repeats allowed for bootstrap).
// `features_per_node` >= width evaluates every feature in column order and
// never touches `rng`.
DecisionTree grow_tree(const BinnedMatrix& bins, const std::vector<int>& labels, std::size_t n_classes,
                       std::vector<std::size_t> samples, const TreeParams& params, std::size_t features_per_node,
                       Rng* rng);

DecisionTree train_decision_tree(const EncodedMatrix& data, const TreeParams& params);

class RandomForest {
public:
    RandomForest() = default;
    explicit RandomForest(std::vector<DecisionTree> trees, std::size_t n_classes)
        : trees_(std::move(trees)), n_classes_(n_classes) {}

    // Majority vote of the trees; ties go to the lower class index.
    std::vector<int> predict(const Matrix& x) const;
    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::size_t n_classes() const { return n_classes_; }

private:
    std::vector<DecisionTree> trees_;
    std::size_t n_classes_ = 0;
};

RandomForest train_random_forest(const EncodedMatrix& data, const ForestParams& params);

}  // namespace mdi

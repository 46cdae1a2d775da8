#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mdi/encoding.hpp"

namespace mdi {

struct SvmParams {
    double lambda = 1e-3;  // L2 penalty
    int epochs = 15;
    std::uint64_t seed = 0;
};

// One-vs-rest linear SVM. Each binary problem minimizes
//   lambda/2 |w|^2 + mean_i max(0, 1 - y_i (w.x_i + b))
// by stochastic subgradient steps of size 1/(lambda t) (Pegasos); the bias is
// an extra constant input and shares the penalty. The returned weights are
// the average of the iterates over the second half of training.
class LinearSvm {
public:
    LinearSvm() = default;
    LinearSvm(Matrix weights, Vector bias) : weights_(std::move(weights)), bias_(std::move(bias)) {}

    // classes x D scores
    Matrix decision_function(const Matrix& x) const;
    std::vector<int> predict(const Matrix& x) const;

    const Matrix& weights() const { return weights_; }  // classes x D
    const Vector& bias() const { return bias_; }
    std::size_t inputs() const { return static_cast<std::size_t>(weights_.cols()); }
    std::size_t classes() const { return static_cast<std::size_t>(weights_.rows()); }

    nlohmann::json to_json() const;
    static LinearSvm from_json(const nlohmann::json& j);

    bool operator==(const LinearSvm& other) const;

private:
    Matrix weights_;
    Vector bias_;
};

LinearSvm train_linear_svm(const EncodedMatrix& data, const SvmParams& params);

}  // namespace mdi

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mdi/encoding.hpp"
#include "mdi/random.hpp"

namespace mdi {

// Per-parameter Adadelta accumulators.
struct AdadeltaState {
    double mean_sq_grad = 0.0;
    double mean_sq_step = 0.0;
};

// One Adadelta update for a scalar parameter; returns the step to add:
//   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
//   dx      =  -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g * lr_scale
//   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
double adadelta_step(double grad, AdadeltaState& state, double rho, double eps, double lr_scale = 1.0);

enum class Activation { relu, tanh };

const char* to_string(Activation a);
Activation parse_activation(const std::string& s);

// Momentum coefficient ramps linearly from `start` to `end` over
// `ramp_epochs` epochs, then stays at `end`.
struct MomentumSchedule {
    double start = 0.0;
    double end = 0.0;
    int ramp_epochs = 1;

    double at(int epoch) const;
};

struct MlpParams {
    std::vector<int> hidden = {128, 128};
    Activation activation = Activation::relu;
    // Dropout rate per hidden layer; a single value applies to all layers,
    // empty means none.
    std::vector<double> dropout = {0.5};
    double rho = 0.95;
    double eps = 1e-6;
    double lr_scale = 1.0;
    MomentumSchedule momentum;
    int epochs = 10;
    int batch_size = 128;
    std::uint64_t seed = 0;

    double dropout_for(std::size_t layer) const;
    void validate() const;
};

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
};

// Feed-forward classifier: rectifier (or tanh) hidden layers, softmax output,
// mean cross-entropy loss. With no hidden layers this is multinomial logistic
// regression.
class Mlp {
public:
    Mlp() = default;
    // Glorot-uniform weights, zero biases.
    Mlp(std::size_t inputs, const std::vector<int>& hidden, std::size_t classes, Activation activation, Rng& rng);

    std::size_t inputs() const;
    std::size_t classes() const;
    Activation activation() const { return activation_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    // Class probabilities, one column per example of `xt` (D x n).
    Matrix forward(const Matrix& xt) const;
    std::vector<int> predict(const Matrix& x) const;

    // Mean cross-entropy over the columns of `xt` and its gradient. Dropout
    // masks are drawn from `dropout_rng` when given; otherwise no dropout.
    double loss_and_gradient(const Matrix& xt, const std::vector<int>& labels, std::vector<DenseLayer>& grad,
                             const std::vector<double>& dropout = {}, Rng* dropout_rng = nullptr) const;

    nlohmann::json to_json() const;
    static Mlp from_json(const nlohmann::json& j);

    bool operator==(const Mlp& other) const;

private:
    std::vector<DenseLayer> layers_;
    Activation activation_ = Activation::relu;
};

struct MlpTrainingInfo {
    double training_error = 0.0;
    int epochs_run = 0;
    double final_loss = 0.0;
};

// Mini-batch training with Adadelta steps, momentum on the accumulated step,
// and inverted dropout on hidden activations. Fixed epoch budget.
Mlp train_mlp(const EncodedMatrix& data, const MlpParams& params, MlpTrainingInfo* info = nullptr);

// Multinomial logistic regression: the same trainer with no hidden layers.
Mlp train_logistic(const EncodedMatrix& data, MlpParams params, MlpTrainingInfo* info = nullptr);

}  // namespace mdi

#include "mdi/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "mdi/error.hpp"
#include "mdi/hexfloat.hpp"

namespace mdi {

double adadelta_step(double grad, AdadeltaState& s, double rho, double eps, double lr_scale) {
    s.mean_sq_grad = rho * s.mean_sq_grad + (1.0 - rho) * grad * grad;
    const double dx = -std::sqrt(s.mean_sq_step + eps) / std::sqrt(s.mean_sq_grad + eps) * grad * lr_scale;
    s.mean_sq_step = rho * s.mean_sq_step + (1.0 - rho) * dx * dx;
    return dx;
}

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw InvalidArgument("unknown activation: " + s);
}

double MomentumSchedule::at(int epoch) const {
    if (ramp_epochs <= 0 || epoch >= ramp_epochs) return end;
    return start + (end - start) * static_cast<double>(epoch) / static_cast<double>(ramp_epochs);
}

double MlpParams::dropout_for(std::size_t layer) const {
    if (dropout.empty()) return 0.0;
    if (dropout.size() == 1) return dropout[0];
    return layer < dropout.size() ? dropout[layer] : 0.0;
}

void MlpParams::validate() const {
    for (int w : hidden)
        if (w < 1) throw InvalidArgument("hidden layer widths must be >= 1");
    for (double p : dropout)
        if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("dropout rates must be in [0, 1)");
    if (dropout.size() > 1 && dropout.size() != hidden.size())
        throw InvalidArgument("dropout list must have one rate or one per hidden layer");
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("adadelta rho must be in (0, 1)");
    if (!(eps > 0.0)) throw InvalidArgument("adadelta eps must be positive");
    if (!(lr_scale > 0.0)) throw InvalidArgument("lr_scale must be positive");
    if (momentum.start < 0 || momentum.start >= 1 || momentum.end < 0 || momentum.end >= 1)
        throw InvalidArgument("momentum coefficients must be in [0, 1)");
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
}

Mlp::Mlp(std::size_t inputs, const std::vector<int>& hidden, std::size_t classes, Activation activation, Rng& rng)
    : activation_(activation) {
    std::size_t fan_in = inputs;
    std::vector<std::size_t> widths;
    for (int h : hidden) widths.push_back(static_cast<std::size_t>(h));
    widths.push_back(classes);
    for (auto fan_out : widths) {
        DenseLayer layer;
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
        for (Eigen::Index k = 0; k < layer.weights.size(); ++k)
            layer.weights.data()[k] = (2.0 * uniform01(rng) - 1.0) * limit;
        layer.bias = Vector::Zero(static_cast<Eigen::Index>(fan_out));
        layers_.push_back(std::move(layer));
        fan_in = fan_out;
    }
}

std::size_t Mlp::inputs() const { return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weights.cols()); }
std::size_t Mlp::classes() const { return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weights.rows()); }

namespace {

void activate(Matrix& z, Activation a) {
    if (a == Activation::relu)
        z = z.cwiseMax(0.0);
    else
        z = z.array().tanh().matrix();
}

// Column-wise softmax in place.
void softmax_columns(Matrix& z) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto col = z.col(c);
        const double mx = col.maxCoeff();
        col = (col.array() - mx).exp().matrix();
        col /= col.sum();
    }
}

}  // namespace

Matrix Mlp::forward(const Matrix& xt) const {
    Matrix a = xt;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Matrix z = layers_[l].weights * a;
        z.colwise() += layers_[l].bias;
        if (l + 1 < layers_.size()) activate(z, activation_);
        a = std::move(z);
    }
    softmax_columns(a);
    return a;
}

std::vector<int> Mlp::predict(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != inputs()) throw InvalidArgument("matrix width does not match network");
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    constexpr Eigen::Index chunk = 4096;
    for (Eigen::Index start = 0; start < x.rows(); start += chunk) {
        const auto len = std::min(chunk, x.rows() - start);
        const Matrix p = forward(x.middleRows(start, len).transpose());
        for (Eigen::Index c = 0; c < len; ++c) {
            Eigen::Index best = 0;
            p.col(c).maxCoeff(&best);
            out[static_cast<std::size_t>(start + c)] = static_cast<int>(best);
        }
    }
    return out;
}

double Mlp::loss_and_gradient(const Matrix& xt, const std::vector<int>& labels, std::vector<DenseLayer>& grad,
                              const std::vector<double>& dropout, Rng* dropout_rng) const {
    const auto n_layers = layers_.size();
    const auto batch = xt.cols();
    if (static_cast<std::size_t>(batch) != labels.size()) throw InvalidArgument("label count mismatch");
    // inputs[l] feeds layer l; hidden_out[l] and masks[l] belong to hidden layer l.
    std::vector<Matrix> inputs(n_layers), hidden_out(n_layers), masks(n_layers);
    inputs[0] = xt;
    Matrix z;
    for (std::size_t l = 0; l < n_layers; ++l) {
        z = layers_[l].weights * inputs[l];
        z.colwise() += layers_[l].bias;
        if (l + 1 == n_layers) break;
        activate(z, activation_);
        hidden_out[l] = z;
        const double p = l < dropout.size() ? dropout[l] : 0.0;
        if (dropout_rng && p > 0.0) {
            masks[l].resize(z.rows(), z.cols());
            const double keep_scale = 1.0 / (1.0 - p);
            for (Eigen::Index k = 0; k < masks[l].size(); ++k)
                masks[l].data()[k] = uniform01(*dropout_rng) >= p ? keep_scale : 0.0;
            z = z.cwiseProduct(masks[l]);
        }
        inputs[l + 1] = z;
    }

    // z holds the output logits.
    double loss = 0.0;
    Matrix delta(z.rows(), z.cols());
    for (Eigen::Index c = 0; c < batch; ++c) {
        const auto col = z.col(c);
        const double mx = col.maxCoeff();
        const double lse = std::log((col.array() - mx).exp().sum()) + mx;
        const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(c)]);
        loss -= col(y) - lse;
        delta.col(c) = (col.array() - lse).exp().matrix();
        delta(y, c) -= 1.0;
    }
    const double inv_b = 1.0 / static_cast<double>(batch);
    loss *= inv_b;
    delta *= inv_b;

    grad.resize(n_layers);
    for (std::size_t l = n_layers; l-- > 0;) {
        grad[l].weights.noalias() = delta * inputs[l].transpose();
        grad[l].bias = delta.rowwise().sum();
        if (l == 0) break;
        Matrix da = layers_[l].weights.transpose() * delta;
        if (masks[l - 1].size()) da = da.cwiseProduct(masks[l - 1]);
        const auto& h = hidden_out[l - 1];
        if (activation_ == Activation::relu)
            delta = (h.array() > 0.0).select(da, 0.0);
        else
            delta = da.cwiseProduct((1.0 - h.array().square()).matrix());
    }
    return loss;
}

nlohmann::json Mlp::to_json() const {
    nlohmann::json j;
    j["activation"] = to_string(activation_);
    auto arr = nlohmann::json::array();
    for (const auto& l : layers_) {
        std::vector<std::string> w, b;
        for (Eigen::Index k = 0; k < l.weights.size(); ++k) w.push_back(encode_hex_double(l.weights.data()[k]));
        for (Eigen::Index k = 0; k < l.bias.size(); ++k) b.push_back(encode_hex_double(l.bias[k]));
        arr.push_back({{"rows", l.weights.rows()}, {"cols", l.weights.cols()}, {"weights", w}, {"bias", b}});
    }
    j["layers"] = std::move(arr);
    return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
    Mlp m;
    m.activation_ = parse_activation(j.at("activation").get<std::string>());
    for (const auto& jl : j.at("layers")) {
        DenseLayer l;
        const auto r = jl.at("rows").get<Eigen::Index>(), c = jl.at("cols").get<Eigen::Index>();
        const auto w = jl.at("weights").get<std::vector<std::string>>();
        const auto b = jl.at("bias").get<std::vector<std::string>>();
        if (static_cast<Eigen::Index>(w.size()) != r * c || static_cast<Eigen::Index>(b.size()) != r)
            throw ParseError("layer shape does not match stored values", 0);
        if (!m.layers_.empty() && m.layers_.back().weights.rows() != c)
            throw ParseError("consecutive layer shapes do not chain", 0);
        l.weights.resize(r, c);
        l.bias.resize(r);
        for (Eigen::Index k = 0; k < r * c; ++k) l.weights.data()[k] = decode_hex_double(w[static_cast<std::size_t>(k)]);
        for (Eigen::Index k = 0; k < r; ++k) l.bias[k] = decode_hex_double(b[static_cast<std::size_t>(k)]);
        m.layers_.push_back(std::move(l));
    }
    if (m.layers_.empty()) throw ParseError("network has no layers", 0);
    return m;
}

bool Mlp::operator==(const Mlp& o) const {
    if (activation_ != o.activation_ || layers_.size() != o.layers_.size()) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto &a = layers_[l], &b = o.layers_[l];
        if (a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols()) return false;
        if (std::memcmp(a.weights.data(), b.weights.data(), sizeof(double) * static_cast<std::size_t>(a.weights.size())) ||
            std::memcmp(a.bias.data(), b.bias.data(), sizeof(double) * static_cast<std::size_t>(a.bias.size())))
            return false;
    }
    return true;
}

namespace {

struct ParamState {
    Matrix mean_sq_grad, mean_sq_step, velocity;
    explicit ParamState(const Matrix& like)
        : mean_sq_grad(Matrix::Zero(like.rows(), like.cols())),
          mean_sq_step(Matrix::Zero(like.rows(), like.cols())),
          velocity(Matrix::Zero(like.rows(), like.cols())) {}
};

template <class Param>
void update(Param& theta, const Param& g, ParamState& s, const MlpParams& p, double mu) {
    auto eg = s.mean_sq_grad.reshaped().array();
    auto ex = s.mean_sq_step.reshaped().array();
    auto v = s.velocity.reshaped().array();
    const auto ga = g.reshaped().array();
    eg = p.rho * eg + (1.0 - p.rho) * ga * ga;
    const Eigen::ArrayXd dx = -(ex + p.eps).sqrt() / (eg + p.eps).sqrt() * ga * p.lr_scale;
    ex = p.rho * ex + (1.0 - p.rho) * dx * dx;
    v = mu * v + dx;
    theta.reshaped().array() += v;
}

}  // namespace

Mlp train_mlp(const EncodedMatrix& data, const MlpParams& params, MlpTrainingInfo* info) {
    params.validate();
    const auto n = data.rows();
    if (n == 0) throw EmptyDataError("cannot train on an empty matrix");
    if (data.labels.size() != n) throw InvalidArgument("label count does not match matrix rows");
    if (data.n_classes < 1) throw InvalidArgument("no classes");

    Rng init_rng = make_rng(substream(params.seed, 0));
    Rng order_rng = make_rng(substream(params.seed, 1));
    Rng dropout_rng = make_rng(substream(params.seed, 2));

    Mlp net(data.cols(), params.hidden, data.n_classes, params.activation, init_rng);
    std::vector<double> dropout(params.hidden.size());
    bool any_dropout = false;
    for (std::size_t l = 0; l < dropout.size(); ++l) {
        dropout[l] = params.dropout_for(l);
        any_dropout = any_dropout || dropout[l] > 0.0;
    }

    auto& layers = net.layers();
    std::vector<ParamState> w_state, b_state;
    for (const auto& l : layers) {
        w_state.emplace_back(l.weights);
        b_state.emplace_back(Matrix(l.bias));
    }

    const Matrix xt = data.x.transpose();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto bs = static_cast<std::size_t>(params.batch_size);
    Matrix xb;
    std::vector<int> yb;
    std::vector<DenseLayer> grad;
    double epoch_loss = 0.0;

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        shuffle_range(order.begin(), order.end(), order_rng);
        const double mu = params.momentum.at(epoch);
        epoch_loss = 0.0;
        for (std::size_t start = 0, batch_no = 0; start < n; start += bs, ++batch_no) {
            const auto len = std::min(bs, n - start);
            xb.resize(xt.rows(), static_cast<Eigen::Index>(len));
            yb.resize(len);
            for (std::size_t k = 0; k < len; ++k) {
                xb.col(static_cast<Eigen::Index>(k)) = xt.col(static_cast<Eigen::Index>(order[start + k]));
                yb[k] = data.labels[order[start + k]];
            }
            const double loss =
                net.loss_and_gradient(xb, yb, grad, dropout, any_dropout ? &dropout_rng : nullptr);
            if (!std::isfinite(loss)) {
                std::ostringstream msg;
                msg << "non-finite training loss at epoch " << epoch << ", batch " << batch_no
                    << " (lr_scale=" << params.lr_scale << ", momentum=" << mu << ")";
                throw TrainingError(msg.str());
            }
            epoch_loss += loss * static_cast<double>(len);
            for (std::size_t l = 0; l < layers.size(); ++l) {
                update(layers[l].weights, grad[l].weights, w_state[l], params, mu);
                update(layers[l].bias, grad[l].bias, b_state[l], params, mu);
            }
        }
        epoch_loss /= static_cast<double>(n);
    }

    if (info) {
        const auto pred = net.predict(data.x);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i) wrong += pred[i] != data.labels[i];
        info->training_error = static_cast<double>(wrong) / static_cast<double>(n);
        info->epochs_run = params.epochs;
        info->final_loss = epoch_loss;
    }
    return net;
}

Mlp train_logistic(const EncodedMatrix& data, MlpParams params, MlpTrainingInfo* info) {
    params.hidden.clear();
    params.dropout.clear();
    return train_mlp(data, params, info);
}

}  // namespace mdi

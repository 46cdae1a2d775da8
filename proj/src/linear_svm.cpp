#include "mdi/linear_svm.hpp"

#include <cstring>
#include <numeric>

#include "mdi/error.hpp"
#include "mdi/hexfloat.hpp"
#include "mdi/random.hpp"

namespace mdi {

Matrix LinearSvm::decision_function(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != inputs()) throw InvalidArgument("matrix width does not match SVM");
    Matrix scores = weights_ * x.transpose();
    scores.colwise() += bias_;
    return scores;
}

std::vector<int> LinearSvm::predict(const Matrix& x) const {
    const Matrix s = decision_function(x);
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < s.cols(); ++i) {
        Eigen::Index best = 0;
        s.col(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

nlohmann::json LinearSvm::to_json() const {
    std::vector<std::string> w, b;
    for (Eigen::Index k = 0; k < weights_.size(); ++k) w.push_back(encode_hex_double(weights_.data()[k]));
    for (Eigen::Index k = 0; k < bias_.size(); ++k) b.push_back(encode_hex_double(bias_[k]));
    return {{"classes", weights_.rows()}, {"inputs", weights_.cols()}, {"weights", w}, {"bias", b}};
}

LinearSvm LinearSvm::from_json(const nlohmann::json& j) {
    const auto r = j.at("classes").get<Eigen::Index>(), c = j.at("inputs").get<Eigen::Index>();
    const auto w = j.at("weights").get<std::vector<std::string>>();
    const auto b = j.at("bias").get<std::vector<std::string>>();
    if (static_cast<Eigen::Index>(w.size()) != r * c || static_cast<Eigen::Index>(b.size()) != r)
        throw ParseError("SVM shape does not match stored values", 0);
    Matrix wm(r, c);
    Vector bv(r);
    for (Eigen::Index k = 0; k < r * c; ++k) wm.data()[k] = decode_hex_double(w[static_cast<std::size_t>(k)]);
    for (Eigen::Index k = 0; k < r; ++k) bv[k] = decode_hex_double(b[static_cast<std::size_t>(k)]);
    return LinearSvm(std::move(wm), std::move(bv));
}

bool LinearSvm::operator==(const LinearSvm& o) const {
    return weights_.rows() == o.weights_.rows() && weights_.cols() == o.weights_.cols() &&
           !std::memcmp(weights_.data(), o.weights_.data(), sizeof(double) * static_cast<std::size_t>(weights_.size())) &&
           !std::memcmp(bias_.data(), o.bias_.data(), sizeof(double) * static_cast<std::size_t>(bias_.size()));
}

LinearSvm train_linear_svm(const EncodedMatrix& data, const SvmParams& params) {
    const auto n = data.rows();
    if (n == 0) throw EmptyDataError("cannot train on an empty matrix");
    if (data.labels.size() != n) throw InvalidArgument("label count does not match matrix rows");
    if (!(params.lambda > 0)) throw InvalidArgument("SVM lambda must be positive");
    if (params.epochs < 1) throw InvalidArgument("epochs must be >= 1");
    const auto d = static_cast<Eigen::Index>(data.cols());
    const auto classes = static_cast<Eigen::Index>(data.n_classes);

    // Augmented rows [x, 1], one column per example.
    Matrix xt(d + 1, static_cast<Eigen::Index>(n));
    xt.topRows(d) = data.x.transpose();
    xt.row(d).setOnes();

    Matrix weights(classes, d);
    Vector bias(classes);
    const std::size_t total_steps = n * static_cast<std::size_t>(params.epochs);
    const std::size_t average_from = total_steps / 2;

    for (Eigen::Index c = 0; c < classes; ++c) {
        Rng rng = make_rng(substream(params.seed, static_cast<std::uint64_t>(c)));
        Vector w = Vector::Zero(d + 1), avg = Vector::Zero(d + 1);
        // w is stored as scale * v so the shrink step is O(1).
        double scale = 1.0;
        Vector v = Vector::Zero(d + 1);
        std::size_t averaged = 0;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::size_t t = 0;
        for (int epoch = 0; epoch < params.epochs; ++epoch) {
            shuffle_range(order.begin(), order.end(), rng);
            for (auto i : order) {
                ++t;
                const double eta = 1.0 / (params.lambda * static_cast<double>(t));
                const double y = data.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
                const auto xi = xt.col(static_cast<Eigen::Index>(i));
                const double margin = y * scale * v.dot(xi);
                const double shrink = 1.0 - eta * params.lambda;
                if (shrink <= 0.0) {
                    v.setZero();
                    scale = 1.0;
                } else {
                    scale *= shrink;
                }
                if (margin < 1.0) v += (eta * y / scale) * xi;
                if (scale < 1e-9) {
                    v *= scale;
                    scale = 1.0;
                }
                if (t > average_from) {
                    avg += scale * v;
                    ++averaged;
                }
            }
        }
        w = averaged ? Vector(avg / static_cast<double>(averaged)) : Vector(scale * v);
        weights.row(c) = w.head(d).transpose();
        bias[c] = w[d];
    }
    return LinearSvm(std::move(weights), std::move(bias));
}

}  // namespace mdi

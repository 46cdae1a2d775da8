#include <doctest.h>

#include "mdi/linear_svm.hpp"
#include "mdi/random.hpp"

using namespace mdi;

namespace {

EncodedMatrix blobs(std::size_t n, std::uint64_t seed, std::size_t classes = 2) {
    Rng rng = make_rng(seed);
    EncodedMatrix m;
    m.x.resize(static_cast<Eigen::Index>(n), 3);
    m.labels.resize(n);
    m.n_classes = classes;
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % classes);
        for (Eigen::Index j = 0; j < 3; ++j)
            m.x(static_cast<Eigen::Index>(i), j) = (j == c ? 3.0 : 0.0) + (uniform01(rng) - 0.5);
        m.labels[i] = c;
    }
    return m;
}

}  // namespace

TEST_CASE("separable toy: zero training error with positive margin") {
    const auto data = blobs(200, 1);
    SvmParams p;
    p.lambda = 1e-3;
    p.epochs = 50;
    const auto svm = train_linear_svm(data, p);
    CHECK(svm.predict(data.x) == data.labels);
    const Matrix scores = svm.decision_function(data.x);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const double s = scores(data.labels[i], static_cast<Eigen::Index>(i));
        CHECK(s > 0.0);
    }
}

TEST_CASE("three classes one-vs-rest") {
    const auto data = blobs(300, 2, 3);
    const auto svm = train_linear_svm(data, {});
    CHECK(svm.classes() == 3);
    CHECK(svm.predict(data.x) == data.labels);
}

TEST_CASE("duplicating every row leaves the boundary essentially unchanged") {
    const auto data = blobs(200, 3);
    EncodedMatrix twice = data;
    twice.x.resize(400, 3);
    twice.x << data.x, data.x;
    twice.labels.insert(twice.labels.end(), data.labels.begin(), data.labels.end());
    SvmParams p;
    p.epochs = 200;
    const auto a = train_linear_svm(data, p);
    p.epochs = 100;  // same number of steps
    const auto b = train_linear_svm(twice, p);
    const Eigen::VectorXd wa = a.weights().row(1).transpose() / a.weights().row(1).norm();
    const Eigen::VectorXd wb = b.weights().row(1).transpose() / b.weights().row(1).norm();
    CHECK(wa.dot(wb) > 0.99);
    CHECK(a.predict(data.x) == b.predict(data.x));
}

TEST_CASE("SVM determinism and JSON round-trip") {
    const auto data = blobs(100, 4);
    SvmParams p;
    p.seed = 5;
    const auto a = train_linear_svm(data, p);
    CHECK(a == train_linear_svm(data, p));
    CHECK(LinearSvm::from_json(nlohmann::json::parse(a.to_json().dump())) == a);
}

#include <doctest.h>

#include <random>

#include "mdi/error.hpp"
#include "mdi/tree.hpp"

using namespace mdi;

namespace {

EncodedMatrix make(const Matrix& x, std::vector<int> y, std::size_t classes = 2) {
    EncodedMatrix m;
    m.x = x;
    m.labels = std::move(y);
    m.n_classes = classes;
    return m;
}

EncodedMatrix noisy(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u;
    Matrix x(static_cast<Eigen::Index>(n), 6);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) x(static_cast<Eigen::Index>(i), j) = g(rng);
        const double s = x(static_cast<Eigen::Index>(i), 0) + x(static_cast<Eigen::Index>(i), 1) * x(static_cast<Eigen::Index>(i), 2);
        y[i] = (s > 0) != (u(rng) < 0.15);
    }
    return make(x, y);
}

}  // namespace

TEST_CASE("gini") {
    CHECK(gini({5, 0}) == 0.0);
    CHECK(gini({2, 2}) == 0.5);
    CHECK(gini({1, 1, 1}) == doctest::Approx(2.0 / 3.0));
    CHECK(gini({0, 0}) == 0.0);
}

TEST_CASE("separable single feature gives a depth-1 tree") {
    Matrix x(4, 1);
    x << 0, 0, 1, 1;
    const auto t = train_decision_tree(make(x, {0, 0, 1, 1}), {});
    CHECK(t.depth() == 1);
    CHECK(t.nodes()[0].threshold == 0.5);
    CHECK(t.predict(x) == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("pure labels give a single leaf") {
    Matrix x = Matrix::Random(5, 3);
    const auto t = train_decision_tree(make(x, {1, 1, 1, 1, 1}), {});
    CHECK(t.nodes().size() == 1);
    CHECK(t.predict(x) == std::vector<int>(5, 1));
    CHECK_THROWS_AS(train_decision_tree(make(Matrix(0, 3), {}), {}), EmptyDataError);
}

TEST_CASE("root split agrees with an exhaustive search on an XOR-style instance") {
    // x0, x1 in {0,1} XOR plus a weakly informative x2.
    Matrix x(8, 3);
    x << 0, 0, 0.1, 0, 1, 0.7, 1, 0, 0.8, 1, 1, 0.2, 0, 0, 0.3, 0, 1, 0.9, 1, 0, 0.6, 1, 1, 0.4;
    const std::vector<int> y = {0, 1, 1, 0, 0, 1, 1, 0};
    const auto t = train_decision_tree(make(x, y), {});

    // Brute force: every (feature, midpoint) with the weighted Gini of children.
    double best = 1e9;
    int best_f = -1;
    double best_thr = 0;
    for (int f = 0; f < 3; ++f) {
        std::vector<double> v(x.col(f).data(), x.col(f).data() + 8);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            const double thr = (v[k] + v[k + 1]) / 2;
            std::vector<std::size_t> l(2, 0), r(2, 0);
            for (int i = 0; i < 8; ++i) (x(i, f) <= thr ? l : r)[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])]++;
            const double nl = static_cast<double>(l[0] + l[1]), nr = static_cast<double>(r[0] + r[1]);
            const double w = (nl * gini(l) + nr * gini(r)) / 8.0;
            if (w < best - 1e-12) {
                best = w;
                best_f = f;
                best_thr = thr;
            }
        }
    }
    CHECK(t.nodes()[0].feature == best_f);
    CHECK(t.nodes()[0].threshold == best_thr);
    CHECK(t.predict(x) == y);  // grown to purity
}

TEST_CASE("accepted splits strictly decrease impurity") {
    const auto data = noisy(400, 3);
    const auto t = train_decision_tree(data, {});
    const auto& nodes = t.nodes();
    for (const auto& n : nodes) {
        if (n.feature < 0) continue;
        const auto& l = nodes[static_cast<std::size_t>(n.left)];
        const auto& r = nodes[static_cast<std::size_t>(n.right)];
        const double children = (static_cast<double>(l.samples) * l.impurity + static_cast<double>(r.samples) * r.impurity) /
                                static_cast<double>(n.samples);
        CHECK(children < n.impurity);
        CHECK(n.impurity <= 0.5);
    }
    TreeParams shallow;
    shallow.max_depth = 3;
    CHECK(train_decision_tree(data, shallow).depth() <= 3);
}

TEST_CASE("one-tree forest without bootstrap equals the decision tree") {
    const auto data = noisy(300, 5);
    TreeParams tp;
    tp.max_depth = 6;
    const auto tree = train_decision_tree(data, tp);
    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.mtry = FeatureRule::all;
    fp.tree = tp;
    fp.seed = 77;
    const auto forest = train_random_forest(data, fp);
    CHECK(forest.trees()[0] == tree);
    CHECK(forest.predict(data.x) == tree.predict(data.x));
}

TEST_CASE("forests are deterministic and thread-count independent") {
    const auto data = noisy(300, 6);
    ForestParams fp;
    fp.n_trees = 12;
    fp.seed = 4;
    const auto a = train_random_forest(data, fp);
    fp.threads = 3;
    const auto b = train_random_forest(data, fp);
    REQUIRE(a.trees().size() == b.trees().size());
    for (std::size_t t = 0; t < a.trees().size(); ++t) CHECK(a.trees()[t] == b.trees()[t]);
    CHECK(features_per_split(FeatureRule::sqrt, 108) == 10);
    CHECK(features_per_split(FeatureRule::log2, 108) == 6);
    CHECK(features_per_split(FeatureRule::all, 108) == 108);
    CHECK(features_per_split(FeatureRule::sqrt, 1) == 1);
}

TEST_CASE("200-tree forests beat a single tree out of sample on most seeds") {
    // Statistical property: checked over 10 seeds, required on a majority.
    int wins = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto train = noisy(400, 100 + s);
        const auto test = noisy(400, 200 + s);
        const auto tree = train_decision_tree(train, {});
        ForestParams fp;
        fp.n_trees = 200;
        fp.seed = s;
        const auto forest = train_random_forest(train, fp);
        auto err = [&](const std::vector<int>& p) {
            std::size_t w = 0;
            for (std::size_t i = 0; i < p.size(); ++i) w += p[i] != test.labels[i];
            return w;
        };
        wins += err(forest.predict(test.x)) <= err(tree.predict(test.x));
    }
    CHECK(wins >= 8);
}

TEST_CASE("tree JSON round-trips bit-exactly") {
    const auto data = noisy(200, 8);
    const auto t = train_decision_tree(data, {});
    const auto back = DecisionTree::from_json(nlohmann::json::parse(t.to_json().dump()), t.width(), t.n_classes());
    CHECK(back == t);
}

#include <doctest.h>

#include <cmath>

#include "mdi/encoding.hpp"
#include "mdi/error.hpp"
#include "mdi/imputation.hpp"
#include "mdi/perturbation.hpp"
#include "support.hpp"

using namespace mdi;

namespace {

ImputerParams method(const std::string& name, DonorFallback fb = DonorFallback::none) {
    auto p = parse_imputer(name);
    p.fallback = fb;
    return p;
}

const char* kAll[] = {"mode", "random_replacement", "knn", "model-logistic", "model-random_forest", "model-linear_svm"};

void check_observed_preserved(const Dataset& in, const Dataset& out) {
    REQUIRE(out.rows() == in.rows());
    CHECK(out.mask().count() == 0);
    CHECK(out.labels() == in.labels());
    CHECK(out.origin() == in.origin());
    for (std::size_t i = 0; i < in.rows(); ++i)
        for (std::size_t j = 0; j < in.features(); ++j)
            if (!in.is_missing(i, j)) REQUIRE(out.cell(i, j) == in.cell(i, j));
}

}  // namespace

TEST_CASE("mode and mean statistics") {
    const auto a = fit_imputer(test::toy("a,x\na,x\nb,x\n", "cc"), {}, 0);
    CHECK(a.fill_values()[0] == 0.0);
    const auto tie = fit_imputer(test::toy("a,x\na,x\nb,x\nb,x\n", "cc"), {}, 0);
    CHECK(tie.fill_values()[0] == 0.0);  // earlier in schema order
    const auto tie2 = fit_imputer(test::toy("b,x\na,x\nb,x\na,x\n", "cc"), {}, 0);
    CHECK(tie2.fill_values()[0] == 0.0);  // "b" is first-seen, so first in schema order
    const auto mean = fit_imputer(test::toy("1,x\n3,x\n?,x\n", "nc"), {}, 0);
    CHECK(mean.fill_values()[0] == 2.0);
}

TEST_CASE("mode imputation on a toy column") {
    const auto ds = test::toy("a,x\n?,x\na,y\n", "cc");
    const auto out = transform(fit_imputer(ds, {}, 0), ds);
    CHECK(out.category(1, 0) == 0);
    check_observed_preserved(ds, out);
}

TEST_CASE("fit errors") {
    CHECK_THROWS_AS(fit_imputer(test::toy("?,x\n?,y\n", "cc"), {}, 0), EmptyDataError);
    const auto no_complete = test::toy("a,?,x\n?,b,y\n", "ccc");
    for (const char* m : {"random_replacement", "knn", "model-logistic"})
        CHECK_THROWS_AS(fit_imputer(no_complete, method(m), 0), EmptyDataError);
    CHECK_NOTHROW(fit_imputer(no_complete, method("mode"), 0));
    auto p = method("knn");
    p.k = 0;
    CHECK_THROWS_AS(fit_imputer(no_complete, p, 0), InvalidArgument);
}

TEST_CASE("kNN hand instance: donor values {a,a,b} at distances {0,1,1}") {
    // Features f0, f1 (observed in the query) and target t.
    const auto donors = test::toy("p,q,a,x\n"   // distance 0
                                  "p,r,a,x\n"   // distance 1
                                  "s,q,b,x\n"   // distance 1
                                  "s,r,b,x\n",  // distance 2
                                  "cccc");
    const KnnIndex index(donors, std::vector<double>(3, 1.0));
    const std::vector<double> query = {0, 0, kMissingCell};
    const auto nn = index.neighbors(query, 3);
    REQUIRE(nn.size() == 3);
    CHECK(nn[0] == std::make_pair(0.0, std::size_t{0}));
    CHECK(nn[1] == std::make_pair(1.0, std::size_t{1}));
    CHECK(nn[2] == std::make_pair(1.0, std::size_t{2}));
    CHECK((*index.fill(query, 3))[2] == 0.0);  // "a"

    // Tied categories go to the nearest donor's value.
    CHECK((*index.fill(query, 2))[2] == 0.0);
    const std::vector<double> q2 = {1, 0, kMissingCell};  // s,q: donors 2 (0), 0 (1), 3 (1)
    CHECK((*index.fill(q2, 2))[2] == 1.0);
    CHECK_FALSE(index.fill({kMissingCell, kMissingCell, kMissingCell}, 3).has_value());
}

TEST_CASE("kNN continuous distance uses the training scale and fills with the mean") {
    const auto donors = test::toy("0,10,x\n1,20,x\n5,30,x\n", "nnc");
    const KnnIndex index(donors, {2.0, 1.0});
    CHECK(index.distance({3.0, kMissingCell}, 2) == doctest::Approx(1.0));  // ((5-3)/2)^2
    CHECK((*index.fill({0.2, kMissingCell}, 2))[1] == 15.0);
}

TEST_CASE("kNN with k=1 reproduces an exact-duplicate donor") {
    const auto all = test::toy("a,1,p,x\nb,2,q,y\na,5,q,x\nb,2,?,y\n", "cncc");
    const auto train = all.select_rows({0, 1, 2});
    const auto query = all.select_rows({3});
    auto p = method("knn");
    p.k = 1;
    const auto out = transform(fit_imputer(train, p, 0), query);
    CHECK(out.category(0, 2) == 1);  // donor 1's "q"
}

TEST_CASE("kNN falls back to train modes when the query observes nothing, and clamps k") {
    const auto train = test::toy("a,p,x\nb,q,y\nb,q,y\n", "ccc");
    auto p = method("knn");
    p.k = 10;
    const auto model = fit_imputer(train, p, 0);
    CHECK(model.effective_k() == 3);
    CHECK_FALSE(model.notes().empty());
    const auto q = test::toy("?,?,x\n", "ccc").with_schema(train.schema());
    ImputationReceipt rec;
    const auto out = transform(model, q, &rec);
    CHECK(out.category(0, 0) == 1);
    CHECK(out.category(0, 1) == 1);
    CHECK(rec.notes.size() >= 2);
}

TEST_CASE("random replacement") {
    const auto one_donor = test::toy("a,p,x\n?,q,y\nb,?,y\n", "ccc");
    const auto out = transform(fit_imputer(one_donor, method("random_replacement"), 3), one_donor);
    CHECK(out.category(1, 0) == 0);
    CHECK(out.category(2, 1) == 0);
    check_observed_preserved(one_donor, out);

    const auto cvrs = test::load_cvrs();
    const auto m1 = fit_imputer(cvrs, method("random_replacement"), 8);
    const auto m2 = fit_imputer(cvrs, method("random_replacement"), 8);
    CHECK(transform(m1, cvrs) == transform(m2, cvrs));
    const auto m3 = fit_imputer(cvrs, method("random_replacement"), 9);
    CHECK_FALSE(transform(m1, cvrs) == transform(m3, cvrs));
}

TEST_CASE("every method: complete output, observed cells kept, idempotent, deterministic") {
    const auto train = perturb_mcar(split(test::load_cvrs(), 2.0 / 3.0, 1).train, 0.2, 2).data;
    for (const char* name : kAll) {
        CAPTURE(name);
        const auto model = fit_imputer(train, method(name), 5);
        const auto once = transform(model, train);
        check_observed_preserved(train, once);
        CHECK(once.rows() == 290);
        CHECK(transform(model, once) == once);
        CHECK(transform(fit_imputer(train, method(name), 5), train) == once);
        const auto complete = test::load_cvrs().select_rows({0}).with_schema(train.schema());
        if (complete.row_complete(0)) CHECK(transform(model, complete) == complete);
    }
}

TEST_CASE("empty donor pools refuse by default and fall back per feature on request") {
    const auto train = perturb_mcar(split(test::load_cvrs(), 2.0 / 3.0, 1).train, 0.4, 2).data;
    REQUIRE_THROWS_AS(complete_cases(train), EmptyDataError);
    for (const char* name : kAll) {
        CAPTURE(name);
        if (std::string(name) != "mode") CHECK_THROWS_AS(fit_imputer(train, method(name), 1), EmptyDataError);
        const auto model = fit_imputer(train, method(name, DonorFallback::per_feature), 1);
        const auto out = transform(model, train);
        check_observed_preserved(train, out);
        CHECK(transform(model, out) == out);
    }
}

TEST_CASE("model imputation reproduces a copied feature for every predictor family") {
    // t copies f0; f1 is noise. Rows 0..59 complete, rows 60..79 miss t.
    Rng rng = make_rng(4);
    Schema s(3);
    s[0] = {"f0", FeatureKind::categorical, {"a", "b", "c"}, false};
    s[1] = {"f1", FeatureKind::categorical, {"u", "v"}, false};
    s[2] = {"t", FeatureKind::categorical, {"A", "B", "C"}, true};
    Dataset ds(s, {"x", "y"});
    for (std::size_t i = 0; i < 80; ++i) {
        const double f0 = static_cast<double>(uniform_index(rng, 3));
        const double f1 = static_cast<double>(uniform_index(rng, 2));
        ds.append_row({f0, f1, i < 60 ? f0 : kMissingCell}, static_cast<int>(uniform_index(rng, 2)), i);
    }
    for (const char* name : {"model-logistic", "model-random_forest", "model-linear_svm"}) {
        CAPTURE(name);
        auto p = method(name);
        p.logistic.epochs = 200;
        const auto out = transform(fit_imputer(ds, p, 2), ds);
        for (std::size_t i = 60; i < 80; ++i) CHECK(out.category(i, 2) == ds.category(i, 0));
    }
}

TEST_CASE("model imputation: constant targets, untouched features, continuous targets") {
    const auto ds = test::toy("a,1,p,x\nb,2,p,y\n?,3,?,x\nb,?,p,y\na,5,p,x\n", "cncc");
    const auto model = fit_imputer(ds, method("model-logistic"), 0);
    // Features 0, 1 and 2 have training missingness; feature 2 is constant.
    CHECK(model.predictors().size() == 3);
    bool noted = false;
    for (const auto& n : model.notes()) noted = noted || n.find("constant") != std::string::npos;
    CHECK(noted);
    const auto out = transform(model, ds);
    check_observed_preserved(ds, out);
    CHECK(out.category(2, 2) == 0);

    // y = 2*x + 1 on complete cases: least squares recovers it.
    const auto lin = test::toy("0,1,x\n1,3,x\n2,5,y\n3,7,y\n4,?,x\n", "nnc");
    const auto out2 = transform(fit_imputer(lin, method("model-logistic"), 0), lin);
    CHECK(out2.value(4, 1) == doctest::Approx(9.0));
}

TEST_CASE("logistic predictor separates a linearly separable target") {
    Rng rng = make_rng(6);
    Schema s(2);
    s[0] = {"f", FeatureKind::continuous, {}, false};
    s[1] = {"t", FeatureKind::categorical, {"lo", "hi"}, true};
    Dataset ds(s, {"x"});
    for (std::size_t i = 0; i < 100; ++i) {
        const double v = uniform01(rng) * 2 - 1;
        ds.append_row({v + (v > 0 ? 0.1 : -0.1), i < 90 ? (v > 0 ? 1.0 : 0.0) : kMissingCell}, 0, i);
    }
    auto p = method("model-logistic");
    p.logistic.epochs = 200;
    const auto model = fit_imputer(ds, p, 1);
    const auto& fp = model.predictors().at(0);
    REQUIRE(fp.classifier);
    CHECK(fp.classifier->metadata().training_error == 0.0);
}

TEST_CASE("row order invariance without ties") {
    const auto all = test::toy("a,1,p,x\nb,2,q,y\na,7,r,x\nb,4,q,y\na,1.5,?,x\na,?,r,y\n", "cncc");
    const auto train = all.select_rows({0, 1, 2, 3});
    const auto query = all.select_rows({4, 5});
    for (const char* name : {"mode", "knn"}) {
        auto p = method(name);
        p.k = 1;
        const auto a = transform(fit_imputer(train, p, 0), query);
        const auto b = transform(fit_imputer(train.select_rows({3, 2, 1, 0}), p, 0), query);
        CHECK(a == b);
    }
}

TEST_CASE("Hamming neighbour ranking equals squared Euclidean ranking on one-hot codes") {
    const auto ds = test::random_categorical(60, 8, 3, 12);
    const auto enc = fit_encoder(ds);
    const auto m = encode(ds, enc);
    const KnnIndex index(ds, std::vector<double>(8, 1.0));
    for (std::size_t q = 0; q < 5; ++q) {
        for (std::size_t d = 0; d < ds.rows(); ++d) {
            const double ham = index.distance(ds.row(q), d);
            const double sq = (m.x.row(static_cast<Eigen::Index>(q)) - m.x.row(static_cast<Eigen::Index>(d))).squaredNorm();
            REQUIRE(sq == 2 * ham);
        }
    }
}

TEST_CASE("imputer names") {
    CHECK(parse_imputer("model-random_forest").label() == "model-random_forest");
    CHECK(parse_imputer("model").label() == "model-logistic");
    CHECK(parse_imputer("knn").method == ImputationMethod::knn);
    CHECK_THROWS_AS(parse_imputer("hotdeck"), InvalidArgument);
    CHECK_THROWS_AS(parse_imputer("model-naive_bayes"), InvalidArgument);
}

TEST_CASE("transform rejects a dataset with a foreign schema") {
    const auto model = fit_imputer(test::toy("a,x\n", "cc"), {}, 0);
    CHECK_THROWS_AS(transform(model, test::toy("1,2,x\n", "nnc")), InvalidArgument);
}

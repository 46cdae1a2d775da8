#include <doctest.h>

#include <cmath>

#include "mdi/encoding.hpp"
#include "mdi/error.hpp"
#include "mdi/imputation.hpp"
#include "mdi/perturbation.hpp"
#include "support.hpp"

using namespace mdi;

TEST_CASE("categorical blocks sum to one per row") {
    const auto adult = test::load_adult();
    const auto s = split(adult, 2.0 / 3.0, 2);
    const auto train = perturb_mcar(s.train, 0.3, 3).data;
    const auto enc = fit_encoder(train, adult.schema());
    for (const auto* ds : {&train, &s.test}) {
        const auto m = encode(*ds, enc);
        CHECK(m.cols() == enc.width);
        for (const auto& e : enc.features) {
            if (e.kind != FeatureKind::categorical) continue;
            const auto block = m.x.middleCols(static_cast<Eigen::Index>(e.first_column),
                                              static_cast<Eigen::Index>(e.width()));
            for (Eigen::Index i = 0; i < block.rows(); ++i) REQUIRE(block.row(i).sum() == 1.0);
        }
    }
}

TEST_CASE("MISSING columns follow full-data and training missingness") {
    const auto adult = test::load_adult();
    const auto enc = fit_encoder(adult, adult.schema());
    for (const auto& e : enc.features) {
        if (e.kind != FeatureKind::categorical) continue;
        const auto& name = adult.feature(e.feature).name;
        const bool expect = name == "workclass" || name == "occupation" || name == "native-country";
        CHECK_MESSAGE(e.missing_column == expect, name);
    }
    // A perturbed training set activates MISSING columns for the masked features too.
    const auto train = perturb_mcar(split(adult, 2.0 / 3.0, 1).train, 0.1, 1).data;
    for (const auto& e : fit_encoder(train, adult.schema()).features)
        if (e.kind == FeatureKind::categorical) CHECK(e.missing_column);
}

TEST_CASE("continuous cells use train statistics; missing ones become 0 with an indicator") {
    const auto train = test::toy("1,x\n3,y\n?,x\n", "nc");
    const auto test_ds = test::toy("5,x\n?,y\n", "nc");
    const auto enc = fit_encoder(train);
    REQUIRE(enc.features[0].indicator);
    CHECK(enc.features[0].mean == 2.0);
    CHECK(enc.features[0].stdev == doctest::Approx(std::sqrt(2.0)));
    const auto m = encode(test_ds, enc);
    CHECK(m.x(0, 0) == doctest::Approx(3.0 / std::sqrt(2.0)));
    CHECK(m.x(0, 1) == 0.0);
    CHECK(m.x(1, 0) == 0.0);
    CHECK(m.x(1, 1) == 1.0);
}

TEST_CASE("train-statistics discipline: test data never moves the encoder") {
    const auto train = test::toy("0,x\n2,y\n", "nc");
    const auto enc = fit_encoder(train);
    const auto shifted = test::toy("100,x\n200,y\n", "nc");
    const auto m = encode(shifted, enc);
    CHECK(enc.features[0].mean == 1.0);
    CHECK(m.x(0, 0) == doctest::Approx((100.0 - 1.0) / std::sqrt(2.0)));

    // Imputing the test set uses train modes, not test modes.
    const auto cat_all = test::toy("a,x\na,y\nb,x\nb,x\nb,y\n?,x\n", "cc");
    const auto cat_train = cat_all.select_rows({0, 1, 2});
    const auto cat_test = cat_all.select_rows({3, 4, 5});
    const auto imp = fit_imputer(cat_train, ImputerParams{}, 1);
    const auto filled = transform(imp, cat_test);
    CHECK(filled.category(2, 0) == 0);  // "a"
}

TEST_CASE("degenerate continuous columns encode as zero") {
    const auto train = test::toy("4,x\n4,y\n", "nc");
    const auto enc = fit_encoder(train);
    CHECK(enc.features[0].degenerate);
    CHECK_FALSE(enc.notes.empty());
    const auto m = encode(test::toy("9,x\n", "nc"), enc);
    CHECK(m.x(0, 0) == 0.0);
}

TEST_CASE("encoder rejects cells it cannot represent") {
    const auto train = test::toy("a,x\nb,y\n", "cc");
    const auto enc = fit_encoder(train);
    CHECK_THROWS_AS(encode(test::toy("?,x\n", "cc"), enc), InvalidArgument);
    CHECK_THROWS_AS(encode(test::toy("a,x\nb,x\nc,x\n", "cc"), enc), InvalidArgument);
    CHECK_THROWS_AS(fit_encoder(test::toy("?,x\n", "nc")), EmptyDataError);
}

TEST_CASE("imputed data never activates a MISSING column") {
    const auto cvrs = test::load_cvrs();
    const auto imp = fit_imputer(cvrs, ImputerParams{}, 1);
    const auto filled = transform(imp, cvrs);
    const auto enc = fit_encoder(filled, cvrs.schema());
    const auto m = encode(filled, enc);
    for (const auto& p : m.provenance)
        if (p.role == ColumnRole::missing_category) CHECK(m.x.col(static_cast<Eigen::Index>(p.column)).sum() == 0.0);
}

TEST_CASE("column provenance names every column") {
    const auto train = test::toy("a,1,x\nb,?,y\n", "cnc");
    const auto enc = fit_encoder(train);
    const auto prov = decode_column_provenance(enc);
    REQUIRE(prov.size() == enc.width);
    CHECK(prov[0].category == "a");
    CHECK(prov[1].category == "b");
    CHECK(prov[2].role == ColumnRole::value);  // feature 0 is complete: no MISSING column
    CHECK(prov[3].role == ColumnRole::missing_indicator);
    CHECK(prov[3].feature_name == prov[2].feature_name);
    CHECK(to_json(prov).size() == 4);
}

#include <doctest.h>

#include <cmath>

#include "mdi/patterns.hpp"
#include "support.hpp"

using namespace mdi;

TEST_CASE("feature fractions equal mask column means exactly") {
    const auto cvrs = test::load_cvrs();
    const auto r = missing_pattern_summary(cvrs);
    for (std::size_t j = 0; j < cvrs.features(); ++j) {
        CHECK(r.feature_missing_fraction[j] == static_cast<double>(cvrs.mask().count_col(j)) / 435.0);
        CHECK(r.co_missing[j][j] == r.feature_missing_fraction[j]);
    }
    double share = 0;
    for (double s : r.missing_cell_share) share += s;
    CHECK(share == doctest::Approx(1.0));
    std::size_t hist = 0;
    for (auto h : r.row_missing_histogram) hist += h;
    CHECK(hist == 435);
}

TEST_CASE("co-missingness on a hand instance") {
    const auto ds = test::toy("?,?,a,x\n?,b,a,y\nc,?,?,x\nc,b,a,y\n", "cccc");
    const auto r = missing_pattern_summary(ds);
    CHECK(r.co_missing[0][1] == 0.25);
    CHECK(r.co_missing[1][2] == 0.25);
    CHECK(r.co_missing[0][2] == 0.0);
    CHECK(r.rows_with_missing_fraction == 0.75);
    CHECK(r.row_missing_histogram == std::vector<std::size_t>{1, 1, 2, 0});
    CHECK(r.cell_missing_fraction == 5.0 / 12.0);
}

TEST_CASE("fully observed data gives an all-zero report") {
    const auto ds = test::toy("a,1,x\nb,2,y\n", "cnc");
    const auto r = missing_pattern_summary(ds);
    CHECK(r.rows_with_missing_fraction == 0.0);
    CHECK(r.row_missing_histogram[0] == 2);
    for (double f : r.feature_missing_fraction) CHECK(f == 0.0);
}

TEST_CASE("Cramer's V oracles") {
    std::vector<int> a = {0, 1, 2, 0, 1, 2, 1, 0};
    CHECK(*cramers_v(a, a) == doctest::Approx(1.0));
    CHECK_FALSE(cramers_v(a, std::vector<int>(8, 0)).has_value());

    const auto ind = test::random_categorical(10000, 2, 3, 11);
    std::vector<int> x, y;
    for (std::size_t i = 0; i < ind.rows(); ++i) {
        x.push_back(ind.category(i, 0));
        y.push_back(ind.category(i, 1));
    }
    CHECK(*cramers_v(x, y) < 0.05);
}

TEST_CASE("association matrix is symmetric with a unit diagonal") {
    const auto ds = test::toy("a,1,p,2,x\nb,2,q,4,y\na,3,p,7,x\nb,5,p,1,y\n", "cncnc");
    const auto m = feature_association(ds);
    for (std::size_t a = 0; a < m.size; ++a) {
        CHECK(*m.at(a, a) == 1.0);
        for (std::size_t b = 0; b < m.size; ++b) {
            CHECK(m.at(a, b).has_value() == m.at(b, a).has_value());
            if (m.at(a, b)) CHECK(*m.at(a, b) == doctest::Approx(*m.at(b, a)));
        }
    }
    CHECK_FALSE(m.at(0, 1).has_value());  // mixed pair
    CHECK(std::abs(*m.at(1, 3)) <= 1.0);
    const auto deg = test::toy("a,p,x\nb,p,y\n", "ccc");
    const auto dm = feature_association(deg);
    CHECK(*dm.at(0, 1) == 0.0);
    CHECK(dm.is_degenerate(0, 1));
}

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "mdi/dataset.hpp"
#include "mdi/error.hpp"
#include "mdi/uci.hpp"
#include "support.hpp"

using namespace mdi;

TEST_CASE("UCI reader trims tokens and maps the missing symbol") {
    const auto ds = test::toy(" a , 1.5 ,yes\nb,?, no\n?, 2,yes\n", "cnc");
    CHECK(ds.rows() == 3);
    CHECK(ds.features() == 2);
    CHECK(ds.feature(0).categories == std::vector<std::string>{"a", "b"});
    CHECK(ds.feature(1).kind == FeatureKind::continuous);
    CHECK(ds.value(0, 1) == 1.5);
    CHECK(ds.is_missing(1, 1));
    CHECK(ds.is_missing(2, 0));
    CHECK(ds.classes() == std::vector<std::string>{"yes", "no"});
    CHECK(ds.feature(0).has_missing);
    CHECK(ds.mask().count() == 2);
}

TEST_CASE("file without the missing symbol has an all-zero mask") {
    const auto ds = test::toy("a,1,x\nb,2,y\na,3,x\n", "cnc");
    CHECK(ds.mask().count() == 0);
    for (const auto& f : ds.schema()) CHECK_FALSE(f.has_missing);
}

TEST_CASE("reader errors carry the row number") {
    try {
        test::toy("a,1,x\nb,2\n", "cnc");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(test::toy("a,zz,x\n", "cnc"), ParseError);
    CHECK_THROWS_AS(test::toy("a,1,?\n", "cnc"), ParseError);
    CHECK_THROWS_AS(load_uci("/nonexistent/file.data", cvrs_format()), IoError);
}

TEST_CASE("benchmark files load with the published shapes") {
    const auto adult = test::load_adult();
    CHECK(adult.rows() == 48842);
    CHECK(adult.features() == 14);
    CHECK(adult.continuous_features().size() == 6);
    CHECK(adult.categorical_features().size() == 8);
    CHECK(adult.classes().size() == 2);  // trailing '.' stripped from adult.test labels

    const auto cvrs = test::load_cvrs();
    CHECK(cvrs.rows() == 435);
    CHECK(cvrs.features() == 16);
    for (const auto& f : cvrs.schema()) {
        CHECK(f.is_categorical());
        CHECK(std::set<std::string>(f.categories.begin(), f.categories.end()) == std::set<std::string>{"y", "n"});
    }
    cvrs.validate();
    adult.validate();
}

TEST_CASE("split partitions rows with round-half-up sizes") {
    const auto cvrs = test::load_cvrs();
    const auto s = split(cvrs, 2.0 / 3.0, 7);
    CHECK(s.train.rows() == 290);
    CHECK(s.test.rows() == 145);
    std::set<std::size_t> seen;
    for (auto o : s.train.origin()) seen.insert(o);
    for (auto o : s.test.origin()) CHECK(seen.insert(o).second);
    CHECK(seen.size() == 435);
    CHECK(s.train.schema() == cvrs.schema());

    const auto again = split(cvrs, 2.0 / 3.0, 7);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);

    const auto adult = test::load_adult();
    CHECK(split(adult, 2.0 / 3.0, 1).train.rows() == 32561);  // floor(32561.33 + 0.5)

    CHECK_THROWS_AS(split(test::toy("a,x\n", "cc"), 0.5, 1), EmptyDataError);
    CHECK_THROWS_AS(split(cvrs, 1.0, 1), InvalidArgument);
}

TEST_CASE("stratified split keeps class proportions") {
    const auto cvrs = test::load_cvrs();
    const auto s = split(cvrs, 2.0 / 3.0, 3, true);
    std::size_t dem = 0;
    for (int l : s.train.labels()) dem += cvrs.classes()[static_cast<std::size_t>(l)] == "democrat";
    CHECK(dem == round_half_up(267 * 2.0 / 3.0));
}

TEST_CASE("complete cases") {
    const auto ds = test::toy("a,x\n?,y\n", "cc");
    const auto cc = complete_cases(ds);
    CHECK(cc.rows() == 1);
    CHECK(cc.origin(0) == 0);
    const auto full = test::toy("a,x\nb,y\n", "cc");
    CHECK(complete_cases(full) == full);
    CHECK_THROWS_AS(complete_cases(test::toy("?,x\n", "cc")), EmptyDataError);

    const auto cvrs = test::load_cvrs();
    CHECK(complete_cases(cvrs).rows() == 232);
}

TEST_CASE("mutators keep mask and cells consistent") {
    auto ds = test::toy("a,1,x\nb,2,y\n", "cnc");
    ds.set_missing(0, 1);
    CHECK(ds.mask()(0, 1));
    CHECK(std::isnan(ds.cell(0, 1)));
    ds.set_value(0, 1, 4.0);
    CHECK_FALSE(ds.mask()(0, 1));
    ds.set_cell(1, 0, kMissingCell);
    CHECK(ds.is_missing(1, 0));
    ds.validate();
    CHECK_THROWS_AS(ds.set_category(0, 0, 5), InvalidArgument);
}

TEST_CASE("columnar format round-trips datasets exactly") {
    const auto adult = test::load_adult();
    std::stringstream buf;
    write_columnar(buf, adult);
    const auto back = read_columnar(buf);
    CHECK(back == adult);
    CHECK(back.schema() == adult.schema());
    CHECK(back.origin() == adult.origin());

    const auto tricky = test::toy("a b,0.1,x\n?,1e300,y\n", "cnc");
    std::stringstream buf2;
    write_columnar(buf2, tricky);
    CHECK(read_columnar(buf2) == tricky);
}

TEST_CASE("UCI write then load round-trips") {
    const auto cvrs = test::load_cvrs();
    std::stringstream buf;
    write_uci(buf, cvrs, cvrs_format());
    const auto back = read_uci(buf, cvrs_format());
    CHECK(back == cvrs);
}

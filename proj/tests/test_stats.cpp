#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quadrature.hpp"
#include "shrg/error.hpp"
#include "shrg/stats.hpp"

using namespace shrg;
using namespace shrg::stats;

namespace {

ContingencyTable table(std::vector<std::vector<std::int64_t>> counts) {
    ContingencyTable t;
    t.rows = {"esfl", "english"};
    for (std::size_t j = 0; j < counts[0].size(); ++j)
        t.cols.push_back("c" + std::to_string(j));
    t.counts = std::move(counts);
    return t;
}

} // namespace

TEST_CASE("chi-square closed form") {
    auto r = chi_square_independence(table({{10, 20}, {20, 10}}));
    CHECK(std::fabs(r.statistic - 20.0 / 3.0) < 1e-9);
    CHECK(std::fabs(r.statistic - 6.666667) < 1e-6);
    CHECK(*r.df == 1);
    CHECK(std::fabs(r.p_value - std::erfc(std::sqrt(r.statistic / 2))) < 1e-12);
    auto same = chi_square_independence(table({{5, 7, 9}, {5, 7, 9}}));
    CHECK(same.statistic == 0);
    CHECK(same.p_value == 1);
}

TEST_CASE("chi-square invariances") {
    auto base = table({{12, 30, 7, 44}, {20, 18, 9, 31}});
    auto r = chi_square_independence(base);
    auto perm = table({{44, 7, 12, 30}, {31, 9, 20, 18}});
    CHECK(chi_square_independence(perm).statistic == doctest::Approx(r.statistic).epsilon(1e-12));
    auto swapped = table({{20, 18, 9, 31}, {12, 30, 7, 44}});
    CHECK(chi_square_independence(swapped).statistic == doctest::Approx(r.statistic).epsilon(1e-12));
    auto scaled = table({{36, 90, 21, 132}, {60, 54, 27, 93}});
    auto s = chi_square_independence(scaled);
    CHECK(s.statistic == doctest::Approx(3 * r.statistic).epsilon(1e-12));
    CHECK(*s.df == *r.df);
}

TEST_CASE("chi-square errors") {
    CHECK_THROWS_AS(chi_square_independence(table({{1}, {2}})), StatsError);
    CHECK_THROWS_AS(chi_square_independence(table({{0, 0}, {2, 3}})), StatsError);
    CHECK_THROWS_AS(chi_square_independence(table({{0, 4}, {0, 3}})), StatsError);
}

TEST_CASE("expected frequency filter") {
    auto all = table({{100, 100}, {100, 100}});
    CHECK(expected_frequency_filter(all).cols == all.cols);
    auto sparse = table({{500, 1, 400}, {500, 1, 400}});
    auto f = expected_frequency_filter(sparse);
    CHECK(f.cols == std::vector<std::string>{"c0", "c2"});
    CHECK(f.counts[1] == std::vector<std::int64_t>{500, 400});
    // (1, 8): per-cell expectations 4.5, 4.5 pass, a (0, 8) column does not
    auto edge = table({{100, 1, 0}, {100, 8, 8}});
    CHECK(expected_frequency_filter(edge).cols.size() == 2);
    CHECK(expected_frequency_filter(edge, 4, FilterRule::kColumnTotal).cols.size() == 3);
    CHECK_THROWS_AS(expected_frequency_filter(table({{1, 1}, {1, 1}})), StatsError);
}

TEST_CASE("p-values match Gauss-Legendre integration") {
    const double dfs[] = {1, 5, 42};
    const double xs[] = {0.1, 0.5, 1, 2, 5, 10, 20, 40, 60, 80};
    double worst = 0;
    for (double df : dfs)
        for (double x : xs) {
            CAPTURE(df);
            CAPTURE(x);
            double chi = std::fabs(chi2_sf(x, df) - oracle::chi2_upper(x, df));
            double tt = std::fabs(t_two_sided(x, df) - oracle::t_two_sided(x, df));
            CHECK(chi < 1e-8);
            CHECK(tt < 1e-8);
            worst = std::max({worst, chi, tt});
        }
    MESSAGE("worst deviation " << worst);
    for (double x : xs)
        CHECK(std::fabs(normal_sf(x) - oracle::normal_upper(x)) < 1e-12);
}

TEST_CASE("special function identities") {
    CHECK(gamma_p(2.5, 3.0) + gamma_q(2.5, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_q(1, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(beta_inc(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(beta_inc(2, 3, 0.4) + beta_inc(3, 2, 0.6) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-10));
    CHECK(t_two_sided(0, 7) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gamma_p(-1, 1), StatsError);
    CHECK_THROWS_AS(normal_quantile(1.0), StatsError);
}

TEST_CASE("t and z tests") {
    std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
    auto w = t_test(a, b, TVariant::kWelch);
    CHECK(std::fabs(w.statistic + 1.0) < 1e-12);
    CHECK(*w.df == doctest::Approx(8.0));
    CHECK(w.p_value == doctest::Approx(beta_inc(4, 0.5, 8.0 / 9.0)).epsilon(1e-12));
    CHECK(std::fabs(t_test(a, b, TVariant::kStudent).statistic + 1.0) < 1e-12);
    auto same = t_test(a, a, TVariant::kWelch);
    CHECK(same.statistic == 0);
    CHECK(same.p_value == 1);
    CHECK(t_test(a, a, TVariant::kStudent).p_value == 1);
    auto zsame = z_test(a, a);
    CHECK(zsame.statistic == 0);
    CHECK(zsame.p_value == 1);
    auto paired_same = t_test(a, a, TVariant::kPaired);
    CHECK(paired_same.statistic == 0);
    CHECK(paired_same.p_value == 1);
    auto shifted = t_test(b, a, TVariant::kPaired);
    CHECK(std::isinf(shifted.statistic));
    CHECK(shifted.statistic > 0);
    CHECK(shifted.p_value == 0);
    std::vector<double> c{0.3, 0.9, 0.4, 0.8}, d{0.5, 0.1, 0.7, 0.2, 0.6};
    CHECK(z_test(c, d).statistic == doctest::Approx(-z_test(d, c).statistic));
    CHECK(z_test(c, d).statistic == doctest::Approx(t_test(c, d, TVariant::kWelch).statistic));
    CHECK_THROWS_AS(t_test({1}, a, TVariant::kWelch), StatsError);
    CHECK_THROWS_AS(t_test(a, {1, 2, 3}, TVariant::kPaired), StatsError);
}

TEST_CASE("describe") {
    auto one = describe({0.5});
    CHECK(one.mean == 0.5);
    CHECK(one.median == 0.5);
    CHECK(one.max == 0.5);
    CHECK(one.min == 0.5);
    CHECK(one.sd == 0);
    CHECK_FALSE(one.sd_defined);
    auto four = describe({4, 1, 3, 2});
    CHECK(four.mean == 2.5);
    CHECK(four.median == 2.5);
    CHECK(four.sd == doctest::Approx(1.290994448735806).epsilon(1e-14));
    CHECK(describe({3, 1, 2}).median == 2);
    CHECK_THROWS_AS(describe({}), StatsError);
}

TEST_CASE("percent agreement") {
    CHECK(percent_agreement({{"accept", "accept"}, {"reject", "reject"}}) == 100.0);
    CHECK(percent_agreement({{"a", "a"}, {"a", "a"}, {"a", "a"}, {"a", "r"}}) == 75.0);
    std::vector<std::vector<std::string>> hundred(100, {"accept", "accept", "accept"});
    hundred[3][1] = hundred[50][2] = hundred[99][0] = "reject";
    CHECK(percent_agreement(hundred) == doctest::Approx(97.0));
    CHECK_THROWS_AS(percent_agreement({}), StatsError);
}

TEST_CASE("ratio intervals") {
    auto eq = ratio_ci(50, 50);
    CHECK(eq.ratio == 1.0);
    CHECK(eq.lo < 1.0);
    CHECK(eq.hi > 1.0);
    CHECK(eq.lo * eq.hi == doctest::Approx(1.0));
    CHECK(ratio_ci(763, 741).ratio == doctest::Approx(1.0297).epsilon(1e-4));
    CHECK(ratio_ci(28, 26).ratio == doctest::Approx(1.0769).epsilon(1e-4));
    auto narrow = ratio_ci(28, 26, 0.10), wide = ratio_ci(28, 26, 0.01);
    CHECK(wide.lo < narrow.lo);
    CHECK(wide.hi > narrow.hi);
    CHECK_THROWS_AS(ratio_ci(0, 3), StatsError);
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "kreg/numeric.hpp"
#include "test_util.hpp"

using namespace kreg;

TEST_CASE("pairwise sum matches naive on well-scaled input") {
    std::vector<double> v;
    double naive = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = test::normal01(1, static_cast<std::uint64_t>(i));
        v.push_back(x);
        naive += x;
    }
    CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-12));
    CHECK(pairwise_mean(v) == doctest::Approx(naive / 1000.0).epsilon(1e-12));
}

TEST_CASE("type-7 quantiles") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(quantile_sorted(x, 0.0) == 1.0);
    CHECK(quantile_sorted(x, 1.0) == 5.0);
    CHECK(quantile_sorted(x, 0.25) == doctest::Approx(2.0));
    CHECK(quantile_sorted(x, 0.75) == doctest::Approx(4.0));
    CHECK(quantile_sorted(x, 0.5) == doctest::Approx(3.0));

    const std::vector<double> y = {1.0, 2.0};
    CHECK(quantile_sorted(y, 0.25) == doctest::Approx(1.25));
}

TEST_CASE("normal quantile round trips through the CDF") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));

    for (int i = 1; i < 40; ++i) {
        const double p = static_cast<double>(i) / 40.0;
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    // Tails.
    CHECK(normal_cdf(normal_quantile(1e-10)) == doctest::Approx(1e-10).epsilon(1e-8));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meanper/growth.hpp"
#include "test_support.hpp"

using namespace meanper;

namespace {

// A tabulated stand-in for x^2 on [0, 12], dense enough for transform checks.
YoungSpec tabulated_square(double r_max = 12.0, int steps = 2400) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= steps; ++i) {
        const double r = r_max * i / steps;
        pts.emplace_back(r, r * r);
    }
    return YoungSpec::tabulated(std::move(pts));
}

} // namespace

TEST_CASE("eval_theta on the catalog kinds") {
    CHECK(eval_theta(YoungSpec::power(2.0), 3.0) == doctest::Approx(9.0));
    CHECK(eval_theta(YoungSpec::linear(), 7.5) == doctest::Approx(7.5));
    CHECK(eval_theta(YoungSpec::power(3.0), 2.0) == doctest::Approx(8.0));

    const auto tab = tabulated_square();
    CHECK(eval_theta(tab, 2.0) == doctest::Approx(4.0).epsilon(1e-5));
    CHECK(eval_theta(tab, 0.0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(eval_theta(YoungSpec::power(2.0), -1.0), DomainError);
    CHECK_THROWS_AS(eval_theta(tabulated_square(1.0, 10), 2.0), DomainError);
}

TEST_CASE("YoungSpec validation") {
    CHECK_THROWS_AS(YoungSpec::power(1.0), DomainError);
    CHECK_THROWS_AS(YoungSpec::power(0.5), DomainError);
    // must start at (0, 0)
    CHECK_THROWS_AS(YoungSpec::tabulated({{1.0, 1.0}, {2.0, 4.0}, {3.0, 9.0}}), DomainError);
    // not convex
    CHECK_THROWS_AS(YoungSpec::tabulated({{0.0, 0.0}, {1.0, 5.0}, {2.0, 6.0}, {3.0, 6.5}}),
                    DomainError);
    // decreasing
    CHECK_THROWS_AS(YoungSpec::tabulated({{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}}), DomainError);
}

TEST_CASE("legendre transform against the dense-grid oracle") {
    const auto sq = YoungSpec::power(2.0);
    CHECK(legendre(sq, 0.0) == doctest::Approx(0.0));

    // Frozen from the oracle: max of t x - t^2 sits at t = x/2 with value x^2/4.
    const double oracle_at_2 = oracle::grid_legendre([](double t) { return t * t; }, 2.0, 10.0);
    CHECK(oracle_at_2 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(legendre(sq, 2.0) == doctest::Approx(1.0).epsilon(1e-10));

    const double oracle_at_4 = oracle::grid_legendre([](double t) { return t * t; }, 4.0, 10.0);
    CHECK(oracle_at_4 == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(legendre(sq, 4.0) == doctest::Approx(4.0).epsilon(1e-10));

    for (double x : {0.3, 1.0, 2.7, 5.0, 9.0}) {
        const double want = oracle::grid_legendre([](double t) { return std::pow(t, 3.0); }, x, 12.0);
        CHECK(legendre(YoungSpec::power(3.0), x) == doctest::Approx(want).epsilon(1e-6));
    }

    CHECK_THROWS_AS(legendre(YoungSpec::linear(), 1.0), LinearCaseError);
}

TEST_CASE("legendre is nondecreasing and convex on sampled abscissae") {
    const auto theta = YoungSpec::power(2.5);
    std::vector<double> xs, ys;
    for (int i = 0; i <= 40; ++i) {
        xs.push_back(0.25 * i);
        ys.push_back(legendre(theta, xs.back()));
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(ys[i] >= ys[i - 1] - 1e-9);
    }
    for (std::size_t i = 2; i < xs.size(); ++i) {
        const double s0 = (ys[i - 1] - ys[i - 2]) / (xs[i - 1] - xs[i - 2]);
        const double s1 = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        CHECK(s1 >= s0 - 1e-7);
    }
}

TEST_CASE("Young-Fenchel inequality on sampled pairs") {
    for (const auto& theta : {YoungSpec::power(2.0), YoungSpec::power(3.0), tabulated_square()}) {
        for (double t : {0.0, 0.4, 1.0, 2.3, 5.0, 8.0}) {
            for (double x : {0.0, 0.5, 1.5, 3.0, 6.0}) {
                const double lhs = t * x;
                const double rhs = eval_theta(theta, t) + legendre(theta, x);
                CHECK(lhs <= rhs + 1e-8 * (1.0 + rhs));
            }
        }
    }
}

TEST_CASE("double transform recovers the power kind") {
    // theta = x^p; theta* sampled into a table; its transform ~ theta.
    for (double p : {2.0, 3.0}) {
        const auto theta = YoungSpec::power(p);
        std::vector<std::pair<double, double>> star_pts;
        const double r_max = 50.0; // beyond the maximizer p x^{p-1} for every tested x
        const int steps = 50000;
        for (int i = 0; i <= steps; ++i) {
            const double x = r_max * i / steps;
            star_pts.emplace_back(x, legendre(theta, x));
        }
        const auto star = YoungSpec::tabulated(std::move(star_pts));
        for (double x : {0.6, 1.0, 1.7, 2.5, 3.4}) {
            const double twice = legendre(star, x);
            CHECK(twice == doctest::Approx(eval_theta(theta, x)).epsilon(1e-6));
        }
    }
}

TEST_CASE("convexity halving bound") {
    for (const auto& theta : {YoungSpec::power(2.0), YoungSpec::power(3.0), tabulated_square()}) {
        for (double p : {0.25, 0.5, 1.0}) {
            for (int n = 0; n <= 3; ++n) {
                const double lo = p * std::pow(2.0, n);
                if (2.0 * lo > theta.domain_max()) {
                    continue;
                }
                CHECK(eval_theta(theta, lo) <= 0.5 * eval_theta(theta, 2.0 * lo) + 1e-10);
            }
        }
    }
}

TEST_CASE("theta_norm over samples") {
    using P = std::pair<cplx, cplx>;
    CHECK(theta_norm({P{{0.0, 0.0}, {5.0, 0.0}}}, YoungSpec::power(2.0), 1.0) == doctest::Approx(5.0));
    CHECK(theta_norm({P{{1.0, 0.0}, {std::exp(1.0), 0.0}}}, YoungSpec::linear(), 1.0) ==
          doctest::Approx(1.0));
    // e^{-4} < 0.5, so the origin sample dominates.
    CHECK(theta_norm({P{{2.0, 0.0}, {1.0, 0.0}}, P{{0.0, 0.0}, {0.5, 0.0}}}, YoungSpec::power(2.0),
                     1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(theta_norm({}, YoungSpec::linear(), 1.0), DomainError);
}

TEST_CASE("fit_growth_bound selection rules") {
    const auto exhaustive = [](const std::vector<std::pair<double, double>>& pts,
                               const YoungSpec& theta, double m) {
        double A = -1e300;
        for (const auto& [r, y] : pts) {
            A = std::max(A, y - eval_theta(theta, m * r));
        }
        return A;
    };

    {
        const auto fit = fit_growth_bound({{1.0, 1.0}, {2.0, 2.0}}, YoungSpec::linear(), {1.0});
        REQUIRE(fit.has_value());
        CHECK(fit->m == doctest::Approx(1.0));
        CHECK(fit->A == doctest::Approx(0.0));
    }
    {
        const std::vector<std::pair<double, double>> pts{{1.0, 3.0}, {2.0, 5.0}};
        CHECK(exhaustive(pts, YoungSpec::linear(), 1.0) == doctest::Approx(3.0));
        CHECK(exhaustive(pts, YoungSpec::linear(), 2.0) == doctest::Approx(1.0));
        const auto fit = fit_growth_bound(pts, YoungSpec::linear(), {1.0, 2.0});
        REQUIRE(fit.has_value());
        CHECK(fit->m == doctest::Approx(2.0));
        CHECK(fit->A == doctest::Approx(1.0));
    }
    {
        const auto fit = fit_growth_bound({{0.0, 0.0}}, YoungSpec::power(2.0), {1.0});
        REQUIRE(fit.has_value());
        CHECK(fit->m == doctest::Approx(1.0));
        CHECK(fit->A == doctest::Approx(0.0));
    }
    {
        // Tabulated range forces larger scales out; smallest admissible m wins.
        const auto tab = tabulated_square(4.0, 200);
        const auto fit = fit_growth_bound({{2.0, 1.0}}, tab, {1.0, 2.0, 5.0});
        REQUIRE(fit.has_value());
        CHECK(fit->m == doctest::Approx(1.0));
        const auto none = fit_growth_bound({{2.0, 1.0}}, tab, {5.0});
        CHECK(!none.has_value());
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "meanper/newton.hpp"
#include "test_support.hpp"

using namespace meanper;

namespace {

MultiplicityVariety simple_nodes(std::initializer_list<cplx> locs) {
    std::vector<ZeroPoint> pts;
    for (const cplx z : locs) {
        pts.push_back(ZeroPoint{z, 1});
    }
    return MultiplicityVariety::sorted(std::move(pts));
}

// The all-simple divided-difference product formula, summed directly.
cplx simple_zero_formula(const MultiplicityVariety& V, std::size_t k,
                         const std::vector<cplx>& a) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j <= k; ++j) {
        cplx denom{1.0, 0.0};
        for (std::size_t n = 0; n <= k; ++n) {
            if (n != j) {
                denom *= V[j].location - V[n].location;
            }
        }
        acc += a[j] / denom;
    }
    return acc;
}

} // namespace

TEST_CASE("psi_forward on simple nodes matches the product-formula oracle") {
    const auto V = simple_nodes({{0.0, 0.0}, {1.0, 0.0}});
    ValueSet a{{{cplx{0.7, 0.2}}, {cplx{-0.3, 0.4}}}};
    const auto table = psi_forward(V, a);
    CHECK(std::abs(table.at(0, 0) - a.at(0, 0)) < 1e-15);
    // b_1 = a_1 - a_0 for nodes 0, 1
    CHECK(std::abs(table.at(1, 0) - (a.at(1, 0) - a.at(0, 0))) < 1e-15);
    CHECK(std::abs(table.at(1, 0) - simple_zero_formula(V, 1, {a.at(0, 0), a.at(1, 0)})) < 1e-14);
}

TEST_CASE("single confluent node copies its jet") {
    const auto V = MultiplicityVariety::sorted({ZeroPoint{{0.5, -0.2}, 3}});
    ValueSet a{{{cplx{1.0, 0.0}, cplx{2.0, 0.0}, cplx{3.0, 0.0}}}};
    const auto table = psi_forward(V, a);
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(std::abs(table.at(0, l) - a.at(0, l)) < 1e-15);
    }
}

TEST_CASE("degree-1 interpolant of xi^2 on nodes 1, -1") {
    const auto V = simple_nodes({{1.0, 0.0}, {-1.0, 0.0}});
    // f(xi) = xi^2: f(1) = 1, f(-1) = 1
    ValueSet a{{{cplx{1.0, 0.0}}, {cplx{1.0, 0.0}}}};
    const auto table = psi_forward(V, a);
    CHECK(std::abs(table.at(0, 0) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(table.at(1, 0)) < 1e-15);
    // interpolant matches xi^2 at both nodes
    CHECK(std::abs(newton_eval(V, table, 1, {1.0, 0.0}) - cplx{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(newton_eval(V, table, 1, {-1.0, 0.0}) - cplx{1.0, 0.0}) < 1e-14);
}

TEST_CASE("newton_eval basics") {
    {
        const auto V = simple_nodes({{0.0, 0.0}});
        DividedDifferenceTable t;
        t.rows = {{cplx{5.0, 0.0}}};
        CHECK(std::abs(newton_eval(V, t, 0, {123.0, -4.0}) - cplx{5.0, 0.0}) < 1e-15);
    }
    {
        // one double node at 0, b = (1, 2): Q(xi) = 1 + 2 xi, Q(3) = 7
        const auto V = MultiplicityVariety::sorted({ZeroPoint{{0.0, 0.0}, 2}});
        DividedDifferenceTable t;
        t.rows = {{cplx{1.0, 0.0}, cplx{2.0, 0.0}}};
        CHECK(std::abs(newton_eval(V, t, 0, {3.0, 0.0}) - cplx{7.0, 0.0}) < 1e-15);
        CHECK(std::abs(newton_eval(V, t, 0, {3.0, 0.0}, 1) - cplx{2.0, 0.0}) < 1e-15);
    }
    CHECK_THROWS_AS(newton_eval(simple_nodes({{0.0, 0.0}}), DividedDifferenceTable{}, 0, {0, 0}),
                    IndexError);
}

TEST_CASE("round trip psi_inverse . psi_forward on random varieties") {
    std::mt19937 rng(20240817u);
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto V = oracle::random_variety(rng, {});
        ValueSet a{V, V.size()};
        double scale = 0.0;
        for (std::size_t k = 0; k < V.size(); ++k) {
            for (std::size_t l = 0; l < a.width(k); ++l) {
                a.at(k, l) = oracle::random_unit_complex(rng);
                scale = std::max(scale, std::abs(a.at(k, l)));
            }
        }
        const auto table = psi_forward(V, a);
        const auto back = psi_inverse(V, table);
        for (std::size_t k = 0; k < V.size(); ++k) {
            for (std::size_t l = 0; l < a.width(k); ++l) {
                worst = std::max(worst, std::abs(back.at(k, l) - a.at(k, l)) / scale);
            }
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("Hermite property against the direct linear-system oracle") {
    std::mt19937 rng(77140u);
    for (int trial = 0; trial < 20; ++trial) {
        const auto V = oracle::random_variety(rng, {.max_nodes = 6});
        std::vector<std::vector<cplx>> rows(V.size());
        for (std::size_t k = 0; k < V.size(); ++k) {
            rows[k].resize(static_cast<std::size_t>(V[k].multiplicity));
            for (auto& v : rows[k]) {
                v = oracle::random_unit_complex(rng);
            }
        }
        const auto table = psi_forward(V, ValueSet{rows});
        const auto system = oracle::solve_hermite_system(V, rows);
        // the two polynomials agree at off-node sample points
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int s = 0; s < 8; ++s) {
            const cplx x{5.0 * unit(rng), 5.0 * unit(rng)};
            const cplx mine = newton_eval(V, table, V.size() - 1, x);
            const cplx theirs = system.eval_scaled_derivative(x, 0);
            CHECK(std::abs(mine - theirs) < 1e-7 * (1.0 + std::abs(theirs)));
        }
        // and reproduce the prescribed jets
        for (std::size_t k = 0; k < V.size(); ++k) {
            for (std::size_t l = 0; l < rows[k].size(); ++l) {
                const cplx got = newton_eval(V, table, V.size() - 1, V[k].location, l);
                CHECK(std::abs(got - rows[k][l]) < 1e-7);
            }
        }
    }
}

TEST_CASE("psi_inverse of zeros and of psi_forward") {
    const auto V = simple_nodes({{0.0, 0.0}, {1.0, 0.0}});
    {
        DividedDifferenceTable t;
        t.rows = {{cplx{0.0, 0.0}}, {cplx{0.0, 0.0}}};
        const auto a = psi_inverse(V, t);
        CHECK(std::abs(a.at(0, 0)) < 1e-15);
        CHECK(std::abs(a.at(1, 0)) < 1e-15);
    }
    {
        // b = (1, 1): Q(xi) = 1 + xi, values at 0 and 1 are 1 and 2
        DividedDifferenceTable t;
        t.rows = {{cplx{1.0, 0.0}}, {cplx{1.0, 0.0}}};
        const auto a = psi_inverse(V, t);
        CHECK(std::abs(a.at(0, 0) - cplx{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(a.at(1, 0) - cplx{2.0, 0.0}) < 1e-15);
    }
}

TEST_CASE("coincident nodes underflow") {
    // Distinct but astronomically close nodes (same modulus, argument apart
    // by 1e-170) with weight 2 underflow Pi.
    std::vector<ZeroPoint> pts{ZeroPoint{{1.0, 0.0}, 2}, ZeroPoint{{1.0, 1e-170}, 1}};
    const MultiplicityVariety V{std::move(pts)};
    ValueSet a{{{cplx{1, 0}, cplx{0, 0}}, {cplx{1, 0}}}};
    CHECK_THROWS_AS(psi_forward(V, a), CoincidentNodesError);
}

TEST_CASE("condition estimate is attached and flags blowups") {
    std::mt19937 rng(5u);
    const auto V = oracle::random_variety(rng, {.max_nodes = 8});
    ValueSet a{V, V.size()};
    for (std::size_t k = 0; k < V.size(); ++k) {
        for (std::size_t l = 0; l < a.width(k); ++l) {
            a.at(k, l) = oracle::random_unit_complex(rng);
        }
    }
    const auto table = psi_forward(V, a);
    CHECK(table.condition >= 0.0);
    CHECK(!table.flagged); // benign spacing stays far from 1e12
}

TEST_CASE("expansion_poly closed forms") {
    {
        // simple zeros alpha = (1, -1): P_{1,0,0} = 1/(alpha_0 - alpha_1) = 1/2
        const auto V = simple_nodes({{1.0, 0.0}, {-1.0, 0.0}});
        const auto p = expansion_poly(V, 1, 0, 0);
        REQUIRE(p.size() == 1);
        CHECK(std::abs(p[0] - cplx{0.5, 0.0}) < 1e-15);
    }
    {
        // k = j = l = 0: empty products give the constant 1
        const auto V = simple_nodes({{0.3, 0.4}});
        const auto p = expansion_poly(V, 0, 0, 0);
        REQUIRE(p.size() == 1);
        CHECK(std::abs(p[0] - cplx{1.0, 0.0}) < 1e-15);
    }
    {
        // V = {(0,2),(1,1)}: P_{1,0,0}(z) = -1 - z
        const auto V = MultiplicityVariety::sorted({ZeroPoint{{0.0, 0.0}, 2}, ZeroPoint{{1.0, 0.0}, 1}});
        const auto p = expansion_poly(V, 1, 0, 0);
        REQUIRE(p.size() == 2);
        CHECK(std::abs(p[0] - cplx{-1.0, 0.0}) < 1e-14);
        CHECK(std::abs(p[1] - cplx{-1.0, 0.0}) < 1e-14);
    }
    CHECK_THROWS_AS(expansion_poly(simple_nodes({{0.0, 0.0}}), 0, 0, 1), IndexError);
    CHECK_THROWS_AS(expansion_poly(simple_nodes({{0.0, 0.0}}), 1, 0, 0), IndexError);
}

TEST_CASE("degree bound of the expansion polynomials") {
    std::mt19937 rng(4242u);
    for (int trial = 0; trial < 10; ++trial) {
        const auto V = oracle::random_variety(rng, {.max_nodes = 6});
        for (std::size_t k = 0; k < V.size(); ++k) {
            for (std::size_t j = 0; j <= k; ++j) {
                for (std::size_t l = 0; l < static_cast<std::size_t>(V[k].multiplicity); ++l) {
                    const auto p = expansion_poly(V, k, j, l);
                    if (j < k) {
                        CHECK(p.size() == static_cast<std::size_t>(V[j].multiplicity));
                    } else {
                        CHECK(p.size() == l + 1);
                        CHECK(p.size() <= static_cast<std::size_t>(V[k].multiplicity));
                    }
                }
            }
        }
    }
}

TEST_CASE("divided differences of the exponential kernel") {
    {
        // k = 0: b_{0,0}(z) = e^{z alpha_0}
        const auto V = simple_nodes({{0.4, -0.3}});
        const cplx z{0.7, 0.1};
        CHECK(std::abs(divided_diff_exponential(V, 0, 0, z) - std::exp(z * V[0].location)) < 1e-14);
    }
    {
        // nodes (1, -1): b_1(z) = (e^z - e^{-z}) / 2
        const auto V = simple_nodes({{1.0, 0.0}, {-1.0, 0.0}});
        for (const cplx z : {cplx{0.5, 0.0}, cplx{-0.2, 1.1}, cplx{2.0, -0.7}}) {
            const cplx want = 0.5 * (std::exp(z) - std::exp(-z));
            CHECK(std::abs(divided_diff_exponential(V, 1, 0, z) - want) < 1e-13 * (1.0 + std::abs(want)));
        }
    }
    {
        // z = 0 on nodes (0, 1): the constant function has b = (1, 0)
        const auto V = simple_nodes({{0.0, 0.0}, {1.0, 0.0}});
        CHECK(std::abs(divided_diff_exponential(V, 0, 0, {0.0, 0.0}) - cplx{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(divided_diff_exponential(V, 1, 0, {0.0, 0.0})) < 1e-15);
    }
}

TEST_CASE("closed form vs forward recursion for the exponential kernel") {
    // The two routes agree to 1e-8 relative to the packet's own summand
    // scale; far below it the sum has cancelled past what any hardware
    // precision can resolve, so the plain relative check applies only while
    // the value stays above that scale.
    std::mt19937 rng(909090u);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const auto V = oracle::random_variety(rng, {.max_nodes = 9});
        const cplx z{3.0 * unit(rng), 3.0 * unit(rng)};
        const auto table = exponential_divided_differences(V, V.size(), z);
        for (std::size_t k = 0; k < V.size(); ++k) {
            for (std::size_t l = 0; l < static_cast<std::size_t>(V[k].multiplicity); ++l) {
                const auto closed = divided_diff_exponential_closed(V, k, l, z);
                const cplx rec = table.rows[k][l];
                const double denom = std::max(std::abs(rec), closed.term_scale * 1e-6);
                worst = std::max(worst, std::abs(closed.value - rec) / std::max(1e-300, denom));
            }
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("table CSV export") {
    const auto V = simple_nodes({{0.0, 0.0}, {1.0, 0.0}});
    ValueSet a{{{cplx{1.0, 0.0}}, {cplx{2.0, 0.0}}}};
    const auto table = psi_forward(V, a);
    std::ostringstream out;
    write_csv(out, table);
    CHECK(out.str() == "k,l,re_b,im_b,condition_flag\n"
                       "0,0,1,0,0\n"
                       "1,0,1,0,0\n");
}

TEST_CASE("PiProduct jets vanish at earlier nodes") {
    const auto V = MultiplicityVariety::sorted(
        {ZeroPoint{{0.0, 0.0}, 2}, ZeroPoint{{1.0, 0.0}, 1}, ZeroPoint{{0.0, 2.0}, 1}});
    const PiProduct pi2(V, 2);
    for (std::size_t n = 0; n <= 2; ++n) {
        CHECK(std::abs(pi2.value(V[n].location)) < 1e-15);
    }
    const auto jet = pi2.jet({0.5, 0.5}, 3);
    // cross-check the jet head against the direct value
    CHECK(std::abs(jet[0] - pi2.value({0.5, 0.5})) < 1e-14);
}

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "tcond/coeff_dist.hpp"
#include "tcond/errors.hpp"
#include "tcond/poly.hpp"

using tcond::Complex;
using tcond::KacPolynomial;

namespace {

KacPolynomial poly(std::vector<double> c) { return KacPolynomial(std::move(c)); }

}  // namespace

TEST_SUITE_BEGIN("poly");

TEST_CASE("evaluation matches hand sums") {
    CHECK(tcond::evaluate(poly({1, 1, 1}), Complex(1.0)) == Complex(3.0));
    CHECK(tcond::evaluate(poly({1, 1, 1}), Complex(-1.0)) == Complex(1.0));
}

TEST_CASE("evaluation matches the naive power-sum oracle at degree 50") {
    const auto c = oracle::std_gaussian_coeffs(51, 101);
    const KacPolynomial p(c);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double radius = 1.1 * (k + 1) / 100.0;
        const Complex z = std::polar(radius, 0.17 + 6.1 * k / 100.0);
        const Complex lib = tcond::evaluate(p, z);
        const Complex ref = oracle::naive_eval(c, z);
        worst = std::max(worst, std::abs(lib - ref) / std::max(1.0, std::abs(ref)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("radial scale closed forms at r = 1") {
    const auto rs = tcond::radial_scale(10, 1.0);
    CHECK(rs.sum == 11.0);
    CHECK(rs.dlog1 == 10.0);
    CHECK(rs.dlog2 == doctest::Approx(10.0 * 9.0 / 3.0).epsilon(1e-13));
    CHECK(rs.sigma == doctest::Approx(std::sqrt(11.0)).epsilon(1e-15));
}

TEST_CASE("radial scale stays comparable to n inside the lemma window") {
    const int n = 1000;
    const double off = std::pow(static_cast<double>(n), -1.1);
    for (double radius : {1.0 - off, 1.0, 1.0 + off}) {
        const auto rs = tcond::radial_scale(n, radius);
        CHECK(rs.sum >= std::exp(-4.0) * n);
        CHECK(rs.sum <= std::exp(2.0) * n);
    }
}

TEST_CASE("normalized evaluation divides by sigma") {
    CHECK(tcond::evaluate_normalized(poly({1}), 1.0, 0.7) == Complex(1.0));
    const Complex v = tcond::evaluate_normalized(poly({1, 1}), 1.0, 0.0);
    CHECK(std::abs(v - Complex(std::numbers::sqrt2)) <= 1e-15);
}

TEST_CASE("normalized second moment is one on average") {
    const auto dist = tcond::CoefficientDistribution::rademacher();
    const int n = 64;
    double acc = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const KacPolynomial p(tcond::sample(dist, n + 1, 2024, static_cast<std::uint64_t>(t)));
        acc += std::norm(tcond::evaluate_normalized(p, 1.0, std::numbers::pi / 3.0));
    }
    acc /= trials;
    CHECK(acc >= 0.95);
    CHECK(acc <= 1.05);
}

TEST_CASE("closed-form roots are recovered") {
    const auto r1 = tcond::find_roots(poly({-0.25, 0.0, 1.0}));
    REQUIRE(r1.size() == 2);
    CHECK(std::abs(r1[0] - Complex(-0.5)) <= 1e-12);
    CHECK(std::abs(r1[1] - Complex(0.5)) <= 1e-12);

    const auto r2 = tcond::find_roots(poly({-1.0, 0.0, 0.0, 1.0}));
    REQUIRE(r2.size() == 3);
    for (const Complex& z : r2) {
        CHECK(std::abs(std::abs(z) - 1.0) <= 1e-10);
        CHECK(std::abs(z * z * z - Complex(1.0)) <= 1e-9);
    }
}

TEST_CASE("degree-30 draw satisfies the residual contract and Vieta's product") {
    const auto c = oracle::std_rademacher_coeffs(31, 7);
    const auto roots = tcond::find_roots(KacPolynomial(c), 1e-9);
    REQUIRE(roots.size() == 30);

    double worst = 0.0;
    long double prod = 1.0L;
    for (const Complex& z : roots) {
        worst = std::max(worst, oracle::scaled_residual(c, z));
        prod *= std::abs(Complex(z));
    }
    CHECK(worst <= 1e-9);
    const double vieta = oracle::vieta_product_abs(c);
    CHECK(std::abs(static_cast<double>(prod) - vieta) <= 1e-8 * vieta);
}

TEST_CASE("root multiset is invariant under coefficient scaling") {
    for (int trial = 0; trial < 50; ++trial) {
        const int degree = 3 + trial % 10;
        auto c = oracle::std_gaussian_coeffs(static_cast<std::size_t>(degree) + 1,
                                             500 + static_cast<unsigned>(trial));
        if (c.back() == 0.0) c.back() = 1.0;
        auto scaled = c;
        for (double& x : scaled) x *= 7.3;
        const auto a = tcond::find_roots(KacPolynomial(c));
        const auto b = tcond::find_roots(KacPolynomial(scaled));
        REQUIRE(a.size() == b.size());
        // The contract covers the root multiset, not the output order: the
        // scaled coefficients round differently, which may permute the result.
        for (const Complex& root : a) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const Complex& other : b) nearest = std::min(nearest, std::abs(root - other));
            CHECK(nearest <= 1e-10 * (1.0 + std::abs(root)));
        }
    }
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(tcond::find_roots(poly({1.0})), std::invalid_argument);
    CHECK_THROWS_AS(tcond::find_roots(poly({1.0, 2.0, 0.0})), tcond::ZeroLeadingCoefficient);
    CHECK_THROWS_AS(tcond::find_roots(poly({1.0, 1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("regression: huge stray roots from tiny leading coefficients") {
    // Degree-256 Gaussian draws whose leading coefficient is small enough to
    // push one true root out to |z| ~ 25-40, where naive evaluation of
    // |z|^256 overflows.  These draws previously failed the residual
    // contract; the reversed-frame evaluation must localize them.
    const auto dist = tcond::CoefficientDistribution::gaussian();
    for (std::uint64_t stream : {11u, 47u, 155u, 196u, 219u, 277u, 385u}) {
        const auto c = tcond::sample(dist, 257, 2, stream);
        REQUIRE(c.back() != 0.0);
        const auto roots = tcond::find_roots(KacPolynomial(c), 1e-9);
        REQUIRE(roots.size() == 256);
        double worst = 0.0;
        for (const Complex& z : roots) worst = std::max(worst, oracle::scaled_residual(c, z));
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("root census arithmetic") {
    const auto prof = tcond::classify_roots({Complex(0.5), Complex(-0.5)}, 1e-9);
    CHECK(prof.inside == 2);
    CHECK(prof.on_circle == 0);
    CHECK(prof.outside == 0);
    CHECK(prof.max_inside == 0.5);
    CHECK(std::isinf(prof.min_outside));

    const auto mixed = tcond::classify_roots({Complex(0.5), Complex(1.0), Complex(2.0)}, 1e-9);
    CHECK(mixed.inside == 1);
    CHECK(mixed.on_circle == 1);
    CHECK(mixed.outside == 1);
    CHECK(mixed.nearest_gap == 0.0);

    CHECK_THROWS_AS(tcond::classify_roots({Complex(0.5)}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tcond::classify_roots({Complex(0.5)}, 0.2), std::invalid_argument);
}

TEST_CASE("census counts always partition the degree") {
    for (unsigned trial = 0; trial < 20; ++trial) {
        const auto c = oracle::std_gaussian_coeffs(13, 900 + trial);
        const auto roots = tcond::find_roots(KacPolynomial(c));
        const auto prof = tcond::classify_roots(roots, 1e-6);
        CHECK(prof.inside + prof.on_circle + prof.outside == static_cast<int>(roots.size()));
        CHECK(prof.nearest_gap >= 0.0);
    }
}

TEST_CASE("continuous draws never touch the unit circle") {
    for (unsigned trial = 0; trial < 100; ++trial) {
        const auto c = oracle::std_gaussian_coeffs(51, 1300 + trial);
        const auto prof = tcond::classify_roots(tcond::find_roots(KacPolynomial(c)), 1e-9);
        CHECK(prof.on_circle == 0);
        CHECK(prof.nearest_gap > 0.0);
    }
}

TEST_CASE("sign-coefficient circle contacts are exactly roots of unity") {
    // +-1 polynomials touch |z| = 1 only through cyclotomic factors, so every
    // on-circle root must satisfy z^k = 1 for a small k; most draws are clean.
    int clean = 0;
    for (unsigned trial = 0; trial < 100; ++trial) {
        const auto c = oracle::std_rademacher_coeffs(51, 1300 + trial);
        const auto roots = tcond::find_roots(KacPolynomial(c));
        const auto prof = tcond::classify_roots(roots, 1e-9);
        if (prof.on_circle == 0 && prof.nearest_gap > 0.0) {
            ++clean;
            continue;
        }
        for (const Complex& z : roots) {
            if (std::abs(std::abs(z) - 1.0) > 1e-9) continue;
            double nearest_unity = std::numeric_limits<double>::infinity();
            Complex power(1.0);
            for (int k = 1; k <= 12; ++k) {
                power *= z;
                nearest_unity = std::min(nearest_unity, std::abs(power - Complex(1.0)));
            }
            CHECK(nearest_unity <= 1e-10);
        }
    }
    CHECK(clean >= 80);
}

TEST_CASE("algebraic winding on hand-checkable symbols") {
    const auto sym1 = tcond::make_symbol(1, 1, {-0.25, 0.0, 1.0});  // Q = z^2 - 1/4
    const auto prof1 =
        tcond::classify_roots(tcond::find_roots(tcond::symbol_numerator(sym1)), 1e-9);
    CHECK(tcond::winding_algebraic(sym1, prof1) == 1);

    const auto sym2 = tcond::make_symbol(0, 1, {1.0, 0.1});  // P = 1 + z/10
    const auto prof2 =
        tcond::classify_roots(tcond::find_roots(tcond::symbol_numerator(sym2)), 1e-9);
    CHECK(tcond::winding_algebraic(sym2, prof2) == 0);

    const auto on_circle = tcond::classify_roots({Complex(1.0), Complex(0.5)}, 1e-9);
    CHECK_THROWS_AS(tcond::winding_algebraic(sym1, on_circle), tcond::ZeroOnUnitCircle);
}

TEST_CASE("contour winding on hand-checkable symbols") {
    CHECK(tcond::winding_contour(tcond::make_symbol(0, 1, {-0.5, 1.0})) == 1);
    CHECK(tcond::winding_contour(tcond::make_symbol(0, 1, {-2.0, 1.0})) == 0);
    // P = t - 1: zero on the contour itself.
    CHECK_THROWS_AS(tcond::winding_contour(tcond::make_symbol(0, 1, {-1.0, 1.0})),
                    tcond::NearUnitCircleZero);
}

TEST_CASE("algebraic and contour winding agree on random symbols") {
    int compared = 0;
    for (unsigned trial = 0; trial < 220 && compared < 100; ++trial) {
        const auto c = oracle::std_rademacher_coeffs(7, 2200 + trial);
        const auto sym = tcond::make_symbol(3, 3, c);
        const auto prof =
            tcond::classify_roots(tcond::find_roots(tcond::symbol_numerator(sym)), 1e-6);
        if (prof.on_circle != 0) continue;
        int contour = 0;
        try {
            contour = tcond::winding_contour(sym);
        } catch (const tcond::NearUnitCircleZero&) {
            continue;  // modulus floor violated; precondition, not a defect
        }
        CHECK(tcond::winding_algebraic(sym, prof) == contour);
        ++compared;
    }
    CHECK(compared >= 100);
}

TEST_CASE("Jensen identity on closed-form cases") {
    CHECK(tcond::jensen_defect(poly({-2.0, 1.0}), 1.0) <= 1e-10);
    CHECK(tcond::jensen_defect(poly({-0.25, 0.0, 1.0}), 1.0) <= 1e-8);
    const double base = tcond::jensen_defect(poly({-0.5, 1.0}), 1.0);
    const double scaled = tcond::jensen_defect(poly({-3.5, 7.0}), 1.0);
    CHECK(std::abs(base - scaled) <= 1e-10);
}

TEST_CASE("Jensen defect stays below 1e-8 on 100 seeded draws") {
    int accepted = 0;
    for (unsigned trial = 0; accepted < 100; ++trial) {
        REQUIRE(trial < 400);
        const int degree = 8 + static_cast<int>(trial % 33);
        const auto c =
            oracle::std_gaussian_coeffs(static_cast<std::size_t>(degree) + 1, 3000 + trial);
        if (std::abs(c.front()) <= 1e-6 || c.back() == 0.0) continue;
        const KacPolynomial p(c);
        const auto prof = tcond::classify_roots(tcond::find_roots(p), 1e-6);
        if (prof.nearest_gap <= 1e-3) continue;
        // Trapezoid aliasing decays like (1-gap)^nodes / nodes per root, so
        // the node count must resolve the admitted 1e-3 gap floor: 2^15 nodes
        // push the quadrature error to ~1e-19, leaving root accuracy as the
        // quantity under test.
        CHECK(tcond::jensen_defect(p, 1.0, 1 << 15) <= 1e-8);
        ++accepted;
    }
}

TEST_CASE("Jensen preconditions raise typed errors") {
    CHECK_THROWS_AS(tcond::jensen_defect(poly({0.0, 1.0}), 1.0), tcond::RootAtOrigin);
    CHECK_THROWS_AS(tcond::jensen_defect(poly({-1.0, 1.0}), 1.0), tcond::RootOnContour);
}

TEST_CASE("Mahler measure on closed-form cases") {
    CHECK(std::abs(tcond::log_mahler(poly({-2.0, 1.0}), tcond::MahlerMode::Roots) -
                   std::log(2.0)) <= 1e-12);
    CHECK(std::abs(tcond::log_mahler(poly({-0.25, 0.0, 1.0}), tcond::MahlerMode::Roots)) <= 1e-12);
    CHECK(std::abs(tcond::log_mahler(poly({-2.0, 1.0}), tcond::MahlerMode::Quadrature) -
                   std::log(2.0)) <= 1e-8);
}

TEST_CASE("Mahler root and quadrature modes agree on a degree-40 draw") {
    for (unsigned trial = 0; trial < 5; ++trial) {
        const auto c = oracle::std_gaussian_coeffs(41, 4100 + trial);
        const KacPolynomial p(c);
        const auto prof = tcond::classify_roots(tcond::find_roots(p), 1e-6);
        if (prof.nearest_gap <= 1e-3) continue;
        const double a = tcond::log_mahler(p, tcond::MahlerMode::Roots);
        const double b = tcond::log_mahler(p, tcond::MahlerMode::Quadrature);
        CHECK(std::abs(a - b) <= 1e-6);
    }
}

TEST_CASE("quadrature gap shrinks as nodes double") {
    // Root at 1.02 keeps trapezoid convergence slow enough to observe.
    const KacPolynomial p(std::vector<double>{-1.02, 1.0});
    const double exact = tcond::log_mahler(p, tcond::MahlerMode::Roots);
    double previous = std::numeric_limits<double>::infinity();
    for (int nodes : {256, 512, 1024, 2048}) {
        const double gap = std::abs(tcond::log_mahler(p, tcond::MahlerMode::Quadrature, nodes) - exact);
        CHECK(gap < previous);
        previous = gap;
    }
    CHECK(previous <= 1e-10);
}

TEST_CASE("circle average matches the independent trapezoid oracle") {
    const auto c = oracle::std_gaussian_coeffs(21, 555);
    const auto avg = tcond::mean_log_abs_on_circle(KacPolynomial(c), 1.0, 2048);
    const double ref = oracle::trapezoid_mean_log_abs(c, 1.0, 2048);
    CHECK(std::abs(avg.value - ref) <= 1e-10);
    CHECK(avg.nodes == 2048);
}

TEST_CASE("log integrand floor is counted, not propagated") {
    const auto avg = tcond::mean_log_abs_on_circle(poly({1e-310}), 1.0, 128);
    CHECK(avg.floor_hits == 128);
    CHECK(avg.value == doctest::Approx(std::log(1e-300)).epsilon(1e-12));
}

TEST_SUITE_END();

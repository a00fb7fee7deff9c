// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances and run scales are pinned here on purpose — edit the
// experiments' defaults all you like, this file is the contract.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "tcond/coeff_dist.hpp"
#include "tcond/errors.hpp"
#include "tcond/experiments.hpp"
#include "tcond/poly.hpp"
#include "tcond/toeplitz.hpp"

#include "oracles.hpp"

namespace {

using tcond::BandedToeplitz;
using tcond::Complex;
using tcond::ExperimentConfig;
using tcond::ExperimentReport;
using tcond::KacPolynomial;
using tcond::LaurentSymbol;
using tcond::RootProfile;

struct Outcome {
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, ...) {
    char buffer[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buffer, sizeof buffer, pattern, args);
    va_end(args);
    return buffer;
}

void print_line(int index, const char* title, const Outcome& oc) {
    std::printf("[%s] criterion %d: %s — %s; %.1fs\n", oc.pass ? "PASS" : "FAIL", index, title,
                oc.detail.c_str(), oc.seconds);
    std::fflush(stdout);
}

template <typename Fn>
Outcome guarded(Fn&& fn) {
    Stopwatch clock;
    Outcome oc;
    try {
        oc = fn();
    } catch (const std::exception& e) {
        oc.pass = false;
        oc.detail = std::string("exception: ") + e.what();
    }
    oc.seconds = clock.seconds();
    return oc;
}

// --- 1. zero-fraction window -------------------------------------------------

Outcome criterion_zero_fraction() {
    Stopwatch clock;
    auto run = [](const char* dist, std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.dist = dist;
        cfg.degree = 256;
        cfg.trials = 400;
        cfg.seed = seed;
        return tcond::zero_fraction_experiment(cfg);
    };
    const double mean_r = run("rademacher", 101).estimate_value("mean_fraction");
    const double mean_g = run("gaussian", 102).estimate_value("mean_fraction");
    const double lo = 0.47, hi = 0.53, budget = 120.0;
    const bool window = mean_r >= lo && mean_r <= hi && mean_g >= lo && mean_g <= hi;
    const bool on_time = clock.seconds() <= budget;
    Outcome oc;
    oc.pass = window && on_time;
    oc.detail = fmt("rademacher mean %.4f, gaussian mean %.4f, window [%.2f, %.2f], budget %.0fs",
                    mean_r, mean_g, lo, hi, budget);
    return oc;
}

// --- 2. Mahler-limit moments -------------------------------------------------

Outcome criterion_mahler_moments() {
    Stopwatch clock;
    ExperimentConfig cfg;
    cfg.dist = "gaussian";
    cfg.degree = 1024;
    cfg.trials = 2000;
    cfg.seed = 202;
    cfg.radius_offsets = {0.0};
    const ExperimentReport rep = tcond::mahler_moments_experiment(cfg);
    const auto* mi = rep.find_estimate("mean_I");
    const auto* sq = rep.find_estimate("mean_I_sq");
    const double target_mean = -0.288607, target_second = 0.083294, budget = 600.0;
    const double tol_mean = std::max(0.01, 3.0 * mi->std_error);
    const double tol_second = std::max(0.02, 3.0 * sq->std_error);
    const bool ok_mean = std::abs(mi->value - target_mean) <= tol_mean;
    const bool ok_second = std::abs(sq->value - target_second) <= tol_second;
    const bool on_time = clock.seconds() <= budget;
    Outcome oc;
    oc.pass = ok_mean && ok_second && on_time;
    oc.detail = fmt("mean %.6f vs %.6f (tol %.4f), second %.6f vs %.6f (tol %.4f), budget %.0fs",
                    mi->value, target_mean, tol_mean, sq->value, target_second, tol_second, budget);
    return oc;
}

// --- 3. exponential limit law ------------------------------------------------

Outcome criterion_limit_law() {
    ExperimentConfig cfg;
    cfg.dist = "rademacher";
    cfg.degree = 1024;
    cfg.trials = 2000;
    cfg.seed = 303;
    const ExperimentReport rep = tcond::limit_law_experiment(cfg);
    const double ks_theta = rep.estimate_value("ks_theta");
    const double ks_pair = rep.estimate_value("ks_pair");
    const double ks_max = 0.06, ks_pair_max = 0.08;
    Outcome oc;
    oc.pass = ks_theta <= ks_max && ks_pair <= ks_pair_max;
    oc.detail = fmt("KS(theta) %.4f <= %.2f, paired KS %.4f <= %.2f", ks_theta, ks_max, ks_pair,
                    ks_pair_max);
    return oc;
}

// --- 4. conditioning dichotomy -----------------------------------------------

Outcome criterion_dichotomy(ExperimentReport& saved) {
    Stopwatch clock;
    ExperimentConfig cfg;
    cfg.dist = "rademacher";
    cfg.lower = 3;
    cfg.upper = 3;
    cfg.trials = 100;
    cfg.seed = 404;
    const ExperimentReport rep = tcond::conditioning_sweep(cfg);
    saved = rep;
    const double accepted = rep.estimate_value("accepted");
    const double consistent = rep.estimate_value("consistent_fraction");
    const double plateau = rep.estimate_value("plateau_ok_fraction");
    const double slope = rep.estimate_value("slope_ok_fraction");
    const double min_fraction = 0.95, budget = 900.0;
    const bool on_time = clock.seconds() <= budget;
    Outcome oc;
    oc.pass = accepted == 100.0 && consistent >= min_fraction && plateau >= min_fraction &&
              slope >= min_fraction && on_time;
    oc.detail =
        fmt("accepted %.0f, consistent %.3f, plateau-ok %.3f (max ratio %.3f), slope-ok %.3f "
            "(max rel err %.3f), all >= %.2f, budget %.0fs",
            accepted, consistent, plateau, rep.estimate_value("plateau_ratio_max"), slope,
            rep.estimate_value("slope_relerr_max"), min_fraction, budget);
    return oc;
}

// --- 5. deterministic benchmarks ---------------------------------------------

Outcome criterion_deterministic() {
    // Tridiagonal symbol with kappa(T_n) -> 9.
    const LaurentSymbol tri = tcond::make_symbol(1, 1, {1.0, -2.5, 1.0});
    const tcond::SingularTriple sv = tcond::extreme_singular_values(tcond::build(tri, 512));
    const double kappa_target = 9.0, kappa_rel_tol = 0.02;
    const bool ok_kappa = std::abs(sv.kappa - kappa_target) <= kappa_rel_tol * kappa_target;

    // Winding-one symbol whose certificate decays like 2^{-n}.
    const LaurentSymbol bi = tcond::make_symbol(0, 1, {-0.5, 1.0});
    const RootProfile profile =
        tcond::classify_roots(tcond::find_roots(tcond::symbol_numerator(bi)), 1e-6);
    const tcond::WienerHopfFactorization fac = tcond::wiener_hopf(bi, profile);
    const std::vector<int> sweep = {8, 16, 32, 64};
    const tcond::InverseFactorCoeffs q = tcond::inverse_factor_coefficients(fac, 64);
    std::vector<double> xs, ys;
    for (int n : sweep) {
        const tcond::CertificateResult cert =
            tcond::ill_conditioning_certificate(tcond::build(bi, n), fac, q);
        xs.push_back(n);
        ys.push_back(cert.log_ratio);
    }
    const double slope = oracle::least_squares_slope(xs, ys);
    const double rate = std::log(2.0), slope_rel_tol = 0.10;
    const bool ok_slope = std::abs(slope + rate) <= slope_rel_tol * rate;

    Outcome oc;
    oc.pass = ok_kappa && ok_slope;
    oc.detail = fmt("kappa(512) %.5f vs %.0f (rel tol %.2f), certificate slope %.6f vs %.6f "
                    "(rel tol %.2f)",
                    sv.kappa, kappa_target, kappa_rel_tol, slope, -rate, slope_rel_tol);
    return oc;
}

// --- 6. analytic identity suite ----------------------------------------------

KacPolynomial seeded_gaussian_poly(int degree, std::uint64_t seed) {
    return KacPolynomial(oracle::std_gaussian_coeffs(static_cast<std::size_t>(degree) + 1,
                                                     static_cast<unsigned>(seed)));
}

Outcome criterion_identities() {
    Stopwatch clock;
    const double budget = 120.0;

    // (a) Jensen defect on 100 filtered polynomials of degree <= 40.
    double worst_jensen = 0.0;
    int kept = 0;
    for (std::uint64_t trial = 0; kept < 100; ++trial) {
        if (trial >= 400) {
            Outcome oc;
            oc.detail = "jensen pool exhausted before 100 admissible polynomials";
            return oc;
        }
        const int degree = 8 + static_cast<int>(trial % 33);
        const KacPolynomial p = seeded_gaussian_poly(degree, 9000 + trial);
        if (std::abs(p.coeffs.front()) <= 1e-6) continue;
        const RootProfile profile = tcond::classify_roots(tcond::find_roots(p), 1e-6);
        if (profile.nearest_gap <= 1e-3) continue;
        // 2^15 quadrature nodes resolve the admitted 1e-3 root-gap floor:
        // trapezoid aliasing decays like (1-gap)^nodes per root.
        worst_jensen = std::max(worst_jensen, tcond::jensen_defect(p, 1.0, 1 << 15));
        ++kept;
    }
    const bool ok_jensen = worst_jensen <= 1e-8;

    // (b) Mahler measure, root form against quadrature, 20 filtered polynomials.
    double worst_mahler = 0.0;
    kept = 0;
    for (std::uint64_t trial = 0; kept < 20 && trial < 200; ++trial) {
        const KacPolynomial p = seeded_gaussian_poly(40, 9500 + trial);
        const RootProfile profile = tcond::classify_roots(tcond::find_roots(p), 1e-6);
        if (profile.nearest_gap <= 1e-3) continue;
        worst_mahler = std::max(
            worst_mahler,
            std::abs(tcond::log_mahler(p, tcond::MahlerMode::Roots) -
                     tcond::log_mahler(p, tcond::MahlerMode::Quadrature, 1 << 15)));
        ++kept;
    }
    const bool ok_mahler = kept == 20 && worst_mahler <= 1e-6;

    // (c)+(d) factorization reconstruction and winding agreement on 100 symbols.
    const tcond::CoefficientDistribution rad = tcond::CoefficientDistribution::rademacher();
    double worst_recon = 0.0;
    int agree = 0;
    kept = 0;
    for (std::uint64_t trial = 0; kept < 100; ++trial) {
        if (trial >= 400) {
            Outcome oc;
            oc.detail = "symbol pool exhausted before 100 admissible symbols";
            return oc;
        }
        const std::vector<double> coeffs = tcond::sample(rad, 7, 6100, trial);
        const LaurentSymbol sym = tcond::make_symbol(3, 3, coeffs);
        const RootProfile profile =
            tcond::classify_roots(tcond::find_roots(tcond::symbol_numerator(sym)), 1e-6);
        if (profile.on_circle > 0) continue;
        const tcond::WienerHopfFactorization fac = tcond::wiener_hopf(sym, profile);
        worst_recon = std::max(worst_recon, tcond::factorization_residual(sym, fac));
        int contour = 0;
        try {
            contour = tcond::winding_contour(sym);
        } catch (const tcond::NearUnitCircleZero&) {
            continue;  // grid minimum too small for the contour route
        }
        if (tcond::winding_algebraic(sym, profile) == contour) ++agree;
        ++kept;
    }
    const bool ok_recon = worst_recon <= 1e-8;
    const bool ok_wind = agree == kept;

    // (e) banded sigma extremes against a dense decomposition at n <= 128.
    const tcond::CoefficientDistribution gauss = tcond::CoefficientDistribution::gaussian();
    double worst_sigma = 0.0;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const std::vector<double> coeffs = tcond::sample(gauss, 5, 6200, trial);
        if (coeffs.front() == 0.0 || coeffs.back() == 0.0) continue;
        const LaurentSymbol sym = tcond::make_symbol(2, 2, coeffs);
        for (int n : {16, 64, 128}) {
            const BandedToeplitz T = tcond::build(sym, n);
            const oracle::DenseSvd ref = oracle::dense_svd(T);
            const tcond::SingularTriple got =
                tcond::extreme_singular_values(T, 1e-12, tcond::SingularMethod::Banded);
            worst_sigma = std::max(
                worst_sigma, std::abs(got.sigma_max - ref.sigma_max) / ref.sigma_max);
            if (ref.sigma_min >= 1e-6 * ref.sigma_max)
                worst_sigma = std::max(
                    worst_sigma, std::abs(got.sigma_min - ref.sigma_min) / ref.sigma_min);
        }
    }
    const bool ok_sigma = worst_sigma <= 1e-8;
    const bool on_time = clock.seconds() <= budget;

    Outcome oc;
    oc.pass = ok_jensen && ok_mahler && ok_recon && ok_wind && ok_sigma && on_time;
    oc.detail = fmt("jensen %.2e <= 1e-8, mahler gap %.2e <= 1e-6, reconstruction %.2e <= 1e-8, "
                    "winding agreement %d/%d, sigma rel err %.2e <= 1e-8, budget %.0fs",
                    worst_jensen, worst_mahler, worst_recon, agree, kept, worst_sigma, budget);
    return oc;
}

// --- 7. property substitutes for the unspecified constants --------------------

Outcome criterion_property_substitutes(const ExperimentReport& dichotomy) {
    ExperimentConfig small_cfg;
    small_cfg.dist = "rademacher";
    small_cfg.degree = 256;
    small_cfg.trials = 4000;
    small_cfg.seed = 707;
    small_cfg.a_list = {0.5, 0.25, 0.1, 0.05, 0.01, 1e-7};
    const ExperimentReport small =
        tcond::small_ball_experiment(small_cfg, small_cfg.a_list);

    ExperimentConfig fourth_cfg;
    fourth_cfg.dist = "rademacher";
    fourth_cfg.degree = 128;
    fourth_cfg.trials = 40;
    fourth_cfg.quad_nodes = 1024;
    fourth_cfg.seed = 708;
    const ExperimentReport fourth = tcond::fourth_moment_experiment(fourth_cfg);

    const auto* freq_pos = dichotomy.find_estimate("freq_sigma_le_shape_pos");
    const auto* freq_neg = dichotomy.find_estimate("freq_sigma_ge_shape_neg");

    Outcome oc;
    oc.pass = small.all_pass() && fourth.all_pass();
    oc.detail = fmt("small-ball monotone/shape/tiny-a %s, fourth-moment finite/trend %s "
                    "(trend %.3f); dichotomy-bound direction frequencies %.2f / %.2f",
                    small.all_pass() ? "pass" : "fail", fourth.all_pass() ? "pass" : "fail",
                    fourth.estimate_value("trend"), freq_pos ? freq_pos->value : -1.0,
                    freq_neg ? freq_neg->value : -1.0);
    return oc;
}

}  // namespace

int main() {
    int failures = 0;
    ExperimentReport dichotomy;

    const Outcome c1 = guarded(criterion_zero_fraction);
    print_line(1, "zero-fraction window", c1);
    failures += !c1.pass;

    const Outcome c2 = guarded(criterion_mahler_moments);
    print_line(2, "Mahler-limit moments", c2);
    failures += !c2.pass;

    const Outcome c3 = guarded(criterion_limit_law);
    print_line(3, "exponential limit law", c3);
    failures += !c3.pass;

    const Outcome c4 = guarded([&] { return criterion_dichotomy(dichotomy); });
    print_line(4, "conditioning dichotomy", c4);
    failures += !c4.pass;

    const Outcome c5 = guarded(criterion_deterministic);
    print_line(5, "deterministic benchmarks", c5);
    failures += !c5.pass;

    const Outcome c6 = guarded(criterion_identities);
    print_line(6, "analytic identity suite", c6);
    failures += !c6.pass;

    const Outcome c7 = guarded([&] { return criterion_property_substitutes(dichotomy); });
    print_line(7, "property substitutes", c7);
    failures += !c7.pass;

    std::printf("acceptance: %d/7 criteria passed\n", 7 - failures);
    return failures == 0 ? 0 : 1;
}

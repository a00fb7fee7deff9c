#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcond/coeff_dist.hpp"

namespace tcond {

// Shared Monte Carlo configuration.  Each driver reads the fields it needs
// and echoes the full config into its report, so a report can be replayed.
struct ExperimentConfig {
    std::string dist = "rademacher";  // sampling-law token
    int degree = 256;                 // Kac degree n
    int lower = 1;                    // band r (conditioning)
    int upper = 1;                    // band s
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::vector<double> radius_offsets = {0.0};  // radius = 1 + offset
    std::vector<int> n_sweep = {16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512};
    std::vector<double> angles = {1.0471975511965976, 2.0943951023931953};  // theta, phi
    std::vector<double> a_list = {0.5, 0.25, 0.1, 0.05, 0.01};
    int quad_nodes = 4096;
    int threads = 0;  // 0: use TOEPLITZ_COND_THREADS, else hardware
    std::vector<double> fixed_coeffs;  // when nonempty, replaces sampling
    std::map<std::string, double> thresholds;

    CoefficientDistribution distribution() const { return CoefficientDistribution::parse(dist); }
    double threshold(const std::string& name, double fallback) const;
};

// Throws std::invalid_argument; shared validation for all drivers.
void validate_common(const ExperimentConfig& cfg);

struct Estimate {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
};

struct TargetValue {
    std::string name;
    double value = 0.0;
    std::string note;
};

struct Verdict {
    std::string name;
    double observed = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::string threshold_name;
    bool pass = false;
};

struct ExperimentReport {
    std::string name;
    ExperimentConfig config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // flat per-trial records
    std::vector<Estimate> estimates;
    std::vector<TargetValue> targets;
    std::vector<Verdict> verdicts;
    std::size_t attempted = 0;
    std::size_t skipped = 0;
    std::map<std::string, double> diagnostics;
    double wall_time_seconds = 0.0;

    bool all_pass() const;
    const Estimate* find_estimate(const std::string& name) const;
    const Verdict* find_verdict(const std::string& name) const;
    double estimate_value(const std::string& name) const;  // throws if absent
};

// Fraction of roots in the open unit disk per trial, at cfg.degree and at a
// second degree (half) for the tail-shape comparison.
ExperimentReport zero_fraction_experiment(const ExperimentConfig& cfg);

// Random symbols of band (lower, upper): kappa plateau for wind = 0,
// log sigma_min slope against the factorization decay rate for wind != 0.
ExperimentReport conditioning_sweep(const ExperimentConfig& cfg);

// I = average of log|G(radius e^{i theta})/sigma(radius)| per trial; first and
// second moments.
ExperimentReport mahler_moments_experiment(const ExperimentConfig& cfg);

// |normalized G|^2 at angles (theta, phi) against the unit-exponential law,
// marginal and paired KS distances.
ExperimentReport limit_law_experiment(const ExperimentConfig& cfg);

// Monte Carlo estimate of the circle average of P(|G(radius e^{i theta})| <= a)
// for each a in a_list (decreasing, in (0,1)).
ExperimentReport small_ball_experiment(const ExperimentConfig& cfg, const std::vector<double>& a_list);

// Fourth power of log|G| averaged over the circle, scaled by (n log n)^4,
// compared across two degrees.
ExperimentReport fourth_moment_experiment(const ExperimentConfig& cfg);

}  // namespace tcond

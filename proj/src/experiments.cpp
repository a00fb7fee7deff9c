#include "tcond/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "tcond/errors.hpp"
#include "tcond/poly.hpp"
#include "tcond/toeplitz.hpp"

namespace tcond {

double ExperimentConfig::threshold(const std::string& name, double fallback) const {
    const auto it = thresholds.find(name);
    return it == thresholds.end() ? fallback : it->second;
}

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
    if (cfg.degree < 0) throw std::invalid_argument("config: degree must be nonnegative");
    if (cfg.lower < 0 || cfg.upper < 0)
        throw std::invalid_argument("config: band widths must be nonnegative");
    if (cfg.quad_nodes < 64) throw std::invalid_argument("config: quad_nodes must be at least 64");
    if (cfg.threads < 0) throw std::invalid_argument("config: threads must be nonnegative");
    if (cfg.radius_offsets.empty()) throw std::invalid_argument("config: need a radius offset");
    if (cfg.n_sweep.empty()) throw std::invalid_argument("config: n_sweep must be nonempty");
    for (std::size_t i = 0; i + 1 < cfg.n_sweep.size(); ++i)
        if (cfg.n_sweep[i] >= cfg.n_sweep[i + 1])
            throw std::invalid_argument("config: n_sweep must be strictly increasing");
    if (cfg.n_sweep.front() < 1) throw std::invalid_argument("config: n_sweep entries must be positive");
    if (cfg.fixed_coeffs.empty()) cfg.distribution();  // validates the token
}

bool ExperimentReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Estimate* ExperimentReport::find_estimate(const std::string& n) const {
    for (const Estimate& e : estimates)
        if (e.name == n) return &e;
    return nullptr;
}

const Verdict* ExperimentReport::find_verdict(const std::string& n) const {
    for (const Verdict& v : verdicts)
        if (v.name == n) return &v;
    return nullptr;
}

double ExperimentReport::estimate_value(const std::string& n) const {
    const Estimate* e = find_estimate(n);
    if (!e) throw std::invalid_argument("report: no estimate named " + n);
    return e->value;
}

namespace {

int resolve_threads(const ExperimentConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("TOEPLITZ_COND_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(0..count-1) on a worker pool.  Each job writes only to its own
// index, so the result is independent of scheduling; the first exception is
// rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const int workers = static_cast<int>(std::min<std::size_t>(std::max(threads, 1), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Standard error of the mean, ddof = 1.
double se_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()));
}

double binom_se(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

struct SlopeFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    int points = 0;
};

SlopeFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    SlopeFit fit;
    fit.points = static_cast<int>(xs.size());
    if (xs.size() < 2) return fit;
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

// KS distance of a sample to the unit exponential CDF F(x) = 1 - e^{-x}.
double ks_unit_exponential(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = 1.0 - std::exp(-sample[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double shape_window(int degree) { return std::pow(static_cast<double>(degree), -1.1); }

void require_radius_window(const ExperimentConfig& cfg, int degree) {
    for (double off : cfg.radius_offsets)
        if (std::abs(off) > shape_window(degree))
            throw std::invalid_argument(
                "config: radius offset outside the admissible window |offset| <= n^(-11/10)");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::vector<double> trial_coeffs(const ExperimentConfig& cfg, const CoefficientDistribution& dist,
                                 int degree, std::uint64_t stream) {
    if (!cfg.fixed_coeffs.empty()) return cfg.fixed_coeffs;
    return sample(dist, static_cast<std::size_t>(degree) + 1, cfg.seed, stream);
}

// Circle average of |log|G||^p on the same midpoint grid as the library
// quadrature, with the integrand floored at log(1e-300).
struct PowerLogAverage {
    double value = 0.0;
    std::size_t floor_hits = 0;
};

PowerLogAverage mean_abs_log_pow(const KacPolynomial& p, double radius, int nodes, int power) {
    constexpr double kFloor = -690.77552789821368;
    PowerLogAverage out;
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * (k + 0.5) / nodes;
        const double a = std::abs(evaluate(p, std::polar(radius, theta)));
        double lg;
        if (a < 1e-300) {
            ++out.floor_hits;
            lg = kFloor;
        } else {
            lg = std::log(a);
        }
        acc += std::pow(std::abs(lg), power);
    }
    out.value = acc / nodes;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// zeros: fraction of roots in the open unit disk.

ExperimentReport zero_fraction_experiment(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const bool fixed = !cfg.fixed_coeffs.empty();
    const int primary = fixed ? static_cast<int>(cfg.fixed_coeffs.size()) - 1 : cfg.degree;
    if (!fixed && primary < 8)
        throw std::invalid_argument("zeros: degree must be at least 8");
    if (fixed && primary < 1)
        throw std::invalid_argument("zeros: fixed coefficients must have degree at least 1");
    const int half = primary / 2;
    const bool with_half = !fixed && half >= 8 && half != primary;

    const Timer timer;
    ExperimentReport rep;
    rep.name = "zeros";
    rep.config = cfg;
    rep.columns = {"degree", "trial", "fraction", "tail"};

    const CoefficientDistribution dist = fixed ? CoefficientDistribution::rademacher()
                                               : cfg.distribution();
    const std::size_t groups = with_half ? 2 : 1;
    const std::size_t jobs = groups * cfg.trials;
    struct Row {
        bool ok = false;
        double fraction = 0.0;
        bool tail = false;
    };
    std::vector<Row> results(jobs);
    const int threads = resolve_threads(cfg);

    parallel_for(jobs, threads, [&](std::size_t idx) {
        const bool second = idx >= cfg.trials;
        const int degree = second ? half : primary;
        const std::vector<double> coeffs = trial_coeffs(cfg, dist, degree, idx);
        if (coeffs.back() == 0.0) return;  // skip: not a degree-n draw
        try {
            const std::vector<Complex> roots = find_roots(KacPolynomial(coeffs));
            int inside = 0;
            for (const Complex& z : roots)
                if (std::abs(z) < 1.0) ++inside;
            Row& row = results[idx];
            row.ok = true;
            row.fraction = static_cast<double>(inside) / degree;
            row.tail = std::abs(row.fraction - 0.5) >= std::pow(degree, -0.1);
        } catch (const NonConvergence&) {
            // counted below as a skipped trial
        }
    });

    std::vector<double> frac_primary, frac_half;
    std::size_t tail_primary = 0, tail_half = 0, kept_half = 0;
    for (std::size_t idx = 0; idx < jobs; ++idx) {
        const Row& row = results[idx];
        rep.attempted += 1;
        if (!row.ok) {
            rep.skipped += 1;
            continue;
        }
        const bool second = idx >= cfg.trials;
        rep.rows.push_back({static_cast<double>(second ? half : primary),
                            static_cast<double>(second ? idx - cfg.trials : idx), row.fraction,
                            row.tail ? 1.0 : 0.0});
        if (second) {
            frac_half.push_back(row.fraction);
            if (row.tail) ++tail_half;
            ++kept_half;
        } else {
            frac_primary.push_back(row.fraction);
            if (row.tail) ++tail_primary;
        }
    }

    const double mean_fraction = mean_of(frac_primary);
    const double tail_prob = frac_primary.empty()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(tail_primary) / frac_primary.size();
    rep.estimates.push_back({"mean_fraction", mean_fraction, se_of(frac_primary)});
    rep.estimates.push_back({"tail_prob", tail_prob, binom_se(tail_prob, frac_primary.size())});
    const double shape_primary = std::pow(std::log(primary), 2.0) / std::pow(primary, 0.1);
    rep.targets.push_back({"mean_fraction", 0.5, "limiting fraction of roots in the unit disk"});
    rep.targets.push_back(
        {"tail_shape", shape_primary, "(log n)^2 / n^(1/10) tail bound shape at the run degree"});
    if (with_half) {
        const double tail_prob_half =
            kept_half == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(tail_half) / static_cast<double>(kept_half);
        rep.estimates.push_back({"mean_fraction_half", mean_of(frac_half), se_of(frac_half)});
        rep.estimates.push_back({"tail_prob_half", tail_prob_half, binom_se(tail_prob_half, kept_half)});
        rep.targets.push_back({"tail_shape_half",
                               std::pow(std::log(half), 2.0) / std::pow(half, 0.1),
                               "(log n)^2 / n^(1/10) tail bound shape at half degree"});
    }

    const double mean_tol = cfg.threshold("mean_abs_tol", 0.03);
    rep.verdicts.push_back({"mean_fraction_window", mean_fraction, 0.5, mean_tol, "mean_abs_tol",
                            std::abs(mean_fraction - 0.5) <= mean_tol});
    const double skip_frac = static_cast<double>(rep.skipped) / static_cast<double>(rep.attempted);
    const double skip_max = cfg.threshold("skip_frac_max", 0.01);
    rep.verdicts.push_back(
        {"skip_budget", skip_frac, 0.0, skip_max, "skip_frac_max", skip_frac < skip_max});

    rep.diagnostics["tail_count"] = static_cast<double>(tail_primary);
    rep.wall_time_seconds = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// condition: kappa plateau for wind = 0, sigma_min decay for wind != 0.

namespace {

struct ConditionTrial {
    std::size_t attempt = 0;
    int wind = 0;
    double rate = 0.0;
    std::vector<SweepPoint> points;
    std::vector<double> cert_log;  // same order as points; NaN when wind = 0
    double slope_sigma = std::numeric_limits<double>::quiet_NaN();
    double slope_cert = std::numeric_limits<double>::quiet_NaN();
    double plateau_ratio = std::numeric_limits<double>::quiet_NaN();
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    bool consistent = false;
    double sigma_last = 0.0;
};

enum class SkipReason { None, EndZero, RootFailure, OnCircle };

struct ConditionOutcome {
    std::optional<ConditionTrial> trial;
    SkipReason reason = SkipReason::None;
};

}  // namespace

ExperimentReport conditioning_sweep(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const bool fixed = !cfg.fixed_coeffs.empty();
    const int m = fixed ? static_cast<int>(cfg.fixed_coeffs.size()) - 1 : cfg.lower + cfg.upper;
    const int lower = cfg.lower, upper = fixed ? m - lower : cfg.upper;
    if (fixed && (lower > m || upper < 0))
        throw std::invalid_argument("condition: fixed coefficients shorter than the lower width");

    const double unit_tol = cfg.threshold("unit_tol", 1e-6);
    const double sigma_floor = cfg.threshold("sigma_floor", 1e-12);
    const double sv_tol = cfg.threshold("sv_tol", 1e-10);
    const int n_max = cfg.n_sweep.back();
    // Plateau reference: the sweep entry closest to n_max / 4.
    int n_ref = cfg.n_sweep.front();
    for (int n : cfg.n_sweep)
        if (std::abs(n - n_max / 4) < std::abs(n_ref - n_max / 4)) n_ref = n;

    const Timer timer;
    ExperimentReport rep;
    rep.name = "condition";
    rep.config = cfg;
    rep.columns = {"trial",  "wind", "n",           "sigma_max",  "sigma_min",
                   "kappa",  "certificate_ratio",   "certificate_log_ratio",
                   "rate",   "slope_sigma",         "slope_cert", "plateau_ratio",
                   "consistent"};

    const CoefficientDistribution dist =
        fixed ? CoefficientDistribution::rademacher() : cfg.distribution();
    const int threads = resolve_threads(cfg);

    auto run_one = [&](std::size_t attempt) -> ConditionOutcome {
        ConditionOutcome out;
        const std::vector<double> coeffs = trial_coeffs(cfg, dist, m, attempt);
        if (coeffs.front() == 0.0 || coeffs.back() == 0.0) {
            out.reason = SkipReason::EndZero;
            return out;
        }
        const LaurentSymbol sym = make_symbol(lower, upper, coeffs);
        RootProfile profile;
        try {
            if (m >= 1) profile = classify_roots(find_roots(symbol_numerator(sym)), unit_tol);
            else profile.unit_tol = unit_tol;
        } catch (const NonConvergence&) {
            out.reason = SkipReason::RootFailure;
            return out;
        }
        if (profile.on_circle > 0) {
            out.reason = SkipReason::OnCircle;
            return out;
        }

        ConditionTrial trial;
        trial.attempt = attempt;
        trial.wind = winding_algebraic(sym, profile);
        trial.rate = exponential_rate(profile);

        WienerHopfFactorization fac;
        InverseFactorCoeffs q;
        if (trial.wind != 0) {
            try {
                fac = wiener_hopf(sym, profile);
            } catch (const NonConvergence&) {
                out.reason = SkipReason::RootFailure;
                return out;
            }
            q = inverse_factor_coefficients(fac, static_cast<std::size_t>(n_max));
        }

        for (int n : cfg.n_sweep) {
            const BandedToeplitz T = build(sym, n);
            const SingularTriple sv = extreme_singular_values(T, sv_tol);
            SweepPoint pt;
            pt.n = n;
            pt.sigma_max = sv.sigma_max;
            pt.sigma_min = sv.sigma_min;
            pt.kappa = sv.kappa;
            pt.certificate_ratio = std::numeric_limits<double>::quiet_NaN();
            double clog = std::numeric_limits<double>::quiet_NaN();
            if (trial.wind != 0) {
                const CertificateResult cert = ill_conditioning_certificate(T, fac, q);
                pt.certificate_ratio = cert.ratio;
                clog = cert.log_ratio;
            }
            trial.points.push_back(pt);
            trial.cert_log.push_back(clog);
        }
        trial.sigma_last = trial.points.back().sigma_min;

        if (trial.wind == 0) {
            double kappa_last = 0.0, kappa_ref = 0.0;
            for (const SweepPoint& pt : trial.points) {
                if (pt.n == n_max) kappa_last = pt.kappa;
                if (pt.n == n_ref) kappa_ref = pt.kappa;
            }
            trial.plateau_ratio = kappa_last / kappa_ref;
            trial.consistent = std::isfinite(trial.plateau_ratio) &&
                               trial.plateau_ratio <= cfg.threshold("plateau_ratio_max", 2.0);
        } else {
            std::vector<double> xs, ys, cx, cy;
            for (std::size_t i = 0; i < trial.points.size(); ++i) {
                const SweepPoint& pt = trial.points[i];
                if (pt.sigma_min > sigma_floor) {
                    xs.push_back(pt.n);
                    ys.push_back(std::log(pt.sigma_min));
                }
                if (std::isfinite(trial.cert_log[i])) {
                    cx.push_back(pt.n);
                    cy.push_back(trial.cert_log[i]);
                }
            }
            trial.slope_sigma = fit_line(xs, ys).slope;
            trial.slope_cert = fit_line(cx, cy).slope;
            if (std::isfinite(trial.slope_sigma) && trial.rate > 0.0) {
                trial.rel_err = std::abs(trial.slope_sigma + trial.rate) / trial.rate;
                trial.consistent = trial.rel_err <= cfg.threshold("slope_rel_tol", 0.15);
            }
        }
        out.trial = std::move(trial);
        return out;
    };

    std::vector<ConditionTrial> kept;
    std::size_t attempted = 0, skip_end = 0, skip_root = 0, skip_circle = 0;
    const std::size_t cap = 2 * cfg.trials;
    while (kept.size() < cfg.trials && attempted < cap) {
        const std::size_t batch = std::min(cfg.trials - kept.size(), cap - attempted);
        std::vector<ConditionOutcome> wave(batch);
        parallel_for(batch, threads,
                     [&](std::size_t b) { wave[b] = run_one(attempted + b); });
        for (ConditionOutcome& o : wave) {
            if (o.trial) {
                kept.push_back(std::move(*o.trial));
            } else if (o.reason == SkipReason::EndZero) {
                ++skip_end;
            } else if (o.reason == SkipReason::RootFailure) {
                ++skip_root;
            } else {
                ++skip_circle;
            }
        }
        attempted += batch;
    }

    rep.attempted = attempted;
    rep.skipped = attempted - kept.size();

    std::size_t wind0 = 0, windnz = 0, consistent_count = 0, plateau_ok = 0, slope_ok = 0;
    double plateau_max = std::numeric_limits<double>::quiet_NaN();
    double relerr_max = std::numeric_limits<double>::quiet_NaN();
    std::size_t shape_le_pos = 0, shape_ge_neg = 0;
    const double log_shape =
        m >= 2 ? static_cast<double>(m) *
                     std::log(m * static_cast<double>(m) * std::pow(std::log(m), 3.0))
               : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t t = 0; t < kept.size(); ++t) {
        const ConditionTrial& tr = kept[t];
        if (tr.consistent) ++consistent_count;
        if (tr.wind == 0) {
            ++wind0;
            if (tr.consistent) ++plateau_ok;
            if (!(plateau_max > tr.plateau_ratio)) plateau_max = tr.plateau_ratio;
        } else {
            ++windnz;
            if (tr.consistent) ++slope_ok;
            if (std::isfinite(tr.rel_err) && !(relerr_max > tr.rel_err)) relerr_max = tr.rel_err;
        }
        if (m >= 2 && tr.sigma_last > 0.0) {
            // Both readings of the headline bound's direction, constants set
            // to 1: sigma_min <= S^m and sigma_min >= S^-m for
            // S = m^2 (log m)^3.
            if (std::log(tr.sigma_last) <= log_shape) ++shape_le_pos;
            if (std::log(tr.sigma_last) >= -log_shape) ++shape_ge_neg;
        }
        for (std::size_t i = 0; i < tr.points.size(); ++i) {
            const SweepPoint& pt = tr.points[i];
            rep.rows.push_back({static_cast<double>(t), static_cast<double>(tr.wind),
                                static_cast<double>(pt.n), pt.sigma_max, pt.sigma_min, pt.kappa,
                                pt.certificate_ratio, tr.cert_log[i], tr.rate, tr.slope_sigma,
                                tr.slope_cert, tr.plateau_ratio, tr.consistent ? 1.0 : 0.0});
        }
    }

    const double consistent_fraction =
        kept.empty() ? 0.0 : static_cast<double>(consistent_count) / kept.size();
    const double plateau_fraction = wind0 == 0 ? 1.0 : static_cast<double>(plateau_ok) / wind0;
    const double slope_fraction = windnz == 0 ? 1.0 : static_cast<double>(slope_ok) / windnz;

    rep.estimates.push_back({"accepted", static_cast<double>(kept.size()), 0.0});
    rep.estimates.push_back({"wind_zero_count", static_cast<double>(wind0), 0.0});
    rep.estimates.push_back({"wind_nonzero_count", static_cast<double>(windnz), 0.0});
    rep.estimates.push_back(
        {"consistent_fraction", consistent_fraction, binom_se(consistent_fraction, kept.size())});
    rep.estimates.push_back({"plateau_ok_fraction", plateau_fraction, binom_se(plateau_fraction, wind0)});
    rep.estimates.push_back({"slope_ok_fraction", slope_fraction, binom_se(slope_fraction, windnz)});
    rep.estimates.push_back({"plateau_ratio_max", plateau_max, 0.0});
    rep.estimates.push_back({"slope_relerr_max", relerr_max, 0.0});
    if (m >= 2 && !kept.empty()) {
        rep.estimates.push_back({"freq_sigma_le_shape_pos",
                                 static_cast<double>(shape_le_pos) / kept.size(),
                                 binom_se(static_cast<double>(shape_le_pos) / kept.size(), kept.size())});
        rep.estimates.push_back({"freq_sigma_ge_shape_neg",
                                 static_cast<double>(shape_ge_neg) / kept.size(),
                                 binom_se(static_cast<double>(shape_ge_neg) / kept.size(), kept.size())});
        rep.targets.push_back({"shape_scale", std::exp(log_shape),
                               "[m^2 (log m)^3]^m, the headline bound's scale at this band"});
        rep.targets.push_back(
            {"alpha_m", std::log1p(1.0 / (2.0 * m * m * std::pow(std::log(m), 3.0))),
             "reference decay rate floor for the certificate construction"});
    }
    rep.targets.push_back({"consistency", 1.0, "ideal dichotomy classification rate"});

    const double consistency_min = cfg.threshold("consistency_min", 0.95);
    rep.verdicts.push_back({"dichotomy_consistency", consistent_fraction, 1.0, consistency_min,
                            "consistency_min", consistent_fraction >= consistency_min});
    const double subpop_min = cfg.threshold("subpop_min", 0.95);
    rep.verdicts.push_back(
        {"plateau", plateau_fraction, 1.0, subpop_min, "subpop_min", plateau_fraction >= subpop_min});
    rep.verdicts.push_back(
        {"slope", slope_fraction, 1.0, subpop_min, "subpop_min", slope_fraction >= subpop_min});

    rep.diagnostics["skip_end_zero"] = static_cast<double>(skip_end);
    rep.diagnostics["skip_root_failure"] = static_cast<double>(skip_root);
    rep.diagnostics["skip_on_circle"] = static_cast<double>(skip_circle);
    rep.diagnostics["plateau_reference_n"] = n_ref;
    rep.wall_time_seconds = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// mahler: moments of the normalized log-integral.

ExperimentReport mahler_moments_experiment(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (cfg.fixed_coeffs.empty() && cfg.degree < 2)
        throw std::invalid_argument("mahler: degree must be at least 2");
    const bool fixed = !cfg.fixed_coeffs.empty();
    const int degree = fixed ? static_cast<int>(cfg.fixed_coeffs.size()) - 1 : cfg.degree;
    require_radius_window(cfg, std::max(degree, 2));

    const Timer timer;
    ExperimentReport rep;
    rep.name = "mahler";
    rep.config = cfg;
    rep.columns = {"trial", "offset_index", "radius", "integral"};

    const CoefficientDistribution dist =
        fixed ? CoefficientDistribution::rademacher() : cfg.distribution();
    const std::size_t offsets = cfg.radius_offsets.size();
    struct Row {
        bool ok = false;
        std::vector<double> integrals;
    };
    std::vector<Row> results(cfg.trials);
    const int threads = resolve_threads(cfg);

    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        const KacPolynomial p(trial_coeffs(cfg, dist, degree, t));
        Row row;
        row.integrals.resize(offsets);
        for (std::size_t o = 0; o < offsets; ++o) {
            const double radius = 1.0 + cfg.radius_offsets[o];
            const LogAverage la = mean_log_abs_on_circle(p, radius, cfg.quad_nodes);
            if (la.floor_hits * 1000 > static_cast<std::size_t>(cfg.quad_nodes)) return;
            row.integrals[o] = la.value - std::log(radial_scale(degree, radius).sigma);
        }
        row.ok = true;
        results[t] = std::move(row);
    });

    std::vector<std::vector<double>> by_offset(offsets);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        rep.attempted += 1;
        if (!results[t].ok) {
            rep.skipped += 1;
            continue;
        }
        for (std::size_t o = 0; o < offsets; ++o) {
            rep.rows.push_back({static_cast<double>(t), static_cast<double>(o),
                                1.0 + cfg.radius_offsets[o], results[t].integrals[o]});
            by_offset[o].push_back(results[t].integrals[o]);
        }
    }

    const double target_mean = -std::numbers::egamma / 2.0;
    const double target_second = std::numbers::egamma * std::numbers::egamma / 4.0;
    std::vector<double> squares;
    for (double x : by_offset[0]) squares.push_back(x * x);
    const double mean_i = mean_of(by_offset[0]);
    const double mean_i_sq = mean_of(squares);
    const double se_i = se_of(by_offset[0]);
    const double se_i_sq = se_of(squares);
    rep.estimates.push_back({"mean_I", mean_i, se_i});
    rep.estimates.push_back({"mean_I_sq", mean_i_sq, se_i_sq});
    for (std::size_t o = 1; o < offsets; ++o)
        rep.estimates.push_back(
            {"mean_I_off" + std::to_string(o), mean_of(by_offset[o]), se_of(by_offset[o])});
    rep.targets.push_back({"mean_I", target_mean, "minus half of the Euler-Mascheroni constant"});
    rep.targets.push_back({"mean_I_sq", target_second, "square of half the Euler-Mascheroni constant"});

    const double tol_mean = std::max(cfg.threshold("mean_abs_tol", 0.01), 3.0 * se_i);
    const double tol_second = std::max(cfg.threshold("second_abs_tol", 0.02), 3.0 * se_i_sq);
    rep.verdicts.push_back({"mean_I", mean_i, target_mean, tol_mean, "mean_abs_tol",
                            std::abs(mean_i - target_mean) <= tol_mean});
    rep.verdicts.push_back({"mean_I_sq", mean_i_sq, target_second, tol_second, "second_abs_tol",
                            std::abs(mean_i_sq - target_second) <= tol_second});

    rep.diagnostics["floor_rejects"] = static_cast<double>(rep.skipped);
    rep.wall_time_seconds = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// limitlaw: |normalized G|^2 against the unit exponential.

ExperimentReport limit_law_experiment(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (cfg.angles.empty()) throw std::invalid_argument("limitlaw: need at least one angle");
    const bool fixed = !cfg.fixed_coeffs.empty();
    const int degree = fixed ? static_cast<int>(cfg.fixed_coeffs.size()) - 1 : cfg.degree;
    if (degree < 2) throw std::invalid_argument("limitlaw: degree must be at least 2");
    require_radius_window(cfg, degree);
    const double min_angle = std::pow(degree, -0.5);
    const double theta = cfg.angles[0];
    const bool paired = cfg.angles.size() >= 2;
    const double phi = paired ? cfg.angles[1] : 0.0;
    if (std::abs(theta) < min_angle)
        throw AngleTooClose("limitlaw: |theta| below n^(-1/2)");
    if (paired && std::abs(phi) < min_angle)
        throw AngleTooClose("limitlaw: |phi| below n^(-1/2)");
    if (paired && std::abs(theta - phi) <= min_angle)
        throw AngleTooClose("limitlaw: |theta - phi| must exceed n^(-1/2)");

    const Timer timer;
    ExperimentReport rep;
    rep.name = "limitlaw";
    rep.config = cfg;
    rep.columns = {"trial", "w_theta", "w_phi"};

    const double radius = 1.0 + cfg.radius_offsets[0];
    const CoefficientDistribution dist =
        fixed ? CoefficientDistribution::rademacher() : cfg.distribution();
    std::vector<double> w_theta(cfg.trials), w_phi(cfg.trials);
    const int threads = resolve_threads(cfg);
    const double scale = radial_scale(degree, radius).sigma;

    parallel_for(cfg.trials, threads, [&](std::size_t t) {
        const KacPolynomial p(trial_coeffs(cfg, dist, degree, t));
        const Complex a = evaluate(p, std::polar(radius, theta)) / scale;
        w_theta[t] = std::norm(a);
        if (paired) {
            const Complex b = evaluate(p, std::polar(radius, phi)) / scale;
            w_phi[t] = std::norm(b);
        }
    });

    for (std::size_t t = 0; t < cfg.trials; ++t)
        rep.rows.push_back({static_cast<double>(t), w_theta[t],
                            paired ? w_phi[t] : std::numeric_limits<double>::quiet_NaN()});
    rep.attempted = cfg.trials;

    const double ks_theta = ks_unit_exponential(w_theta);
    rep.estimates.push_back({"ks_theta", ks_theta, 0.0});
    double ecdf_one = 0.0;
    for (double w : w_theta) ecdf_one += w <= 1.0 ? 1.0 : 0.0;
    ecdf_one /= static_cast<double>(cfg.trials);
    rep.estimates.push_back({"ecdf_at_one", ecdf_one, binom_se(ecdf_one, cfg.trials)});
    rep.estimates.push_back({"mean_w_theta", mean_of(w_theta), se_of(w_theta)});

    double ks_pair = std::numeric_limits<double>::quiet_NaN();
    if (paired) {
        rep.estimates.push_back({"ks_phi", ks_unit_exponential(w_phi), 0.0});
        // Joint ECDF against F(x)F(y) on a deterministic 20x20 grid of
        // exponential quantiles at probabilities j/21.
        double worst = 0.0;
        for (int gx = 1; gx <= 20; ++gx) {
            const double x = -std::log(1.0 - gx / 21.0);
            for (int gy = 1; gy <= 20; ++gy) {
                const double y = -std::log(1.0 - gy / 21.0);
                std::size_t count = 0;
                for (std::size_t t = 0; t < cfg.trials; ++t)
                    if (w_theta[t] <= x && w_phi[t] <= y) ++count;
                const double joint = static_cast<double>(count) / cfg.trials;
                worst = std::max(worst, std::abs(joint - (gx / 21.0) * (gy / 21.0)));
            }
        }
        ks_pair = worst;
        rep.estimates.push_back({"ks_pair", ks_pair, 0.0});
    }
    rep.targets.push_back({"cdf_at_one", 1.0 - std::exp(-1.0), "F(1) for F(x) = 1 - e^{-x}"});

    const double ks_max = cfg.threshold("ks_max", 0.06);
    rep.verdicts.push_back({"ks_theta", ks_theta, 0.0, ks_max, "ks_max", ks_theta <= ks_max});
    if (paired) {
        const double pair_max = cfg.threshold("ks_pair_max", 0.08);
        rep.verdicts.push_back(
            {"ks_pair", ks_pair, 0.0, pair_max, "ks_pair_max", ks_pair <= pair_max});
    }
    rep.wall_time_seconds = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// smallball: circle-averaged small-ball probabilities.

ExperimentReport small_ball_experiment(const ExperimentConfig& cfg,
                                       const std::vector<double>& a_list) {
    validate_common(cfg);
    if (a_list.empty()) throw std::invalid_argument("smallball: a_list must be nonempty");
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        if (!(a_list[i] > 0.0) || !(a_list[i] < 1.0))
            throw std::invalid_argument("smallball: a values must lie in (0, 1)");
        if (i > 0 && a_list[i] >= a_list[i - 1])
            throw std::invalid_argument("smallball: a_list must be strictly decreasing");
    }
    const bool fixed = !cfg.fixed_coeffs.empty();
    const int degree = fixed ? static_cast<int>(cfg.fixed_coeffs.size()) - 1 : cfg.degree;
    if (degree < 1) throw std::invalid_argument("smallball: degree must be at least 1");
    require_radius_window(cfg, std::max(degree, 2));

    const Timer timer;
    ExperimentReport rep;
    rep.name = "smallball";
    rep.config = cfg;
    rep.columns = {"sample", "theta", "abs_value"};

    const double radius = 1.0 + cfg.radius_offsets[0];
    const CoefficientDistribution dist =
        fixed ? CoefficientDistribution::rademacher() : cfg.distribution();
    const std::size_t samples = cfg.trials;
    std::vector<double> theta(samples), value(samples);
    const int threads = resolve_threads(cfg);

    parallel_for(samples, threads, [&](std::size_t i) {
        const CounterRng rng(cfg.seed, i);
        const KacPolynomial p(trial_coeffs(cfg, dist, degree, i));
        // Stratified angle: sample i covers the i-th of `samples` equal arcs;
        // the jitter draw sits past every coefficient index for any law.
        const double u = rng.uniform(2 * static_cast<std::uint64_t>(degree) + 3);
        theta[i] = -std::numbers::pi +
                   2.0 * std::numbers::pi * (static_cast<double>(i) + u) / samples;
        value[i] = std::abs(evaluate(p, std::polar(radius, theta[i])));
    });

    for (std::size_t i = 0; i < samples; ++i)
        rep.rows.push_back({static_cast<double>(i), theta[i], value[i]});
    rep.attempted = samples;

    std::vector<double> p_hat(a_list.size());
    for (std::size_t j = 0; j < a_list.size(); ++j) {
        std::size_t count = 0;
        for (double v : value)
            if (v <= a_list[j]) ++count;
        p_hat[j] = static_cast<double>(count) / samples;
        rep.estimates.push_back(
            {"p_hat_" + std::to_string(j), p_hat[j], binom_se(p_hat[j], samples)});
    }
    const auto shape = [](double a) { return a * std::log(1.0 / a); };
    for (std::size_t j = 1; j < a_list.size(); ++j) {
        const double dx = std::log(a_list[j]) - std::log(a_list[j - 1]);
        if (p_hat[j] > 0.0 && p_hat[j - 1] > 0.0)
            rep.estimates.push_back({"loglog_slope_" + std::to_string(j),
                                     (std::log(p_hat[j]) - std::log(p_hat[j - 1])) / dx, 0.0});
        rep.targets.push_back({"shape_slope_" + std::to_string(j),
                               (std::log(shape(a_list[j])) - std::log(shape(a_list[j - 1]))) / dx,
                               "local slope of a log(1/a) between consecutive a values"});
    }

    bool monotone = true;
    for (std::size_t j = 1; j < a_list.size(); ++j) monotone = monotone && p_hat[j] <= p_hat[j - 1];
    rep.verdicts.push_back(
        {"monotone", monotone ? 1.0 : 0.0, 1.0, 0.0, "exact", monotone});
    if (a_list.back() <= 1e-6) {
        const double budget =
            cfg.threshold("tiny_a_budget", 2.0) / std::sqrt(static_cast<double>(samples));
        rep.verdicts.push_back({"tiny_a", p_hat.back(), 0.0, budget, "tiny_a_budget",
                                p_hat.back() <= budget});
    }
    rep.wall_time_seconds = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// fourth: scaled fourth moment of log|G| across two degrees.

ExperimentReport fourth_moment_experiment(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const bool fixed = !cfg.fixed_coeffs.empty();
    const int primary = fixed ? static_cast<int>(cfg.fixed_coeffs.size()) - 1 : cfg.degree;
    if (!fixed && primary < 4)
        throw std::invalid_argument("fourth: degree must be at least 4");
    require_radius_window(cfg, std::max(primary, 2));
    const int half = primary / 2;
    const bool with_half = !fixed && half >= 2;

    const Timer timer;
    ExperimentReport rep;
    rep.name = "fourth";
    rep.config = cfg;
    rep.columns = {"degree", "trial", "integral4"};

    const double radius = 1.0 + cfg.radius_offsets[0];
    const CoefficientDistribution dist =
        fixed ? CoefficientDistribution::rademacher() : cfg.distribution();
    const std::size_t groups = with_half ? 2 : 1;
    const std::size_t jobs = groups * cfg.trials;
    struct Row {
        bool ok = false;
        double integral = 0.0;
    };
    std::vector<Row> results(jobs);
    const int threads = resolve_threads(cfg);

    parallel_for(jobs, threads, [&](std::size_t idx) {
        const bool second = idx >= cfg.trials;
        const int degree = second ? half : primary;
        const KacPolynomial p(trial_coeffs(cfg, dist, degree, idx));
        const PowerLogAverage avg = mean_abs_log_pow(p, radius, cfg.quad_nodes, 4);
        if (avg.floor_hits * 1000 > static_cast<std::size_t>(cfg.quad_nodes)) return;
        results[idx] = {true, avg.value};
    });

    std::vector<double> j_primary, j_half;
    for (std::size_t idx = 0; idx < jobs; ++idx) {
        rep.attempted += 1;
        if (!results[idx].ok) {
            rep.skipped += 1;
            continue;
        }
        const bool second = idx >= cfg.trials;
        rep.rows.push_back({static_cast<double>(second ? half : primary),
                            static_cast<double>(second ? idx - cfg.trials : idx),
                            results[idx].integral});
        (second ? j_half : j_primary).push_back(results[idx].integral);
    }

    const auto scale4 = [](int n) {
        return std::pow(static_cast<double>(n) * std::log(static_cast<double>(n)), 4.0);
    };
    const double mean_primary = mean_of(j_primary);
    rep.estimates.push_back({"mean_J", mean_primary, se_of(j_primary)});
    double ratio_primary = std::numeric_limits<double>::quiet_NaN();
    double ratio_half = std::numeric_limits<double>::quiet_NaN();
    if (primary >= 2) {
        ratio_primary = mean_primary / scale4(primary);
        rep.estimates.push_back({"ratio_primary", ratio_primary, se_of(j_primary) / scale4(primary)});
    }
    if (with_half) {
        ratio_half = mean_of(j_half) / scale4(half);
        rep.estimates.push_back({"ratio_half", ratio_half, se_of(j_half) / scale4(half)});
        rep.estimates.push_back({"trend", ratio_primary / ratio_half, 0.0});
    }
    rep.targets.push_back({"trend_limit", 1.0, "scaled fourth moment should not grow with degree"});

    std::size_t finite = 0;
    for (double v : j_primary) finite += std::isfinite(v) ? 1 : 0;
    for (double v : j_half) finite += std::isfinite(v) ? 1 : 0;
    const double finite_frac =
        rep.rows.empty() ? 1.0 : static_cast<double>(finite) / rep.rows.size();
    rep.verdicts.push_back({"finite_values", finite_frac, 1.0, 0.0, "exact", finite_frac == 1.0});
    if (with_half) {
        const double factor = cfg.threshold("trend_factor_max", 1.5);
        const double trend = ratio_primary / ratio_half;
        rep.verdicts.push_back({"trend", trend, 1.0, factor, "trend_factor_max",
                                std::isfinite(trend) && trend <= factor});
    }

    rep.diagnostics["floor_rejects"] = static_cast<double>(rep.skipped);
    rep.wall_time_seconds = timer.seconds();
    return rep;
}

}  // namespace tcond

#include "tcond/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "tcond/detail/format.hpp"
#include "tcond/errors.hpp"
#include "tcond/rng.hpp"

namespace tcond {

BandedToeplitz build(const LaurentSymbol& sym, int n) {
    if (n < 1) throw std::invalid_argument("toeplitz: n must be positive");
    return BandedToeplitz{n, sym.r, sym.s, sym.coeffs};
}

BandedToeplitz from_band(int n, int lower, int upper, std::vector<double> band) {
    if (n < 1) throw std::invalid_argument("toeplitz: n must be positive");
    if (lower < 0 || upper < 0) throw std::invalid_argument("toeplitz: negative band width");
    if (band.size() != static_cast<std::size_t>(lower + upper + 1))
        throw std::invalid_argument("toeplitz: band length must be lower + upper + 1");
    return BandedToeplitz{n, lower, upper, std::move(band)};
}

std::vector<double> matvec(const BandedToeplitz& T, const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(T.n))
        throw DimensionMismatch("matvec: vector length does not match matrix order");
    std::vector<double> y(T.n, 0.0);
    for (int j = 0; j < T.n; ++j) {
        const int lo = std::max(-T.lower, -j);
        const int hi = std::min(T.upper, T.n - 1 - j);
        double acc = 0.0;
        for (int d = lo; d <= hi; ++d) acc += T.band[d + T.lower] * x[j + d];
        y[j] = acc;
    }
    return y;
}

std::vector<double> matvec_transpose(const BandedToeplitz& T, const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(T.n))
        throw DimensionMismatch("matvec: vector length does not match matrix order");
    std::vector<double> y(T.n, 0.0);
    // (T^T)(j,k) = xi_{j-k}: the band runs in the opposite orientation.
    for (int j = 0; j < T.n; ++j) {
        const int lo = std::max(-T.upper, -j);
        const int hi = std::min(T.lower, T.n - 1 - j);
        double acc = 0.0;
        for (int d = lo; d <= hi; ++d) acc += T.band[T.lower - d] * x[j + d];
        y[j] = acc;
    }
    return y;
}

namespace {

// Overflow-safe Euclidean norm (entries may reach 1e158 inside the scaled
// inverse-iteration ladder).
double safe_norm(const std::vector<double>& v) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    if (peak == 0.0 || !std::isfinite(peak)) return peak;
    double acc = 0.0;
    for (double x : v) {
        const double t = x / peak;
        acc += t * t;
    }
    return peak * std::sqrt(acc);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// LU factorization of a band matrix with partial pivoting, LAPACK band
// storage: matrix (i, j) lives at storage row kl + ku + i - j of column j,
// with kl extra rows on top for pivoting fill.
class BandLU {
  public:
    explicit BandLU(const BandedToeplitz& T)
        : n_(T.n), kl_(T.lower), ku_(T.upper), ldab_(2 * kl_ + ku_ + 1),
          ab_(static_cast<std::size_t>(ldab_) * n_, 0.0), piv_(n_) {
        for (int j = 0; j < n_; ++j) {
            const int lo = std::max(0, j - ku_);
            const int hi = std::min(n_ - 1, j + kl_);
            for (int i = lo; i <= hi; ++i) at(kl_ + ku_ + i - j, j) = T.entry(i, j);
        }
        factorize();
    }

    bool singular() const { return singular_; }

    void solve(std::vector<double>& b, bool transpose) const {
        if (singular_) throw std::logic_error("band LU: solve on a singular factorization");
        if (!transpose) {
            for (int j = 0; j < n_ - 1; ++j) {
                const int km = std::min(kl_, n_ - 1 - j);
                if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
                for (int t = 1; t <= km; ++t) b[j + t] -= at(kl_ + ku_ + t, j) * b[j];
            }
            for (int j = n_ - 1; j >= 0; --j) {
                b[j] /= at(kl_ + ku_, j);
                const int lm = std::min(kl_ + ku_, j);
                for (int t = 1; t <= lm; ++t) b[j - t] -= at(kl_ + ku_ - t, j) * b[j];
            }
        } else {
            for (int j = 0; j < n_; ++j) {
                const int lm = std::min(kl_ + ku_, j);
                for (int t = 1; t <= lm; ++t) b[j] -= at(kl_ + ku_ - t, j) * b[j - t];
                b[j] /= at(kl_ + ku_, j);
            }
            for (int j = n_ - 2; j >= 0; --j) {
                const int km = std::min(kl_, n_ - 1 - j);
                for (int t = 1; t <= km; ++t) b[j] -= at(kl_ + ku_ + t, j) * b[j + t];
                if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            }
        }
    }

  private:
    double& at(int row, int col) { return ab_[static_cast<std::size_t>(col) * ldab_ + row]; }
    double at(int row, int col) const { return ab_[static_cast<std::size_t>(col) * ldab_ + row]; }

    void factorize() {
        int ju = 0;
        for (int j = 0; j < n_; ++j) {
            const int km = std::min(kl_, n_ - 1 - j);
            int ip = 0;
            for (int t = 1; t <= km; ++t)
                if (std::abs(at(kl_ + ku_ + t, j)) > std::abs(at(kl_ + ku_ + ip, j))) ip = t;
            piv_[j] = j + ip;
            ju = std::max(ju, std::min(j + ku_ + ip, n_ - 1));
            const double pivot = at(kl_ + ku_ + ip, j);
            if (pivot == 0.0) {
                singular_ = true;
                continue;
            }
            if (ip != 0)
                for (int c = j; c <= ju; ++c)
                    std::swap(ab_[static_cast<std::size_t>(c) * ldab_ + kl_ + ku_ + j - c],
                              ab_[static_cast<std::size_t>(c) * ldab_ + kl_ + ku_ + j + ip - c]);
            for (int t = 1; t <= km; ++t) at(kl_ + ku_ + t, j) /= at(kl_ + ku_, j);
            for (int c = j + 1; c <= ju; ++c) {
                const double f = at(kl_ + ku_ + j - c, c);
                if (f == 0.0) continue;
                for (int t = 1; t <= km; ++t)
                    at(kl_ + ku_ + j + t - c, c) -= f * at(kl_ + ku_ + t, j);
            }
        }
    }

    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
    std::vector<int> piv_;
    bool singular_ = false;
};

std::vector<double> start_vector(int n) {
    CounterRng rng(0x746f65706c697473ULL, 0);  // fixed internal key: deterministic results
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(i) - 0.5;
    const double nrm = safe_norm(v);
    for (double& x : v) x /= nrm;
    return v;
}

struct LanczosOutcome {
    double theta = 0.0;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
};

// Largest eigenvalue of a symmetric positive semidefinite operator by Lanczos
// with full reorthogonalization.  Runs to max_iter unless the residual
// |beta_k * (bottom of Ritz vector)| drops below rel_tol * theta; exact (up
// to roundoff) when the Krylov space exhausts at k = n.
LanczosOutcome lanczos_largest(int n, const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                               double rel_tol, int max_iter) {
    const int kmax = std::min(n, max_iter);
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;
    std::vector<double> v = start_vector(n), w(n);
    basis.push_back(v);

    LanczosOutcome out;
    auto ritz = [&](bool with_residual) {
        const int k = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
        int top = 0;
        eig.eigenvalues().maxCoeff(&top);
        out.theta = eig.eigenvalues()[top];
        if (with_residual && static_cast<int>(beta.size()) >= k)
            out.residual = std::abs(beta[k - 1] * eig.eigenvectors()(k - 1, top));
    };

    for (int k = 0; k < kmax; ++k) {
        apply(basis.back(), w);
        const double a = std::inner_product(w.begin(), w.end(), basis.back().begin(), 0.0);
        alpha.push_back(a);
        // Full reorthogonalization, two passes, keeps the basis numerically
        // orthogonal so clustered spectra do not produce ghost eigenvalues.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) {
                const double c = std::inner_product(w.begin(), w.end(), u.begin(), 0.0);
                for (int i = 0; i < n; ++i) w[i] -= c * u[i];
            }
        const double b = safe_norm(w);
        out.iterations = k + 1;
        const bool breakdown = b <= 1e-14 * std::max(1.0, std::max(std::abs(a), b));
        if (breakdown || k + 1 == kmax) {
            ritz(false);
            if (breakdown) out.residual = 0.0;  // exact invariant subspace found
            break;
        }
        beta.push_back(b);
        for (double& x : w) x /= b;
        basis.push_back(w);
        if ((k + 1) % 8 == 0) {
            ritz(true);
            if (out.residual <= rel_tol * std::max(out.theta, 1e-300)) break;
        }
    }
    return out;
}

SingularTriple finish(double sigma_max, double sigma_min) {
    SingularTriple t;
    t.sigma_max = sigma_max;
    t.sigma_min = sigma_min;
    t.kappa = sigma_min < 1e-290 ? std::numeric_limits<double>::infinity()
                                 : sigma_max / sigma_min;
    return t;
}

SingularTriple dense_singular_values(const BandedToeplitz& T) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(T.n, T.n);
    for (int i = 0; i < T.n; ++i)
        for (int j = std::max(0, i - T.lower); j <= std::min(T.n - 1, i + T.upper); ++j)
            m(i, j) = T.entry(i, j);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return finish(svd.singularValues()(0), svd.singularValues()(T.n - 1));
}

// One pass of v -> C v / ||C v|| with C = (T^T T)^{-1}, solved through the
// band LU at a given power-of-two RHS prescale; returns false when the solve
// leaves the representable range.  log_gain reports log ||C v|| for this pass.
bool inverse_normal_step(const BandLU& lu, std::vector<double>& v, double& log_gain,
                         int scale_pow2) {
    std::vector<double> z = v;
    for (double& x : z) x = std::ldexp(x, -scale_pow2);
    lu.solve(z, true);
    if (!all_finite(z)) return false;
    const double n1 = safe_norm(z);
    if (n1 == 0.0 || !std::isfinite(n1)) return false;
    for (double& x : z) x /= n1;
    std::vector<double> w = z;
    for (double& x : w) x = std::ldexp(x, -scale_pow2);
    lu.solve(w, false);
    if (!all_finite(w)) return false;
    const double n2 = safe_norm(w);
    if (n2 == 0.0 || !std::isfinite(n2)) return false;
    for (double& x : w) x /= n2;
    v = std::move(w);
    log_gain = std::log(n1) + std::log(n2) + 2.0 * scale_pow2 * std::numbers::ln2;
    return true;
}

double banded_sigma_min(const BandedToeplitz& T, double tol) {
    const BandLU lu(T);
    if (lu.singular()) return 0.0;

    std::vector<double> v = start_vector(T.n);
    int scale_pow2 = 0;
    double log_gain = 0.0, prev = std::numeric_limits<double>::quiet_NaN();
    int it = 0;
    // Coarse probe: find the order of magnitude of lambda_max((T^T T)^{-1}).
    while (it < 60) {
        if (!inverse_normal_step(lu, v, log_gain, scale_pow2)) {
            if (scale_pow2 == 0) scale_pow2 = 500;
            else if (scale_pow2 == 500) scale_pow2 = 1000;
            else return 0.0;  // below the reach of scaled double solves
            v = start_vector(T.n);
            prev = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        ++it;
        if (std::isfinite(prev) && std::abs(log_gain - prev) <= 0.5) break;
        prev = log_gain;
    }

    if (log_gain <= 230.0) {
        // Moderate regime: Lanczos on the inverse normal operator handles
        // clustered smallest singular values.
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            y = x;
            lu.solve(y, true);
            lu.solve(y, false);
        };
        const LanczosOutcome lz = lanczos_largest(T.n, apply, tol, 320);
        if (!std::isfinite(lz.theta) || lz.theta <= 0.0)
            throw NonConvergence("sigma_min: inverse Lanczos produced a non-positive eigenvalue",
                                 lz.iterations, lz.residual);
        return 1.0 / std::sqrt(lz.theta);
    }

    // Deep regime: exponentially dominant eigenvalue, power iteration settles
    // in a handful of steps; everything tracked in log space.
    for (int deep = 0; deep < 300; ++deep) {
        prev = log_gain;
        if (!inverse_normal_step(lu, v, log_gain, scale_pow2)) {
            if (scale_pow2 == 0) scale_pow2 = 500;
            else if (scale_pow2 == 500) scale_pow2 = 1000;
            else return 0.0;
            continue;
        }
        if (std::abs(log_gain - prev) <= 1e-6 * std::max(1.0, std::abs(log_gain)))
            return std::exp(-0.5 * log_gain);
    }
    throw NonConvergence("sigma_min: log-space power iteration did not settle", 300,
                         std::abs(log_gain - prev));
}

SingularTriple banded_singular_values(const BandedToeplitz& T, double tol) {
    auto apply_normal = [&](const std::vector<double>& x, std::vector<double>& y) {
        y = matvec_transpose(T, matvec(T, x));
    };
    const LanczosOutcome top = lanczos_largest(T.n, apply_normal, tol, 320);
    if (!std::isfinite(top.theta) || top.theta < 0.0)
        throw NonConvergence("sigma_max: Lanczos produced a non-finite eigenvalue",
                             top.iterations, top.residual);
    const double sigma_max = std::sqrt(std::max(top.theta, 0.0));
    if (sigma_max == 0.0) return finish(0.0, 0.0);
    return finish(sigma_max, banded_sigma_min(T, tol));
}

}  // namespace

SingularTriple extreme_singular_values(const BandedToeplitz& T, double tol, SingularMethod method) {
    if (T.n < 1) throw std::invalid_argument("singular values: empty matrix");
    if (!(tol > 0.0) || !(tol < 1.0))
        throw std::invalid_argument("singular values: tol must lie in (0, 1)");
    switch (method) {
        case SingularMethod::Dense: return dense_singular_values(T);
        case SingularMethod::Banded: return banded_singular_values(T, tol);
        case SingularMethod::Auto: {
            if (T.n > 192) return banded_singular_values(T, tol);
            SingularTriple sv = dense_singular_values(T);
            // Dense SVD loses relative accuracy once sigma_min falls far
            // below eps * sigma_max; the inverse-iteration path stays
            // relatively accurate arbitrarily deep, so re-derive sigma_min
            // from it whenever the dense answer is in that regime.
            if (sv.sigma_min < 1e-10 * sv.sigma_max)
                sv = finish(sv.sigma_max, banded_sigma_min(T, tol));
            return sv;
        }
    }
    throw std::invalid_argument("singular values: unknown method");
}

double symbol_sup_norm(const LaurentSymbol& sym, int grid_size) {
    if (grid_size < 64) throw std::invalid_argument("sup norm: grid_size must be at least 64");
    const KacPolynomial q = symbol_numerator(sym);
    const auto f = [&](double theta) { return std::abs(evaluate(q, std::polar(1.0, theta))); };

    std::vector<double> val(grid_size);
    for (int k = 0; k < grid_size; ++k) val[k] = f(2.0 * std::numbers::pi * k / grid_size);

    // |P|^2 is a trig polynomial of degree r+s, so every local maximum is
    // isolated on a fine grid; polish each with golden-section.
    constexpr double kGold = 0.61803398874989484;
    double best = 0.0;
    for (int k = 0; k < grid_size; ++k) {
        const double prev = val[(k + grid_size - 1) % grid_size];
        const double next = val[(k + 1) % grid_size];
        if (val[k] < prev || val[k] < next) continue;
        double a = 2.0 * std::numbers::pi * (k - 1) / grid_size;
        double b = 2.0 * std::numbers::pi * (k + 1) / grid_size;
        double x1 = b - kGold * (b - a), x2 = a + kGold * (b - a);
        double f1 = f(x1), f2 = f(x2);
        for (int step = 0; step < 80; ++step) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kGold * (b - a);
                f2 = f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kGold * (b - a);
                f1 = f(x1);
            }
        }
        best = std::max({best, f1, f2, val[k]});
    }
    return best;
}

WienerHopfFactorization wiener_hopf(const LaurentSymbol& sym, const RootProfile& profile) {
    if (profile.on_circle > 0)
        throw ZeroOnUnitCircle("factorization: root within unit_tol of the unit circle");
    if (profile.roots.size() != static_cast<std::size_t>(sym.r + sym.s))
        throw DimensionMismatch("factorization: profile does not match the symbol degree");
    WienerHopfFactorization fac;
    fac.leading = sym.coeffs.back();
    for (const Complex& z : profile.roots) {
        const double a = std::abs(z);
        if (a < 1.0) {
            fac.inner_roots.push_back(z);
            fac.max_inner = std::max(fac.max_inner, a);
        } else {
            fac.outer_roots.push_back(z);
            fac.min_outer = std::min(fac.min_outer, a);
        }
    }
    fac.wind = static_cast<int>(fac.inner_roots.size()) - sym.r;
    const double resid = factorization_residual(sym, fac);
    if (!(resid <= 1e-8))
        throw NonConvergence("factorization: reconstruction residual too large", 0, resid);
    return fac;
}

Complex minus_factor_eval(const WienerHopfFactorization& fac, Complex t) {
    Complex acc = 1.0;
    for (const Complex& d : fac.inner_roots) acc *= 1.0 - d / t;
    return acc;
}

Complex plus_factor_eval(const WienerHopfFactorization& fac, Complex t) {
    Complex acc = fac.leading;
    for (const Complex& m : fac.outer_roots) acc *= t - m;
    return acc;
}

double factorization_residual(const LaurentSymbol& sym, const WienerHopfFactorization& fac,
                              int grid_size) {
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < grid_size; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / grid_size;
        const Complex t = std::polar(1.0, theta);
        const Complex p = symbol_eval_unit(sym, theta);
        const Complex recon = minus_factor_eval(fac, t) * std::polar(1.0, fac.wind * theta) *
                              plus_factor_eval(fac, t);
        worst = std::max(worst, std::abs(recon - p));
        scale = std::max(scale, std::abs(p));
    }
    return scale > 0.0 ? worst / scale : worst;
}

namespace {

// Real coefficients of prod (1 + root_j * x); conjugate pairs make the exact
// result real, the imaginary dust is discarded.
std::vector<double> expand_product(const std::vector<Complex>& factors) {
    std::vector<Complex> acc{1.0};
    for (const Complex& f : factors) {
        std::vector<Complex> next(acc.size() + 1, 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            next[i] += acc[i];
            next[i + 1] += acc[i] * f;
        }
        acc = std::move(next);
    }
    std::vector<double> real(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) real[i] = acc[i].real();
    return real;
}

struct SeriesTriple {
    std::vector<double> value;
    std::vector<double> log_mag;
    std::vector<int> sign;
};

// Power-series inverse of a polynomial with a_0 != 0:
//   q_0 = 1/a_0,  q_k = -(1/a_0) sum_{i=1..min(k,deg)} a_i q_{k-i}.
// The plain double recurrence underflows gracefully; a second recurrence on
// q_k * growth^-k (growth = dominant root modulus of the tail) keeps O(1)
// magnitudes and yields exact log/sign companions far past underflow.
SeriesTriple invert_series(const std::vector<double>& a, double decay, std::size_t count) {
    if (a.empty() || a[0] == 0.0)
        throw std::invalid_argument("series inverse: constant term must be nonzero");
    SeriesTriple out;
    out.value.assign(count, 0.0);
    out.log_mag.assign(count, -std::numeric_limits<double>::infinity());
    out.sign.assign(count, 0);
    if (count == 0) return out;

    const std::size_t deg = a.size() - 1;
    // hat_k = q_k * e^{-beta k} stays O(poly(k)); its recurrence uses
    // a_i * e^{-beta i}.
    const double beta = decay > 0.0 ? std::log(decay) : 0.0;
    std::vector<double> a_hat(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) a_hat[i] = a[i] * std::exp(-beta * i);
    std::vector<double> plain(count, 0.0), hat(count, 0.0);
    plain[0] = hat[0] = 1.0 / a[0];
    for (std::size_t k = 1; k < count; ++k) {
        double acc = 0.0, acc_hat = 0.0;
        for (std::size_t i = 1; i <= std::min(k, deg); ++i) {
            acc += a[i] * plain[k - i];
            acc_hat += a_hat[i] * hat[k - i];
        }
        plain[k] = -acc / a[0];
        hat[k] = -acc_hat / a_hat[0];
    }
    for (std::size_t k = 0; k < count; ++k) {
        out.value[k] = plain[k];
        if (hat[k] != 0.0) {
            out.log_mag[k] = std::log(std::abs(hat[k])) + beta * static_cast<double>(k);
            out.sign[k] = hat[k] > 0.0 ? 1 : -1;
        }
    }
    return out;
}

}  // namespace

InverseFactorCoeffs inverse_factor_coefficients(const WienerHopfFactorization& fac,
                                                std::size_t count) {
    if (count == 0) throw std::invalid_argument("inverse factors: count must be positive");
    // P_minus as a polynomial in u = 1/t: prod (1 - delta_j u).
    std::vector<Complex> minus_factors;
    for (const Complex& d : fac.inner_roots) minus_factors.push_back(-d);
    const std::vector<double> pm = expand_product(minus_factors);
    // P_plus ascending in t: leading * prod (t - mu) factored as
    // [leading * prod(-mu)] * prod(1 - t/mu).
    std::vector<Complex> plus_factors;
    for (const Complex& m : fac.outer_roots) plus_factors.push_back(-1.0 / m);
    std::vector<double> pp = expand_product(plus_factors);
    Complex constant = fac.leading;
    for (const Complex& m : fac.outer_roots) constant *= -m;
    for (double& x : pp) x *= constant.real();

    SeriesTriple qm = invert_series(pm, fac.max_inner, count);
    const double outer_decay = std::isfinite(fac.min_outer) ? 1.0 / fac.min_outer : 0.0;
    SeriesTriple qp = invert_series(pp, outer_decay, count);

    InverseFactorCoeffs out;
    out.q_minus = std::move(qm.value);
    out.log_q_minus = std::move(qm.log_mag);
    out.sign_q_minus = std::move(qm.sign);
    out.q_plus = std::move(qp.value);
    out.log_q_plus = std::move(qp.log_mag);
    out.sign_q_plus = std::move(qp.sign);
    return out;
}

namespace {

// log of the Euclidean norm of a vector given as (log|.|, sign), by
// max-extracted logsumexp of the squares.
double log_norm_from_logs(const std::vector<double>& lg) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double x : lg) peak = std::max(peak, x);
    if (!std::isfinite(peak)) return peak;
    double acc = 0.0;
    for (double x : lg)
        if (std::isfinite(x)) acc += std::exp(2.0 * (x - peak));
    return peak + 0.5 * std::log(acc);
}

}  // namespace

CertificateResult ill_conditioning_certificate(const BandedToeplitz& T,
                                               const WienerHopfFactorization& fac,
                                               const InverseFactorCoeffs& coeffs) {
    if (fac.wind == 0)
        throw ZeroWindingNumber("certificate: winding number is zero, no decaying witness");
    if (coeffs.length() < static_cast<std::size_t>(T.n))
        throw DimensionMismatch("certificate: need at least n inverse-factor coefficients");

    const int n = T.n;
    // wind > 0: the q_minus prefix annihilates interior rows of T.  wind < 0:
    // with entries xi_{k-j}, the q_plus prefix must be reversed to line the
    // decay up with the convolution orientation.
    std::vector<double> w_log(n);
    std::vector<int> w_sign(n);
    CertificateResult res;
    res.witness.resize(n);
    for (int k = 0; k < n; ++k) {
        const std::size_t src = fac.wind > 0 ? k : static_cast<std::size_t>(n - 1 - k);
        if (fac.wind > 0) {
            res.witness[k] = coeffs.q_minus[src];
            w_log[k] = coeffs.log_q_minus[src];
            w_sign[k] = coeffs.sign_q_minus[src];
        } else {
            res.witness[k] = coeffs.q_plus[src];
            w_log[k] = coeffs.log_q_plus[src];
            w_sign[k] = coeffs.sign_q_plus[src];
        }
    }

    // In exact arithmetic T w has at most `width` nonzero rows.  Correlating
    // the symbol with the full inverse-factor series telescopes to zero on
    // every row whose band window stays inside the witness — including the
    // leading edge, because the series' virtual negative-index coefficients
    // vanish whenever the winding is nonzero.  Only the rows at the decaying
    // end read coefficients past the witness.  Evaluating those few sums
    // directly keeps the ratio exact where a matvec would instead return the
    // rounding residue of the cancelled interior rows (~eps * ||w||).
    const int width = fac.wind > 0 ? T.upper : T.lower;
    const std::size_t need = static_cast<std::size_t>(n) + static_cast<std::size_t>(width);
    InverseFactorCoeffs extended;
    const InverseFactorCoeffs* tail = &coeffs;
    if (coeffs.length() < need) {
        extended = inverse_factor_coefficients(fac, need);
        tail = &extended;
    }
    const std::vector<double>& t_log = fac.wind > 0 ? tail->log_q_minus : tail->log_q_plus;
    const std::vector<int>& t_sign = fac.wind > 0 ? tail->sign_q_minus : tail->sign_q_plus;

    // wind > 0: row n-1-b of T w equals -sum_{d=b+1..upper} xi_d q[n-1-b+d];
    // wind < 0 mirrors this on the leading rows with the subdiagonal entries.
    std::vector<double> y_log;
    for (int b = 0; b < width && b < n; ++b) {
        double peak = -std::numeric_limits<double>::infinity();
        for (int d = b + 1; d <= width; ++d) {
            const double band = T.band[static_cast<std::size_t>(
                fac.wind > 0 ? d + T.lower : T.lower - d)];
            const std::size_t k = static_cast<std::size_t>(n - 1 - b + d);
            if (band != 0.0 && t_sign[k] != 0)
                peak = std::max(peak, t_log[k] + std::log(std::abs(band)));
        }
        if (!std::isfinite(peak)) continue;
        double acc = 0.0;
        for (int d = b + 1; d <= width; ++d) {
            const double band = T.band[static_cast<std::size_t>(
                fac.wind > 0 ? d + T.lower : T.lower - d)];
            const std::size_t k = static_cast<std::size_t>(n - 1 - b + d);
            if (band != 0.0 && t_sign[k] != 0)
                acc += (band > 0.0 ? 1.0 : -1.0) * t_sign[k] *
                       std::exp(t_log[k] + std::log(std::abs(band)) - peak);
        }
        if (acc != 0.0) y_log.push_back(peak + std::log(std::abs(acc)));
    }

    res.log_ratio = log_norm_from_logs(y_log) - log_norm_from_logs(w_log);
    res.ratio = std::exp(res.log_ratio);
    return res;
}

double exponential_rate(const RootProfile& profile) {
    if (profile.on_circle > 0)
        throw ZeroOnUnitCircle("rate: root within unit_tol of the unit circle");
    double rate = std::numeric_limits<double>::infinity();
    if (profile.max_inside > 0.0) rate = std::min(rate, std::log(1.0 / profile.max_inside));
    if (std::isfinite(profile.min_outside)) rate = std::min(rate, std::log(profile.min_outside));
    return rate;
}

void write_matrix_market(const BandedToeplitz& T, std::ostream& out) {
    std::size_t nnz = 0;
    for (int d = -T.lower; d <= T.upper; ++d)
        if (T.band[d + T.lower] != 0.0) nnz += static_cast<std::size_t>(T.n - std::abs(d));
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << T.n << ' ' << T.n << ' ' << nnz << '\n';
    for (int i = 0; i < T.n; ++i)
        for (int j = std::max(0, i - T.lower); j <= std::min(T.n - 1, i + T.upper); ++j)
            if (T.entry(i, j) != 0.0)
                out << i + 1 << ' ' << j + 1 << ' ' << detail::format_double(T.entry(i, j))
                    << '\n';
}

void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& out) {
    out << "n,sigma_max,sigma_min,kappa,certificate_ratio\n";
    for (const SweepPoint& p : points)
        out << p.n << ',' << detail::format_double(p.sigma_max) << ','
            << detail::format_double(p.sigma_min) << ',' << detail::format_double(p.kappa) << ','
            << detail::format_double(p.certificate_ratio) << '\n';
}

}  // namespace tcond

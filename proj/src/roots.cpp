#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tcond/errors.hpp"
#include "tcond/poly.hpp"

namespace tcond {

namespace {

struct HornerEval {
    Complex value;
    Complex derivative;
    double error_bound;  // running sum |c_j| |t|^j, scales machine error
};

template <typename It>
HornerEval horner_over(It first, It last, Complex t) {
    HornerEval h{0.0, 0.0, 0.0};
    const double at = std::abs(t);
    for (It it = first; it != last; ++it) {
        h.derivative = h.derivative * t + h.value;
        h.value = h.value * t + *it;
        h.error_bound = h.error_bound * at + std::abs(*it);
    }
    return h;
}

// Evaluation that cannot overflow at large |z|: outside the unit circle the
// reversed polynomial q(u) = z^{-d} p(z) is evaluated at u = 1/z, whose
// coefficients walk the original ones forward.  All frame quantities
// (value, derivative, error bound) then stay bounded by sum |c_j|.
struct FrameEval {
    HornerEval h;        // value of p (inner frame) or q (outer frame)
    bool outer = false;  // reversed frame in use
    Complex newton_denominator;  // w = newton_numerator / newton_denominator
    Complex newton_numerator;
    double log_abs;  // log |p(z)|, -inf at an exact zero
};

FrameEval frame_eval(const std::vector<double>& c, Complex z) {
    const int d = static_cast<int>(c.size()) - 1;
    FrameEval f;
    if (std::abs(z) <= 1.0) {
        f.h = horner_over(c.rbegin(), c.rend(), z);
        f.newton_numerator = f.h.value;
        f.newton_denominator = f.h.derivative;
        f.log_abs = std::log(std::abs(f.h.value));
    } else {
        const Complex u = 1.0 / z;
        f.outer = true;
        f.h = horner_over(c.begin(), c.end(), u);
        // p / p' = z q / (d q - u q')
        f.newton_numerator = z * f.h.value;
        f.newton_denominator = static_cast<double>(d) * f.h.value - u * f.h.derivative;
        f.log_abs = d * std::log(std::abs(z)) + std::log(std::abs(f.h.value));
    }
    return f;
}

// Scaled residual contract: log |p(z)| <= log(tol * max|xi| * (1+|z|)^deg),
// evaluated in logs so large degrees cannot overflow.
bool residual_ok(const std::vector<double>& c, double max_abs_coeff, Complex z, double tol) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    const double log_abs = frame_eval(c, z).log_abs;
    if (log_abs == -std::numeric_limits<double>::infinity()) return true;
    const double bound =
        std::log(tol) + std::log(max_abs_coeff) + (c.size() - 1.0) * std::log1p(std::abs(z));
    return log_abs <= bound;
}

double worst_scaled_residual(const std::vector<double>& c, double max_abs_coeff,
                             const std::vector<Complex>& roots) {
    double worst = 0.0;
    for (const Complex& z : roots) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return std::numeric_limits<double>::infinity();
        const double log_abs = frame_eval(c, z).log_abs;
        if (log_abs == -std::numeric_limits<double>::infinity()) continue;
        const double log_scale =
            std::log(max_abs_coeff) + (c.size() - 1.0) * std::log1p(std::abs(z));
        worst = std::max(worst, std::exp(log_abs - log_scale));
    }
    return worst;
}

// Simultaneous Newton with Aberth's repulsion term, Gauss-Seidel ordering.
// Returns false when corrections fail to settle within the sweep budget.
bool aberth(const std::vector<double>& c, std::vector<Complex>& z, int max_sweeps) {
    const int d = static_cast<int>(c.size()) - 1;
    std::vector<bool> settled(d, false);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst_step = 0.0;
        for (int i = 0; i < d; ++i) {
            if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) {
                z[i] = std::polar(1.0 + 0.1 * i, 0.3 * i);  // recover a usable point
                settled[i] = false;
                worst_step = 1.0;
                continue;
            }
            const FrameEval f = frame_eval(c, z[i]);
            const double av = std::abs(f.h.value);
            if (!std::isfinite(av) || !std::isfinite(f.h.error_bound)) {
                z[i] *= 0.5;  // never settle on an overflowed evaluation
                settled[i] = false;
                worst_step = 1.0;
                continue;
            }
            if (av <= 4.0 * 2.220446049250313e-16 * f.h.error_bound) {
                settled[i] = true;  // residual at machine level, leave the point alone
                continue;
            }
            settled[i] = false;
            if (f.newton_denominator == Complex(0.0)) {
                z[i] += 1e-6 * (1.0 + std::abs(z[i])) * std::polar(1.0, 0.7);
                worst_step = 1.0;
                continue;
            }
            const Complex w = f.newton_numerator / f.newton_denominator;
            Complex repulsion = 0.0;
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                Complex diff = z[i] - z[j];
                if (diff == Complex(0.0)) diff = Complex(1e-12, 1e-12) * (1.0 + std::abs(z[i]));
                repulsion += 1.0 / diff;
            }
            const Complex denom = 1.0 - w * repulsion;
            if (denom == Complex(0.0)) {
                z[i] += 1e-6 * (1.0 + std::abs(z[i])) * std::polar(1.0, 1.3);
                worst_step = 1.0;
                continue;
            }
            const Complex corr = w / denom;
            z[i] -= corr;
            worst_step = std::max(worst_step, std::abs(corr) / (1.0 + std::abs(z[i])));
        }
        if (worst_step <= 1e-14) return true;
        if (std::all_of(settled.begin(), settled.end(), [](bool b) { return b; })) return true;
    }
    return false;
}

std::vector<Complex> companion_eigenvalues(const std::vector<double>& c) {
    const int d = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) m(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) m(i, d - 1) = -c[i] / c[d];
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    std::vector<Complex> roots(d);
    for (int i = 0; i < d; ++i) roots[i] = solver.eigenvalues()[i];
    // A few Newton polish steps sharpen eigenvalues to the residual contract.
    for (Complex& z : roots) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
        for (int step = 0; step < 6; ++step) {
            const FrameEval f = frame_eval(c, z);
            if (f.newton_denominator == Complex(0.0)) break;
            const Complex corr = f.newton_numerator / f.newton_denominator;
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) break;
            z -= corr;
            if (std::abs(corr) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
    }
    return roots;
}

void sort_roots(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

}  // namespace

std::vector<Complex> find_roots(const KacPolynomial& p, double tol) {
    if (p.degree() < 1) throw std::invalid_argument("roots: degree must be at least 1");
    if (p.coeffs.back() == 0.0) throw ZeroLeadingCoefficient("roots: leading coefficient is zero");
    if (!(tol > 0.0)) throw std::invalid_argument("roots: tolerance must be positive");

    // Exact zero trailing coefficients are roots at the origin; deflate them.
    std::size_t origin = 0;
    while (p.coeffs[origin] == 0.0) ++origin;
    std::vector<double> c(p.coeffs.begin() + origin, p.coeffs.end());

    double max_abs = 0.0;
    for (double x : p.coeffs) max_abs = std::max(max_abs, std::abs(x));
    for (double& x : c) x /= max_abs;

    std::vector<Complex> roots;
    const int d = static_cast<int>(c.size()) - 1;
    if (d == 1) {
        roots = {Complex(-c[0] / c[1], 0.0)};
    } else if (d == 2) {
        const Complex b = c[1], a = c[2], c0 = c[0];
        const Complex sq = std::sqrt(b * b - 4.0 * a * c0);
        const Complex t = (std::real(std::conj(b) * sq) >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
        roots = {t / a, c0 / t};
    } else {
        // Initial points on a circle through the root-modulus geometric mean,
        // with a fixed angular offset so no start point is real.
        const double raw = std::pow(std::abs(c[0] / c[d]), 1.0 / d);
        const double rho = std::clamp(raw, 1e-3, 1e3);
        roots.resize(d);
        for (int i = 0; i < d; ++i) {
            const double angle = 2.0 * std::numbers::pi * (i + 0.25) / d + 0.5;
            roots[i] = std::polar(rho, angle);
        }
        const bool converged = aberth(c, roots, 400);
        bool ok = converged;
        if (ok)
            for (const Complex& z : roots) ok = ok && residual_ok(c, 1.0, z, tol);
        if (!ok) roots = companion_eigenvalues(c);
    }

    for (const Complex& z : roots)
        if (!residual_ok(c, 1.0, z, tol))
            throw NonConvergence("roots: residual contract violated", 400,
                                 worst_scaled_residual(c, 1.0, roots));

    roots.insert(roots.end(), origin, Complex(0.0, 0.0));
    sort_roots(roots);
    return roots;
}

}  // namespace tcond

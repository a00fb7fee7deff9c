#pragma once

#include <complex>
#include <limits>
#include <vector>

namespace tcond {

using Complex = std::complex<double>;

// Polynomial sum xi_j z^j with real coefficients, j = 0..degree.
struct KacPolynomial {
    std::vector<double> coeffs;

    KacPolynomial() = default;
    explicit KacPolynomial(std::vector<double> c) : coeffs(std::move(c)) {}
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Laurent polynomial sum xi_j t^j, j = -r..s, with xi_{-r} != 0 and xi_s != 0.
// coeffs[j + r] holds xi_j.
struct LaurentSymbol {
    int r = 0;
    int s = 0;
    std::vector<double> coeffs;
};

// Validates band widths; throws std::invalid_argument on zero end coefficients
// or a length mismatch.
LaurentSymbol make_symbol(int r, int s, std::vector<double> coeffs);

// Q(z) = z^r P(z); shares the coefficient vector of the symbol.
KacPolynomial symbol_numerator(const LaurentSymbol& sym);

// P(e^{i theta}); evaluated through Q to keep a nested scheme.
Complex symbol_eval_unit(const LaurentSymbol& sym, double theta);

// Root census with respect to the unit circle at a given tolerance.
struct RootProfile {
    std::vector<Complex> roots;
    int inside = 0;    // |z| < 1 - unit_tol
    int on_circle = 0; // | |z| - 1 | <= unit_tol
    int outside = 0;   // |z| > 1 + unit_tol
    double max_inside = 0.0;  // 0 when no inside roots
    double min_outside = std::numeric_limits<double>::infinity();
    double unit_tol = 0.0;
    double nearest_gap = std::numeric_limits<double>::infinity();  // min | |z| - 1 |
};

// Power sum S(rho) = sum_{j=0..n} rho^{2j} with derivatives; sigma = sqrt(S)
// is the normalization making E |G(rho e^{i theta})/sigma|^2 = 1.
struct RadialScale {
    int degree = 0;
    double radius = 1.0;
    double sum = 1.0;          // S
    double d1 = 0.0;           // S'
    double d2 = 0.0;           // S''
    double d3 = 0.0;           // S'''
    double dlog1 = 0.0;        // (log S)'
    double dlog2 = 0.0;        // (log S)''
    double sigma = 1.0;
};

Complex evaluate(const KacPolynomial& p, Complex z);

RadialScale radial_scale(int degree, double radius);

Complex evaluate_normalized(const KacPolynomial& p, double radius, double theta);

// All complex roots via simultaneous iteration, companion-matrix fallback.
// Contract: |evaluate(p, root)| <= tol * max|xi_j| * (1 + |root|)^degree and
// the multiset is invariant under coefficient scaling.
// Throws ZeroLeadingCoefficient and NonConvergence.
std::vector<Complex> find_roots(const KacPolynomial& p, double tol = 1e-9);

// unit_tol must lie in (0, 0.1).
RootProfile classify_roots(const std::vector<Complex>& roots, double unit_tol);

// wind(P) = (roots of Q inside D) - r.  Requires profile.on_circle == 0;
// profile must describe the roots of symbol_numerator(sym).
int winding_algebraic(const LaurentSymbol& sym, const RootProfile& profile);

// Argument-principle winding of P over the unit circle: unwrapped phase
// divided by 2 pi, with the grid doubled until two successive answers agree.
// Requires min over the grid of |P| > 1e-6, else NearUnitCircleZero.
int winding_contour(const LaurentSymbol& sym, int grid_size = 512);

// | sum_{|a| < radius} log(radius/|a|) - avg log|p(radius e^{i theta})|
//   + log|p(0)| |.  Throws RootAtOrigin when |p(0)| <= 1e-12 and
// RootOnContour when a root lies within 1e-9 of the contour.
double jensen_defect(const KacPolynomial& p, double radius, int quad_nodes = 4096);

enum class MahlerMode { Roots, Quadrature };

// log M(p): root form log|xi_n| + sum log max(1,|a_j|), or the unit-circle
// average of log|p|.  Quadrature mode requires no root within 1e-9 of the
// circle (RootOnContour).
double log_mahler(const KacPolynomial& p, MahlerMode mode, int quad_nodes = 4096);

// Uniform average of log|p(radius e^{i theta})| over `nodes` angles, with the
// integrand floored at log(1e-300).  floor_hits counts floored nodes.
struct LogAverage {
    double value = 0.0;
    std::size_t floor_hits = 0;
    int nodes = 0;
};
LogAverage mean_log_abs_on_circle(const KacPolynomial& p, double radius, int nodes);

}  // namespace tcond

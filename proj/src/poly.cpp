#include "tcond/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tcond/errors.hpp"

namespace tcond {

LaurentSymbol make_symbol(int r, int s, std::vector<double> coeffs) {
    if (r < 0 || s < 0) throw std::invalid_argument("symbol: band widths must be nonnegative");
    if (coeffs.size() != static_cast<std::size_t>(r + s + 1))
        throw std::invalid_argument("symbol: need r + s + 1 coefficients");
    if (coeffs.front() == 0.0 || coeffs.back() == 0.0)
        throw std::invalid_argument("symbol: end coefficients xi_{-r}, xi_s must be nonzero");
    return LaurentSymbol{r, s, std::move(coeffs)};
}

KacPolynomial symbol_numerator(const LaurentSymbol& sym) { return KacPolynomial(sym.coeffs); }

Complex evaluate(const KacPolynomial& p, Complex z) {
    Complex acc = 0.0;
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Complex symbol_eval_unit(const LaurentSymbol& sym, double theta) {
    const Complex z = std::polar(1.0, theta);
    return evaluate(symbol_numerator(sym), z) * std::polar(1.0, -sym.r * theta);
}

RadialScale radial_scale(int degree, double radius) {
    if (degree < 0) throw std::invalid_argument("radial scale: negative degree");
    if (!(radius > 0.0)) throw std::invalid_argument("radial scale: radius must be positive");
    RadialScale out;
    out.degree = degree;
    out.radius = radius;
    double s = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    // Exact power sums: term j contributes radius^{2j}; derivative factors are
    // falling factorials of c = 2j.
    for (int j = 0; j <= degree; ++j) {
        const double c = 2.0 * j;
        const double t = std::pow(radius, c);
        s += t;
        if (j >= 1) {
            d1 += c * t / radius;
            d2 += c * (c - 1.0) * t / (radius * radius);
            d3 += c * (c - 1.0) * (c - 2.0) * t / (radius * radius * radius);
        }
    }
    out.sum = s;
    out.d1 = d1;
    out.d2 = d2;
    out.d3 = d3;
    out.dlog1 = d1 / s;
    out.dlog2 = (d2 * s - d1 * d1) / (s * s);
    out.sigma = std::sqrt(s);
    return out;
}

Complex evaluate_normalized(const KacPolynomial& p, double radius, double theta) {
    const RadialScale scale = radial_scale(p.degree(), radius);
    return evaluate(p, std::polar(radius, theta)) / scale.sigma;
}

RootProfile classify_roots(const std::vector<Complex>& roots, double unit_tol) {
    if (!(unit_tol > 0.0) || !(unit_tol < 0.1))
        throw std::invalid_argument("root classification: unit_tol must lie in (0, 0.1)");
    RootProfile profile;
    profile.roots = roots;
    profile.unit_tol = unit_tol;
    for (const Complex& z : roots) {
        const double a = std::abs(z);
        profile.nearest_gap = std::min(profile.nearest_gap, std::abs(a - 1.0));
        if (a < 1.0 - unit_tol) {
            ++profile.inside;
            profile.max_inside = std::max(profile.max_inside, a);
        } else if (a > 1.0 + unit_tol) {
            ++profile.outside;
            profile.min_outside = std::min(profile.min_outside, a);
        } else {
            ++profile.on_circle;
        }
    }
    return profile;
}

int winding_algebraic(const LaurentSymbol& sym, const RootProfile& profile) {
    if (profile.on_circle > 0)
        throw ZeroOnUnitCircle("winding: symbol has a root within unit_tol of the unit circle");
    if (profile.roots.size() != static_cast<std::size_t>(sym.r + sym.s))
        throw DimensionMismatch("winding: profile does not match the symbol degree");
    return profile.inside - sym.r;
}

namespace {

// Total unwrapped phase of P over one loop, on a uniform closed grid.
// Returns false when a step turns by more than pi/2 (grid too coarse).
bool contour_winding_pass(const LaurentSymbol& sym, int grid_size, int& wind_out) {
    double total = 0.0;
    const Complex first = symbol_eval_unit(sym, 0.0);
    Complex prev = first;
    double min_abs = std::abs(first);
    bool fine = true;
    for (int k = 1; k <= grid_size; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / grid_size;
        const Complex cur = k == grid_size ? first : symbol_eval_unit(sym, theta);
        min_abs = std::min(min_abs, std::abs(cur));
        const double step = std::arg(cur / prev);
        if (std::abs(step) > 0.5 * std::numbers::pi) fine = false;
        total += step;
        prev = cur;
    }
    if (min_abs <= 1e-6)
        throw NearUnitCircleZero("winding: |P| dips to " + std::to_string(min_abs) +
                                 " on the unit circle");
    wind_out = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
    return fine;
}

}  // namespace

int winding_contour(const LaurentSymbol& sym, int grid_size) {
    if (grid_size < 8) throw std::invalid_argument("winding: grid_size must be at least 8");
    int prev_wind = 0;
    bool have_prev = false;
    for (int n = grid_size; n <= (1 << 22); n *= 2) {
        int wind = 0;
        const bool fine = contour_winding_pass(sym, n, wind);
        if (fine && have_prev && wind == prev_wind) return wind;
        if (fine) {
            have_prev = true;
            prev_wind = wind;
        } else {
            have_prev = false;
        }
    }
    throw NonConvergence("winding: grid refinement did not stabilize", 22, 0.0);
}

LogAverage mean_log_abs_on_circle(const KacPolynomial& p, double radius, int nodes) {
    if (nodes < 64) throw std::invalid_argument("log average: need at least 64 nodes");
    if (!(radius > 0.0)) throw std::invalid_argument("log average: radius must be positive");
    constexpr double kFloor = -690.77552789821368;  // log(1e-300)
    LogAverage out;
    out.nodes = nodes;
    double acc = 0.0;
    // Midpoint offset keeps the grid off the real axis, where sign patterns
    // of integer coefficients can produce exact zeros.
    for (int k = 0; k < nodes; ++k) {
        const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * (k + 0.5) / nodes;
        const double a = std::abs(evaluate(p, std::polar(radius, theta)));
        if (a < 1e-300) {
            ++out.floor_hits;
            acc += kFloor;
        } else {
            acc += std::log(a);
        }
    }
    out.value = acc / nodes;
    return out;
}

double jensen_defect(const KacPolynomial& p, double radius, int quad_nodes) {
    if (p.coeffs.empty() || std::abs(p.coeffs.front()) <= 1e-12)
        throw RootAtOrigin("jensen: |p(0)| <= 1e-12");
    if (!(radius > 0.0)) throw std::invalid_argument("jensen: radius must be positive");
    const std::vector<Complex> roots = find_roots(p);
    double inner = 0.0;
    for (const Complex& z : roots) {
        const double a = std::abs(z);
        if (std::abs(a - radius) <= 1e-9)
            throw RootOnContour("jensen: root within 1e-9 of the contour");
        if (a < radius) inner += std::log(radius / a);
    }
    const double avg = mean_log_abs_on_circle(p, radius, quad_nodes).value;
    return std::abs(inner - avg + std::log(std::abs(p.coeffs.front())));
}

double log_mahler(const KacPolynomial& p, MahlerMode mode, int quad_nodes) {
    if (p.coeffs.empty() || p.coeffs.back() == 0.0)
        throw ZeroLeadingCoefficient("mahler: zero leading coefficient");
    const std::vector<Complex> roots = find_roots(p);
    if (mode == MahlerMode::Roots) {
        double acc = std::log(std::abs(p.coeffs.back()));
        for (const Complex& z : roots) {
            const double a = std::abs(z);
            if (a > 1.0) acc += std::log(a);
        }
        return acc;
    }
    for (const Complex& z : roots)
        if (std::abs(std::abs(z) - 1.0) <= 1e-9)
            throw RootOnContour("mahler: root within 1e-9 of the unit circle");
    return mean_log_abs_on_circle(p, 1.0, quad_nodes).value;
}

}  // namespace tcond

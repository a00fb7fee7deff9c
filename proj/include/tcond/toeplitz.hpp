#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "tcond/poly.hpp"

namespace tcond {

// n x n Toeplitz truncation stored by band: entry (j,k) = xi_{k-j} for
// -lower <= k-j <= upper, else 0.  band[d + lower] holds xi_d.
struct BandedToeplitz {
    int n = 0;
    int lower = 0;  // r: subdiagonal count
    int upper = 0;  // s: superdiagonal count
    std::vector<double> band;

    double entry(int row, int col) const {
        const int d = col - row;
        if (d < -lower || d > upper) return 0.0;
        return band[static_cast<std::size_t>(d + lower)];
    }
};

BandedToeplitz build(const LaurentSymbol& sym, int n);

// Band matrix without the genuine-width requirement of LaurentSymbol
// (allows zero end diagonals, e.g. a pure shift).
BandedToeplitz from_band(int n, int lower, int upper, std::vector<double> band);

// Exact band products in O(n (lower+upper+1)); DimensionMismatch on bad size.
std::vector<double> matvec(const BandedToeplitz& T, const std::vector<double>& x);
std::vector<double> matvec_transpose(const BandedToeplitz& T, const std::vector<double>& x);

struct SingularTriple {
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double kappa = std::numeric_limits<double>::infinity();  // +inf when sigma_min < 1e-290
};

enum class SingularMethod { Auto, Dense, Banded };

// Extreme singular values to relative tol.  Auto takes the dense full
// decomposition for small n and a banded iterative path (Lanczos on the
// normal form, inverse iteration through a banded LU for sigma_min) above.
// Throws NonConvergence with iteration diagnostics.
SingularTriple extreme_singular_values(const BandedToeplitz& T, double tol = 1e-10,
                                       SingularMethod method = SingularMethod::Auto);

// max over the unit circle of |P|, grid scan plus golden-section polish.
// grid_size must be >= 64.
double symbol_sup_norm(const LaurentSymbol& sym, int grid_size = 4096);

// P(t) = P_minus(t) * t^wind * P_plus(t) with
//   P_minus(t) = prod_j (1 - inner_j / t),
//   P_plus(t)  = leading * prod_k (t - outer_k).
struct WienerHopfFactorization {
    std::vector<Complex> inner_roots;  // |z| < 1
    std::vector<Complex> outer_roots;  // |z| > 1
    double leading = 1.0;              // xi_s
    int wind = 0;
    double max_inner = 0.0;                                       // 0 when empty
    double min_outer = std::numeric_limits<double>::infinity();   // +inf when empty
};

// Splits the root profile of symbol_numerator(sym); requires
// profile.on_circle == 0 (ZeroOnUnitCircle).  The reconstruction identity is
// validated on a 256-point unit-circle grid to 1e-8 sup-relative error.
WienerHopfFactorization wiener_hopf(const LaurentSymbol& sym, const RootProfile& profile);

Complex minus_factor_eval(const WienerHopfFactorization& fac, Complex t);
Complex plus_factor_eval(const WienerHopfFactorization& fac, Complex t);

// sup over grid of |P_minus t^wind P_plus - P| divided by sup of |P|.
double factorization_residual(const LaurentSymbol& sym, const WienerHopfFactorization& fac,
                              int grid_size = 256);

// Power-series coefficients of the inverse factors:
//   1/P_minus(t) = sum_j q_minus[j] t^{-j},  1/P_plus(t) = sum_j q_plus[j] t^j.
// Both decay geometrically; log-magnitude/sign companions stay exact after
// the doubles underflow.
struct InverseFactorCoeffs {
    std::vector<double> q_minus;
    std::vector<double> q_plus;
    std::vector<double> log_q_minus;  // log|q_minus[j]|, -inf at exact zeros
    std::vector<double> log_q_plus;
    std::vector<int> sign_q_minus;    // -1, 0, +1
    std::vector<int> sign_q_plus;
    std::size_t length() const { return q_minus.size(); }
};

InverseFactorCoeffs inverse_factor_coefficients(const WienerHopfFactorization& fac, std::size_t count);

// Near-kernel witness for wind != 0: the first n inverse-factor coefficients
// (q_plus for wind < 0, q_minus for wind > 0).  ratio = ||T w||_2 / ||w||_2
// bounds sigma_min(T) from above; log_ratio is computed in log space and
// stays meaningful after ratio underflows.
struct CertificateResult {
    std::vector<double> witness;
    double ratio = 0.0;
    double log_ratio = 0.0;
};

// Throws ZeroWindingNumber when fac.wind == 0 and DimensionMismatch when
// coeffs.length() < T.n.
CertificateResult ill_conditioning_certificate(const BandedToeplitz& T,
                                               const WienerHopfFactorization& fac,
                                               const InverseFactorCoeffs& coeffs);

// min(log(1/max_inside), log(min_outside)); +inf conventions on empty sides.
// Requires profile.on_circle == 0 (ZeroOnUnitCircle).
double exponential_rate(const RootProfile& profile);

// MatrixMarket coordinate format, 1-indexed, general real.
void write_matrix_market(const BandedToeplitz& T, std::ostream& out);

// One sweep point for CSV export.
struct SweepPoint {
    int n = 0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double kappa = 0.0;
    double certificate_ratio = 0.0;  // NaN when wind = 0
};

// Header "n,sigma_max,sigma_min,kappa,certificate_ratio".
void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& out);

}  // namespace tcond

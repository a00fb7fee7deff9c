#include "tcond/coeff_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tcond/detail/format.hpp"

namespace tcond {

namespace {

constexpr double kMomentTol = 1e-12;

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> cum(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cum.begin());
    cum.back() = 1.0;  // guard the last bucket against rounding in the sum
    return cum;
}

}  // namespace

CoefficientDistribution CoefficientDistribution::rademacher() {
    return CoefficientDistribution(DistKind::Rademacher, "rademacher");
}

CoefficientDistribution CoefficientDistribution::gaussian() {
    return CoefficientDistribution(DistKind::StandardGaussian, "gaussian");
}

CoefficientDistribution CoefficientDistribution::discrete(std::vector<double> values,
                                                          std::vector<double> probs,
                                                          bool rescale_to_unit_variance) {
    if (values.size() != probs.size())
        throw std::invalid_argument("discrete law: values and probs must have equal length");
    if (values.size() < 2)
        throw std::invalid_argument("discrete law: need at least two atoms");
    double total = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw std::invalid_argument("discrete law: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("discrete law: probabilities must sum to 1");
    for (double& p : probs) p /= total;

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("discrete law: atoms must be distinct");

    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += probs[i] * values[i];
    if (std::abs(mean) > kMomentTol)
        throw std::invalid_argument("discrete law: mean must be 0, got " + detail::format_double(mean));
    for (std::size_t i = 0; i < values.size(); ++i) var += probs[i] * values[i] * values[i];
    if (rescale_to_unit_variance) {
        if (!(var > 0.0)) throw std::invalid_argument("discrete law: zero variance");
        const double scale = 1.0 / std::sqrt(var);
        for (double& v : values) v *= scale;
    } else if (std::abs(var - 1.0) > kMomentTol) {
        throw std::invalid_argument("discrete law: variance must be 1, got " +
                                    detail::format_double(var));
    }

    CoefficientDistribution d(DistKind::SymmetricDiscrete, "discrete");
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    d.cum_ = cumulative(d.probs_);
    d.name_ = d.token();
    return d;
}

CoefficientDistribution CoefficientDistribution::parse(const std::string& token) {
    if (token == "rademacher") return rademacher();
    if (token == "gaussian") return gaussian();
    const std::string prefix = "discrete:";
    if (token.rfind(prefix, 0) == 0) {
        std::vector<double> values, probs;
        std::stringstream body(token.substr(prefix.size()));
        std::string atom;
        while (std::getline(body, atom, ';')) {
            const auto comma = atom.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("discrete token: atom must be value,prob: " + atom);
            try {
                values.push_back(std::stod(atom.substr(0, comma)));
                probs.push_back(std::stod(atom.substr(comma + 1)));
            } catch (const std::exception&) {
                throw std::invalid_argument("discrete token: bad number in atom: " + atom);
            }
        }
        return discrete(std::move(values), std::move(probs));
    }
    throw std::invalid_argument("unknown distribution token: " + token);
}

std::string CoefficientDistribution::token() const {
    switch (kind_) {
        case DistKind::Rademacher: return "rademacher";
        case DistKind::StandardGaussian: return "gaussian";
        case DistKind::SymmetricDiscrete: {
            std::string out = "discrete:";
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (i) out += ';';
                out += detail::format_double(values_[i]);
                out += ',';
                out += detail::format_double(probs_[i]);
            }
            return out;
        }
    }
    return "";
}

double CoefficientDistribution::mean() const {
    if (kind_ != DistKind::SymmetricDiscrete) return 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * values_[i];
    return m;
}

double CoefficientDistribution::variance() const {
    if (kind_ != DistKind::SymmetricDiscrete) return 1.0;
    double v = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) v += probs_[i] * values_[i] * values_[i];
    return v;
}

double CoefficientDistribution::fourth_moment() const {
    switch (kind_) {
        case DistKind::Rademacher: return 1.0;
        case DistKind::StandardGaussian: return 3.0;
        case DistKind::SymmetricDiscrete: {
            double m4 = 0.0;
            for (std::size_t i = 0; i < values_.size(); ++i) {
                const double v2 = values_[i] * values_[i];
                m4 += probs_[i] * v2 * v2;
            }
            return m4;
        }
    }
    return 0.0;
}

double CoefficientDistribution::draw(const CounterRng& rng, std::uint64_t index) const {
    switch (kind_) {
        case DistKind::Rademacher: return (rng.word(index) >> 63) ? -1.0 : 1.0;
        case DistKind::StandardGaussian: return rng.gaussian(index);
        case DistKind::SymmetricDiscrete: {
            const double u = rng.uniform(index);
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
            const auto pos = std::min<std::size_t>(it - cum_.begin(), values_.size() - 1);
            return values_[pos];
        }
    }
    return 0.0;
}

std::vector<double> sample(const CoefficientDistribution& dist, std::size_t count,
                           std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed, stream);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = dist.draw(rng, i);
    return out;
}

std::vector<double> symmetrize(const CoefficientDistribution& dist, std::size_t count,
                               std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed, stream);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double a = dist.draw(rng, 2 * i);
        const double b = dist.draw(rng, 2 * i + 1);
        out[i] = (a == b) ? 0.0 : b - a;
    }
    return out;
}

namespace {

// max over the grid of P_hat(|x| <= t) / sqrt(t); 0/0 counts as 0.  The
// denominator is passed separately so callers can measure P(0 < |x| <= t)
// against the full sample size after dropping exact zeros.
double anti_concentration_hat(const std::vector<double>& abs_sorted,
                              const std::vector<double>& t_grid, std::size_t denom) {
    double worst = 0.0;
    const double n = static_cast<double>(denom);
    for (double t : t_grid) {
        const auto it = std::upper_bound(abs_sorted.begin(), abs_sorted.end(), t);
        const double frac = static_cast<double>(it - abs_sorted.begin()) / n;
        if (frac == 0.0) continue;
        if (t == 0.0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, frac / std::sqrt(t));
    }
    return worst;
}

// Worst sliding-window count: max number of points in any closed interval of
// width 2*gamma, i.e. n * sup_u P_hat(|x - u| <= gamma).
std::size_t worst_window(const std::vector<double>& sorted, double gamma) {
    std::size_t worst = 0, j = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (j < i) j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] <= sorted[i] + 2.0 * gamma) ++j;
        worst = std::max(worst, j - i + 1);
    }
    return worst;
}

// Any (M, gamma, q) witness: start from q = 1/2 with M the empirical
// (1 - q/2)-quantile of |x|, then the largest dyadic gamma whose window mass
// stays below 1-q.  Laws sitting exactly at the 1-q boundary (e.g. two-atom
// laws at q = 1/2) fall through to smaller q instead of flipping a coin on
// sampling noise.
SmallBallWitness small_ball_witness(const std::vector<double>& sorted,
                                    const std::vector<double>& abs_sorted) {
    SmallBallWitness w;
    const std::size_t n = sorted.size();
    for (double q : {0.5, 0.25, 0.125, 0.0625}) {
        const std::size_t rank = static_cast<std::size_t>(
            std::ceil((1.0 - q / 2.0) * static_cast<double>(n)));
        const double m_cap = abs_sorted[std::min(rank, n) - 1];
        const auto above =
            abs_sorted.end() - std::upper_bound(abs_sorted.begin(), abs_sorted.end(), m_cap);
        if (static_cast<double>(above) > q / 2.0 * static_cast<double>(n)) continue;
        for (int k = 0; k <= 60; ++k) {
            const double gamma = std::ldexp(1.0, -k);
            if (static_cast<double>(worst_window(sorted, gamma)) <=
                (1.0 - q) * static_cast<double>(n)) {
                w.m = m_cap;
                w.gamma = gamma;
                w.q = q;
                w.found = true;
                return w;
            }
        }
    }
    return w;
}

}  // namespace

HypothesisReport check_hypotheses(const CoefficientDistribution& dist, std::size_t sample_size,
                                  const std::vector<double>& t_grid, std::uint64_t seed) {
    if (t_grid.empty()) throw std::invalid_argument("hypothesis audit: empty t-grid");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw std::invalid_argument("hypothesis audit: t-grid must be sorted");
    if (t_grid.front() < 0.0 || t_grid.back() > 1.0)
        throw std::invalid_argument("hypothesis audit: t-grid must lie in [0, 1]");
    if (sample_size < 16) throw std::invalid_argument("hypothesis audit: sample size too small");

    HypothesisReport rep;
    rep.mean = dist.mean();
    rep.variance = dist.variance();
    rep.fourth_moment = dist.fourth_moment();

    const std::vector<double> draws = sample(dist, sample_size, seed, 0);
    const std::vector<double> sym = symmetrize(dist, sample_size, seed, 1);

    std::vector<double> abs_draws(draws.size());
    std::transform(draws.begin(), draws.end(), abs_draws.begin(),
                   [](double x) { return std::abs(x); });
    std::sort(abs_draws.begin(), abs_draws.end());
    // The symmetrized variable carries an atom at 0 from coinciding draws;
    // its anti-concentration constant is defined on the nonzero part
    // (P(0 < |x| <= t)), which is what makes two-point laws admissible.
    std::vector<double> abs_sym;
    abs_sym.reserve(sym.size());
    for (double x : sym)
        if (x != 0.0) abs_sym.push_back(std::abs(x));
    std::sort(abs_sym.begin(), abs_sym.end());

    rep.c1_hat = anti_concentration_hat(abs_draws, t_grid, abs_draws.size());
    rep.c2_hat = anti_concentration_hat(abs_sym, t_grid, sym.size());

    std::vector<double> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    rep.h5_params = small_ball_witness(sorted, abs_draws);

    rep.h1 = dist.kind() != DistKind::SymmetricDiscrete || dist.values().size() >= 2;
    rep.h2 = std::abs(rep.mean) <= 1e-12 && std::abs(rep.variance - 1.0) <= 1e-12 &&
             std::isfinite(rep.fourth_moment);
    rep.h3 = std::isfinite(rep.c1_hat);
    rep.h4 = std::isfinite(rep.c2_hat);
    rep.h5 = rep.h5_params.found;
    return rep;
}

}  // namespace tcond

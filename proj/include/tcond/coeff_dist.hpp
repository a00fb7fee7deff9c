#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcond/rng.hpp"

namespace tcond {

enum class DistKind { Rademacher, StandardGaussian, SymmetricDiscrete };

// Coefficient law with mean 0 and variance 1.  Discrete laws are validated
// (or rescaled on request) at construction; violations raise
// std::invalid_argument.
class CoefficientDistribution {
  public:
    static CoefficientDistribution rademacher();
    static CoefficientDistribution gaussian();
    // Atoms with probabilities; requires >= 2 atoms, probs summing to 1,
    // mean 0 and variance 1 within 1e-12 unless rescale_to_unit_variance.
    static CoefficientDistribution discrete(std::vector<double> values,
                                            std::vector<double> probs,
                                            bool rescale_to_unit_variance = false);

    // Token grammar: "rademacher" | "gaussian" | "discrete:v1,p1;v2,p2;...".
    static CoefficientDistribution parse(const std::string& token);
    std::string token() const;

    DistKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }

    // Analytic moments.
    double mean() const;
    double variance() const;
    double fourth_moment() const;

    // One draw addressed by logical index; pure in (rng key, index).
    double draw(const CounterRng& rng, std::uint64_t index) const;

  private:
    CoefficientDistribution(DistKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    DistKind kind_;
    std::string name_;
    std::vector<double> values_;  // discrete only
    std::vector<double> probs_;
    std::vector<double> cum_;  // cumulative probs for inverse-CDF draws
};

struct SmallBallWitness {
    double m = 0.0;
    double gamma = 0.0;
    double q = 0.0;
    bool found = false;
};

struct HypothesisReport {
    double mean = 0.0;
    double variance = 0.0;
    double fourth_moment = 0.0;
    double c1_hat = 0.0;  // max over t-grid of P(|xi| <= t)/sqrt(t), 0/0 -> 0
    double c2_hat = 0.0;  // same on the nonzero part of symmetrized draws
    SmallBallWitness h5_params;
    bool h1 = false;  // non-degenerate
    bool h2 = false;  // mean 0, variance 1, finite fourth moment
    bool h3 = false;  // anti-concentration constant finite
    bool h4 = false;  // symmetrized anti-concentration constant finite
    bool h5 = false;  // (M, gamma, q) witness found
    bool all() const { return h1 && h2 && h3 && h4 && h5; }
};

// Deterministic iid draws; identical (dist, count, seed, stream) gives
// bitwise-identical output regardless of caller threading.
std::vector<double> sample(const CoefficientDistribution& dist, std::size_t count,
                           std::uint64_t seed, std::uint64_t stream);

// Realizations of (xi' - xi) * 1{xi' != xi} for independent draws xi, xi'.
std::vector<double> symmetrize(const CoefficientDistribution& dist, std::size_t count,
                               std::uint64_t seed, std::uint64_t stream);

// Empirical audit of the standing coefficient hypotheses on a t-grid in [0,1].
// Grid must be nonempty, sorted, within [0,1]; violations raise
// std::invalid_argument.  Everything else is reported, never thrown.
HypothesisReport check_hypotheses(const CoefficientDistribution& dist, std::size_t sample_size,
                                  const std::vector<double>& t_grid, std::uint64_t seed);

}  // namespace tcond

#pragma once

#include <vector>

#include "banditlab/function_class.hpp"
#include "banditlab/rational.hpp"

namespace banditlab {

// Solution of the maximin-volume linear program. All fields are exact, so the
// documented feasibility tolerances are met trivially.
struct GammaResult {
  Rational value;                       // min over functions of achieved mass
  std::vector<Rational> witness;        // distribution over actions, sums to 1
  std::vector<Rational> achieved_mass;  // per function: mass on its eps-optimal set
};

// Best probability, over a single query distribution p, of hitting an
// eps-optimal action of every class member:
//   max t  s.t.  sum_{a in S_f} p_a >= t for all f,  sum p = 1,  p >= 0,
// with S_f the eps-optimal set of f. Solved by exact rational simplex with
// Bland's rule (always feasible: uniform p achieves t = 1/|A| since every S_f
// is nonempty).
GammaResult gamma(const ExplicitClass& cls, const Rational& eps);

// KL divergence between N(mu1, sigma^2) and N(mu2, sigma^2):
// (mu1-mu2)^2 / (2 sigma^2). sigma <= 0 is a domain error.
double gaussian_kl(double mu1, double mu2, double sigma);

// Divergence decomposition: sum_i counts[i] * gaps[i]^2 / (2 sigma^2), the KL
// between two bandit interaction laws from expected pull counts and per-action
// mean gaps.
double divergence_budget(const std::vector<double>& counts,
                         const std::vector<double>& gaps, double sigma);

// Samples guaranteeing |empirical mean - mean| < accuracy with probability
// >= 1-delta for sigma-Gaussian noise: ceil(2 sigma^2 log(2/delta) /
// accuracy^2); 1 when sigma = 0.
long sample_size(double accuracy, double delta, double sigma);

// sqrt(kl/2): Pinsker upper bound on total variation.
double pinsker_bound(double kl);

// exp(-kl): Huber-Bretagnolle lower bound on P(E) + Q(not E).
double huber_bretagnolle_bound(double kl);

}  // namespace banditlab

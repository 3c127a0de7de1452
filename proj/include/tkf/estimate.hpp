#pragma once

#include <cstdint>
#include <vector>

#include "tkf/params.hpp"
#include "tkf/simulate.hpp"

namespace tkf {

// Only the composite θ = μt(1−λ/μ) is identifiable from lengths; recovering
// the time t alone needs externally known rates. Fed star-tree leaf pairs,
// theta_hat estimates the leaf-to-leaf separation θ = 2hμ(1−λ/μ), because
// the regression slope of n2 on n1 is e^{−2hμ(1−λ/μ)} (two independent
// branches of height h compose).
struct DistanceEstimate {
  double theta_hat = 0.0;      // −log(slope_hat)
  double slope_hat = 0.0;      // least-squares slope of n2 on n1
  double lambda_ratio_hat = 0.0;  // L̄/(1+L̄) with L̄ the pooled mean
  double theta_se = 0.0;
  double slope_se = 0.0;
  double lambda_ratio_se = 0.0;
  std::int64_t n_pairs = 0;
};

// Moment estimator from many pairs. Throws DegenerateError on < 2 pairs or
// zero variance of n1; InvalidSlope if the fitted slope is <= 0.
DistanceEstimate fit_many_samples(const std::vector<LengthPair>& pairs);

// Plug-in inversion of the conditional-mean line from one observation.
// Success iff the slope (n2−L̄)/(n1−L̄) is finite and > 0; theta_hat may be
// negative for a noisy pair (the slope exceeds 1 about half the time by the
// exchangeability of n1, n2). Failures are first-class counted results.
enum class SinglePairFailure { none, zero_denominator, nonpositive_slope };
struct SinglePairResult {
  bool ok = false;
  double theta_hat = 0.0;
  double slope_hat = 0.0;
  SinglePairFailure failure = SinglePairFailure::none;
};
SinglePairResult estimate_single_pair(const LengthPair& pair, double L_bar);

// Error probability of the optimal equal-prior test between star heights h1
// and h2 from one length pair: (1 − TV)/2, with the interval induced by the
// TV tail bounds. h1 == h2 gives exactly [~1/2 − tail, 1/2].
struct ErrorInterval {
  double lo = 0.0;
  double hi = 0.0;
};
ErrorInterval bayes_error(const ModelParams& p, double h1, double h2, double eps);

}  // namespace tkf

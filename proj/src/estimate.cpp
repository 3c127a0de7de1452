#include "tkf/estimate.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "tkf/analytics.hpp"
#include "tkf/errors.hpp"

namespace tkf {

DistanceEstimate fit_many_samples(const std::vector<LengthPair>& pairs) {
  std::int64_t n = static_cast<std::int64_t>(pairs.size());
  if (n < 2) throw DegenerateError{"need at least 2 pairs, got " + std::to_string(n)};
  double mx = 0.0, my = 0.0;
  for (const auto& pr : pairs) {
    mx += static_cast<double>(pr.n1);
    my += static_cast<double>(pr.n2);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& pr : pairs) {
    double dx = static_cast<double>(pr.n1) - mx;
    double dy = static_cast<double>(pr.n2) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw DegenerateError{"leaf-1 lengths are constant; slope is undefined"};
  double slope = sxy / sxx;
  if (!(slope > 0.0))
    throw InvalidSlopeError{"fitted slope " + std::to_string(slope) + " is not positive"};

  DistanceEstimate est;
  est.n_pairs = n;
  est.slope_hat = slope;
  est.theta_hat = -std::log(slope);
  double rss = 0.0;
  for (const auto& pr : pairs) {
    double dx = static_cast<double>(pr.n1) - mx;
    double dy = static_cast<double>(pr.n2) - my;
    double resid = dy - slope * dx;
    rss += resid * resid;
  }
  if (n > 2) {
    double s2 = rss / static_cast<double>(n - 2);
    est.slope_se = std::sqrt(s2 / sxx);
    est.theta_se = est.slope_se / slope;
  }
  double lbar = 0.5 * (mx + my);
  est.lambda_ratio_hat = lbar / (1.0 + lbar);
  double sm = 0.0;
  for (const auto& pr : pairs) {
    double m = 0.5 * (static_cast<double>(pr.n1) + static_cast<double>(pr.n2)) - lbar;
    sm += m * m;
  }
  if (n > 1) {
    double se_lbar = std::sqrt(sm / static_cast<double>(n - 1) / static_cast<double>(n));
    est.lambda_ratio_se = se_lbar / ((1.0 + lbar) * (1.0 + lbar));
  }
  return est;
}

SinglePairResult estimate_single_pair(const LengthPair& pair, double L_bar) {
  SinglePairResult res;
  double denom = static_cast<double>(pair.n1) - L_bar;
  if (denom == 0.0) {
    res.failure = SinglePairFailure::zero_denominator;
    return res;
  }
  double slope = (static_cast<double>(pair.n2) - L_bar) / denom;
  res.slope_hat = slope;
  if (!(slope > 0.0)) {
    res.failure = SinglePairFailure::nonpositive_slope;
    return res;
  }
  res.ok = true;
  res.theta_hat = -std::log(slope);
  return res;
}

ErrorInterval bayes_error(const ModelParams& p, double h1, double h2, double eps) {
  TvInterval tv = tv_between_pair_laws(p, h1, h2, eps);
  ErrorInterval out;
  out.lo = 0.5 * (1.0 - tv.hi);
  out.hi = 0.5 * (1.0 - tv.lo);
  return out;
}

}  // namespace tkf

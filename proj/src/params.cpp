#include "tkf/params.hpp"

#include <cmath>
#include <string>

#include "tkf/errors.hpp"

namespace tkf {

ModelParams validate(const ModelParams& p) {
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    throw ParamError{"lambda must be positive and finite"};
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw ParamError{"mu must be positive and finite"};
  if (!(p.lambda < p.mu)) throw ParamError{"lambda must be strictly less than mu"};
  if (!(p.nu >= 0.0) || !std::isfinite(p.nu)) throw ParamError{"nu must be >= 0 and finite"};
  if (!(p.pi0 >= 0.0) || !(p.pi1 >= 0.0)) throw ParamError{"pi0 and pi1 must be >= 0"};
  if (std::fabs(p.pi0 + p.pi1 - 1.0) > 1e-12) throw ParamError{"pi0 + pi1 must equal 1"};
  return p;
}

double stationary_length_pmf(const ModelParams& p, std::int64_t M) {
  if (M < 0) return 0.0;
  double r = p.ratio();
  return (1.0 - r) * std::pow(r, static_cast<double>(M));
}

double stationary_mean_length(const ModelParams& p) {
  double r = p.ratio();
  return r / (1.0 - r);
}

double stationary_sequence_logprob(const ModelParams& p, const Sequence& seq) {
  double r = p.ratio();
  double lp = std::log1p(-r) + static_cast<double>(seq.length()) * std::log(r);
  for (std::uint8_t d : seq.digits) {
    double pi = d == 0 ? p.pi0 : p.pi1;
    if (d > 1) throw ParamError{"digit values must be 0 or 1"};
    if (pi == 0.0) throw ProbError{"sequence contains a digit with zero frequency"};
    lp += std::log(pi);
  }
  return lp;
}

ModelParams time_rescale(const ModelParams& p) {
  ModelParams q = p;
  q.lambda = p.lambda / p.mu;
  q.mu = 1.0;
  q.nu = p.nu / p.mu;
  return q;
}

std::pair<ModelParams, StarTree2> time_rescale(const ModelParams& p, const StarTree2& star) {
  return {time_rescale(p), StarTree2{star.h * p.mu}};
}

std::pair<ModelParams, RootedTree> time_rescale(const ModelParams& p, const RootedTree& tree) {
  RootedTree t = tree;
  for (auto& n : t.nodes) n.branch *= p.mu;
  return {time_rescale(p), std::move(t)};
}

}  // namespace tkf

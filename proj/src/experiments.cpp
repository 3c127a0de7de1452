#include "tkf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "tkf/errors.hpp"
#include "tkf/format.hpp"
#include "tkf/law.hpp"

namespace tkf {

std::vector<TvCurveRow> tv_curve(const ModelParams& base, double h1, double h2,
                                 const std::vector<double>& lambdas, double eps, int threads) {
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw ParamError{"heights must be > 0"};
  if (lambdas.empty()) throw ParamError{"lambda grid must be non-empty"};
  for (double l : lambdas)
    if (!(l > 0.0 && l < base.mu)) throw ParamError{"grid lambda must lie in (0, mu)"};
  std::vector<TvCurveRow> rows(lambdas.size());
  detail::parallel_for_index(static_cast<std::int64_t>(lambdas.size()), threads,
                             [&](std::int64_t i) {
    ModelParams p = base;
    p.lambda = lambdas[static_cast<std::size_t>(i)];
    TvInterval tv = tv_between_pair_laws(p, h1, h2, eps);
    TvCurveRow& r = rows[static_cast<std::size_t>(i)];
    r.lambda = p.lambda;
    r.h1 = h1;
    r.h2 = h2;
    r.tv_lo = tv.lo;
    r.tv_hi = tv.hi;
    r.overlap = tv.overlap_lo;
    r.bayes_lo = 0.5 * (1.0 - tv.hi);
    r.bayes_hi = 0.5 * (1.0 - tv.lo);
  });
  return rows;
}

void write_csv(std::ostream& os, const std::vector<TvCurveRow>& rows) {
  os << "lambda,h1,h2,tv_lo,tv_hi,overlap,bayes_error\n";
  for (const auto& r : rows)
    os << fmt_g17(r.lambda) << ',' << fmt_g17(r.h1) << ',' << fmt_g17(r.h2) << ','
       << fmt_g17(r.tv_lo) << ',' << fmt_g17(r.tv_hi) << ',' << fmt_g17(r.overlap) << ','
       << fmt_g17(r.bayes_lo) << '\n';
}

std::vector<ScalingRow> scaling_check(const ModelParams& base, double h1, double h2,
                                      const std::vector<double>& lambdas) {
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw ParamError{"heights must be > 0"};
  std::vector<ScalingRow> rows;
  rows.reserve(lambdas.size());
  for (double l : lambdas) {
    if (!(l > 0.0 && l < base.mu)) throw ParamError{"grid lambda must lie in (0, mu)"};
    ModelParams p = base;
    p.lambda = l;
    double one_minus = 1.0 - p.ratio();
    auto M = static_cast<std::int64_t>(std::ceil(1.0 / one_minus));
    Moments m1 = progeny_moments(p, h1);
    Moments m2 = progeny_moments(p, h2);
    ScalingRow r;
    r.lambda = l;
    r.M = M;
    r.mean_diff_scaled = static_cast<double>(M) * (m1.beta - m2.beta);
    r.var_scaled_h1 = static_cast<double>(M) * m1.sigma2;
    r.var_scaled_h2 = static_cast<double>(M) * m2.sigma2;
    r.ratio = r.mean_diff_scaled * r.mean_diff_scaled / r.var_scaled_h1;
    rows.push_back(r);
  }
  return rows;
}

ProofWindowReport proof_window_report(const ModelParams& p, double h1, double h2, double c1,
                                      double c2, int K) {
  validate(p);
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw ParamError{"heights must be > 0"};
  if (!(c1 > 0.0 && c1 < 1.0 && c2 > 1.0)) throw ParamError{"window requires 0 < c1 < 1 < c2"};
  if (K < 1) throw ParamError{"K must be >= 1"};
  ProofWindowReport rep;
  rep.lambda = p.lambda;
  rep.h1 = h1;
  rep.h2 = h2;
  rep.c1 = c1;
  rep.c2 = c2;
  rep.K = K;
  double denom = 1.0 - p.ratio();
  // 5-point sample across the window; duplicates after rounding would
  // double-count gamma_M terms and invalidate the lower bound
  std::set<std::int64_t> seen;
  std::vector<std::int64_t> ms;
  for (int j = 0; j < 5; ++j) {
    double c = c1 + (c2 - c1) * static_cast<double>(j) / 4.0;
    auto M = std::max<std::int64_t>(2, std::llround(c / denom));
    if (seen.insert(M).second) ms.push_back(M);
  }
  double lb = 0.0;
  bool any_ok = false;
  for (std::int64_t M : ms) {
    ProofWindowReport::Entry e;
    e.M = M;
    e.gamma_M = stationary_length_pmf(p, M);
    e.be_bound = berry_esseen_bound(p, h1, M);
    try {
      OverlapCertificate cert = overlap_certificate(p, h1, h2, M, K);
      e.matched_sum = cert.matched_sum;
      e.overlap_constant = cert.overlap_constant;
      lb += e.gamma_M * e.overlap_constant;
      any_ok = true;
    } catch (const DegenerateError&) {
      e.degenerate = true;
    }
    rep.entries.push_back(e);
  }
  if (!any_ok)
    throw DegenerateError{"every sampled root length in the window is degenerate"};
  rep.assembled_lower_bound = lb;
  rep.positive = lb > 0.0;
  return rep;
}

DiscreteLaw stationary_leaf_mixture(const ModelParams& p, double t, double m_tail,
                                    double* neglected) {
  validate(p);
  if (!(m_tail > 0.0 && m_tail < 1.0)) throw ParamError{"m_tail must lie in (0, 1)"};
  double lam = p.ratio();
  // gamma weight beyond Mmax is lam^{Mmax+1}
  auto Mmax = static_cast<std::int64_t>(std::ceil(std::log(m_tail) / std::log(lam)));
  if (Mmax < 1) Mmax = 1;
  double leftover = std::pow(lam, static_cast<double>(Mmax + 1));
  if (neglected) *neglected = leftover;

  DiscreteLaw mortal = mortal_progeny_pmf(p, t, 1e-16);
  DiscreteLaw acc;  // M-fold mortal convolution, starts at the empty sum
  acc.support_offset = 0;
  acc.masses = {1.0};
  std::vector<double> mix{stationary_length_pmf(p, 0)};
  double mix_tail = 0.0;
  for (std::int64_t M = 1; M <= Mmax; ++M) {
    acc = convolve(acc, mortal, 1e-19);
    double g = stationary_length_pmf(p, M);
    std::size_t need = static_cast<std::size_t>(acc.support_offset) + acc.masses.size();
    if (mix.size() < need) mix.resize(need, 0.0);
    for (std::size_t i = 0; i < acc.masses.size(); ++i)
      mix[static_cast<std::size_t>(acc.support_offset) + i] += g * acc.masses[i];
    mix_tail += g * acc.tail_bound;
  }
  DiscreteLaw mixed;
  mixed.support_offset = 0;
  mixed.masses = std::move(mix);
  mixed.tail_bound = mix_tail + leftover;
  return convolve(mixed, immortal_progeny_pmf(p, t, 1e-16), 1e-19);
}

std::vector<StationarityRow> stationarity_report(const ModelParams& p,
                                                 const std::vector<double>& t_grid) {
  validate(p);
  double lam = p.ratio();
  std::vector<StationarityRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ParamError{"grid times must be > 0"};
    double neglected = 0.0;
    DiscreteLaw mixture = stationary_leaf_mixture(p, t, 1e-12, &neglected);
    DiscreteLaw gamma;
    gamma.support_offset = 0;
    auto N = static_cast<std::int64_t>(std::ceil(std::log(1e-15) / std::log(lam)));
    for (std::int64_t M = 0; M <= N; ++M)
      gamma.masses.push_back(stationary_length_pmf(p, M));
    gamma.tail_bound = std::pow(lam, static_cast<double>(N + 1));
    TvResult tv = tv_distance(gamma, mixture);
    StationarityRow r;
    r.lambda = p.lambda;
    r.t = t;
    r.tv_lo = tv.lo;
    r.tv_hi = tv.hi;
    r.truncation = mixture.tail_bound + gamma.tail_bound;
    r.pass = r.tv_lo <= 1e-6 + r.truncation;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tkf

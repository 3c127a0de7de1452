#include "tkf/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tkf/errors.hpp"

namespace tkf {

LinkCoeffs link_coeffs(const ModelParams& p, double t) {
  if (!(p.lambda > 0.0) || !(p.mu > 0.0)) throw ParamError{"rates must be positive"};
  if (!(t >= 0.0)) throw ParamError{"time must be >= 0"};
  LinkCoeffs c;
  c.lam = p.lambda / p.mu;
  c.s = p.mu * t;
  if (c.lam == 1.0) {
    // continuous limit: eta = s/(1+s), q = eta, beta = 1
    c.eta = c.s / (1.0 + c.s);
    c.q = c.eta;
    c.one_minus_eta = 1.0 / (1.0 + c.s);
    c.one_minus_q = c.one_minus_eta;
    c.beta = 1.0;
    return c;
  }
  double one_minus_lam = 1.0 - c.lam;
  double x = one_minus_lam * c.s;
  double em = -std::expm1(-x);  // 1 − e^{−x}, exact near x = 0
  double emx = std::exp(-x);
  double den = em + one_minus_lam * emx;  // 1 − λ e^{−x}, no cancellation
  c.eta = em / den;
  c.q = c.lam * c.eta;
  c.one_minus_eta = one_minus_lam * emx / den;  // exact complement of eta
  c.one_minus_q = one_minus_lam / den;          // exact complement of q = λη
  c.beta = emx;
  return c;
}

double eta(const ModelParams& p, double t) { return link_coeffs(p, t).eta; }

double progeny_rho_series(const ModelParams& p, double t) {
  LinkCoeffs c = link_coeffs(p, t);
  if (c.q == 0.0) return 0.0;  // t = 0: point mass at 1, beta = 1
  double beta = c.beta;
  double rho = c.eta * beta * beta * beta;
  double coef = c.one_minus_eta * c.one_minus_q;
  double qpow = 1.0;
  for (std::int64_t n = 1;; ++n) {
    double d = static_cast<double>(n) - beta;  // > 0 for n >= 1
    double term = coef * qpow * d * d * d;
    rho += term;
    qpow *= c.q;
    // terms eventually decay with ratio r = q((n+1−β)/(n−β))³ < 1
    double r = c.q * std::pow(1.0 + 1.0 / d, 3);
    if (n >= 8 && r < 1.0 && term * r / (1.0 - r) < 1e-15 * rho) break;
  }
  return rho;
}

double progeny_rho_closed(const ModelParams& p, double t) {
  LinkCoeffs c = link_coeffs(p, t);
  if (c.q == 0.0) return 0.0;
  double b = c.beta, q = c.q, u = c.one_minus_q;
  double t0 = 1.0 / u;
  double t1 = 1.0 / (u * u);
  double t2 = (1.0 + q) / (u * u * u);
  double t3 = (1.0 + 4.0 * q + q * q) / (u * u * u * u);
  double bracket = t3 - 3.0 * b * t2 + 3.0 * b * b * t1 - b * b * b * t0;
  return c.eta * b * b * b + c.one_minus_eta * u * bracket;
}

Moments progeny_moments(const ModelParams& p, double t) {
  LinkCoeffs c = link_coeffs(p, t);
  Moments m;
  m.beta = c.beta;
  if (c.lam == 1.0) {
    m.sigma2 = 2.0 * c.s;
  } else {
    double one_minus_lam = 1.0 - c.lam;
    double x = one_minus_lam * c.s;
    m.sigma2 = (1.0 + c.lam) / one_minus_lam * c.beta * (-std::expm1(-x));
  }
  m.rho = progeny_rho_series(p, t);
  return m;
}

DiscreteLaw mortal_progeny_pmf(const ModelParams& p, double t, double tail) {
  LinkCoeffs c = link_coeffs(p, t);
  DiscreteLaw law;
  law.support_offset = 0;
  if (c.q == 0.0) {
    law.masses = {c.eta, 1.0 - c.eta};
    return law;
  }
  // mass beyond n = N is (1−η) q^N
  double coef = c.one_minus_eta * c.one_minus_q;
  law.masses.push_back(c.eta);
  double qpow = 1.0;  // q^{n−1}
  for (std::int64_t n = 1;; ++n) {
    law.masses.push_back(coef * qpow);
    qpow *= c.q;
    if (c.one_minus_eta * qpow <= tail) {
      law.tail_bound = c.one_minus_eta * qpow;
      break;
    }
  }
  return law;
}

DiscreteLaw immortal_progeny_pmf(const ModelParams& p, double t, double tail) {
  LinkCoeffs c = link_coeffs(p, t);
  DiscreteLaw law;
  law.support_offset = 0;
  if (c.q == 0.0) {
    law.masses = {1.0};
    return law;
  }
  double qpow = 1.0;  // q^k
  for (std::int64_t k = 0;; ++k) {
    law.masses.push_back(c.one_minus_q * qpow);
    qpow *= c.q;
    if (qpow <= tail) {
      law.tail_bound = qpow;
      break;
    }
  }
  return law;
}

DiscreteLaw convolve(const DiscreteLaw& a, const DiscreteLaw& b, double trim,
                     std::size_t support_cap) {
  if (a.masses.empty() || b.masses.empty()) throw ProbError{"convolve requires nonempty laws"};
  std::size_t n = a.masses.size() + b.masses.size() - 1;
  if (n > support_cap)
    throw ResourceError{"convolution support " + std::to_string(n) + " exceeds cap " +
                        std::to_string(support_cap)};
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    double ai = a.masses[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.masses.size(); ++j) out[i + j] += ai * b.masses[j];
  }
  DiscreteLaw r;
  r.tail_bound = a.tail_bound + b.tail_bound;
  std::size_t lo = 0, hi = n;
  while (lo < hi && out[lo] < trim) r.tail_bound += out[lo++];
  while (hi > lo && out[hi - 1] < trim) r.tail_bound += out[--hi];
  r.support_offset = a.support_offset + b.support_offset + static_cast<std::int64_t>(lo);
  r.masses.assign(out.begin() + static_cast<std::ptrdiff_t>(lo),
                  out.begin() + static_cast<std::ptrdiff_t>(hi));
  if (r.masses.empty()) {
    r.support_offset = a.support_offset + b.support_offset;
    r.masses = {0.0};
  }
  return r;
}

namespace {

// Running log-factorial table grown on demand; long double accumulation keeps
// absolute error ~1e-15 even at n ~ 10^6, well inside the 1e-12 gate.
struct LogFactTable {
  std::vector<long double> lf{0.0L, 0.0L};  // lf[0] = lf[1] = 0
  long double acc = 0.0L;

  void ensure(std::size_t n) {
    while (lf.size() <= n) {
      acc += std::log(static_cast<long double>(lf.size()));
      lf.push_back(acc);
    }
  }
  long double operator()(std::int64_t n) const { return lf[static_cast<std::size_t>(n)]; }
};

DiscreteLaw leaf_pmf_convolution(const ModelParams& p, double t, std::int64_t M,
                                 std::size_t support_cap) {
  DiscreteLaw acc;
  acc.support_offset = 0;
  acc.masses = {1.0};
  DiscreteLaw mortal = mortal_progeny_pmf(p, t, 1e-18);
  for (std::int64_t m = 0; m < M; ++m) acc = convolve(acc, mortal, 1e-19, support_cap);
  return acc;
}

// P(S_M = n) = Σ_k C(M,k)(1−η)^k η^{M−k} C(n−1,k−1)(1−q)^k q^{n−k}, evaluated
// per n in log space (max-shifted); the summand is log-concave in k, so only
// a window of ~46 nats around the max contributes above 1e-20 relative.
DiscreteLaw leaf_pmf_closed(const ModelParams& p, double t, std::int64_t M,
                            std::size_t support_cap) {
  LinkCoeffs c = link_coeffs(p, t);
  DiscreteLaw law;
  law.support_offset = 0;
  double log_eta = std::log(c.eta);
  double log_one_minus_eta = std::log(c.one_minus_eta);
  double log_q = std::log(c.q);
  double log_one_minus_q = std::log(c.one_minus_q);
  LogFactTable lf;
  lf.ensure(static_cast<std::size_t>(M) + 1);

  law.masses.push_back(std::exp(static_cast<double>(M) * log_eta));

  auto log_term = [&](std::int64_t n, std::int64_t k) {
    long double lt = lf(M) - lf(k) - lf(M - k) + lf(n - 1) - lf(k - 1) - lf(n - k);
    lt += static_cast<long double>(k) * log_one_minus_eta +
          static_cast<long double>(M - k) * log_eta +
          static_cast<long double>(k) * log_one_minus_q +
          static_cast<long double>(n - k) * log_q;
    return static_cast<double>(lt);
  };

  // certified geometric regime: for n >= n0, p(n+1)/p(n) <= (1+q)/2 < 1
  double n0 = static_cast<double>(M - 1) * (1.0 + c.q) / (1.0 - c.q);
  double q_prime = 0.5 * (1.0 + c.q);
  std::int64_t anchor = 1;
  for (std::int64_t n = 1;; ++n) {
    if (static_cast<std::size_t>(n) > support_cap)
      throw ResourceError{"closed-form support exceeds cap " + std::to_string(support_cap)};
    lf.ensure(static_cast<std::size_t>(n) + 1);
    std::int64_t kmax = std::min(M, n);
    std::int64_t ks = std::min(anchor, kmax);
    while (ks < kmax && log_term(n, ks + 1) > log_term(n, ks)) ++ks;
    while (ks > 1 && log_term(n, ks - 1) > log_term(n, ks)) --ks;
    anchor = ks;
    double lmax = log_term(n, ks);
    double sum = 0.0;
    for (std::int64_t k = ks; k >= 1; --k) {
      double lt = log_term(n, k);
      if (lt < lmax - 46.0) break;
      sum += std::exp(lt - lmax);
    }
    for (std::int64_t k = ks + 1; k <= kmax; ++k) {
      double lt = log_term(n, k);
      if (lt < lmax - 46.0) break;
      sum += std::exp(lt - lmax);
    }
    double mass = std::exp(lmax) * sum;
    law.masses.push_back(mass);
    if (static_cast<double>(n) >= n0 && mass <= 1e-16) {
      law.tail_bound = std::max(mass, 1e-300) * q_prime / (1.0 - q_prime);
      break;
    }
  }
  return law;
}

}  // namespace

DiscreteLaw leaf_length_pmf_given_root(const ModelParams& p, double t, std::int64_t M,
                                       bool include_immortal, PmfAlgo algo,
                                       std::size_t support_cap) {
  if (M < 0) throw ParamError{"root length must be >= 0"};
  LinkCoeffs c = link_coeffs(p, t);
  DiscreteLaw mortal_part;
  if (M == 0 || c.q == 0.0 || c.eta == 0.0 || algo == PmfAlgo::convolution) {
    mortal_part = leaf_pmf_convolution(p, t, M, support_cap);
  } else {
    mortal_part = leaf_pmf_closed(p, t, M, support_cap);
  }
  if (!include_immortal) return mortal_part;
  return convolve(mortal_part, immortal_progeny_pmf(p, t), 1e-19, support_cap);
}

namespace {

// Row-by-row evaluation of the stationary two-leaf joint law from its
// rational generating function
//   G(z1,z2) = src(z1,z2) / (B − C(z1+z2) + D z1 z2),
// i.e. B·P(y1,y2) = C·P(y1−1,y2) + C·P(y1,y2−1) − D·P(y1−1,y2−1) + src(y1,y2).
// Cells computed below tau are zeroed and accounted: the computed field is the
// exact solution for perturbed sources, and a source perturbation δ moves the
// solution by at most δ/A in l1 (the Green's function is the law itself over
// A), so the total l1 error is bounded by dropped · B/A.
struct PairStream {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double src00 = 0.0, src01 = 0.0, src11 = 0.0;
  double tau = 1e-22;
  std::int64_t y1 = -1;
  std::int64_t off = 0;
  std::vector<double> row;
  std::vector<double> scratch;
  double emitted = 0.0;
  double dropped = 0.0;
  std::uint64_t cells = 0;
  bool exhausted = false;

  void init(const ModelParams& p, double h, bool immortal, double tau_in) {
    LinkCoeffs c = link_coeffs(p, h);
    if (!(c.lam < 1.0)) throw ParamError{"stationary joint laws require lambda < mu"};
    double one_minus_lam = 1.0 - c.lam;
    double b = c.one_minus_q - c.eta;  // (1−η)(1−q) − ηq, since η + b = 1 − q
    C = c.q + c.lam * c.eta * b;
    B = C + c.one_minus_q * c.one_minus_q;
    D = C - c.lam * c.one_minus_q * c.one_minus_q;
    A = one_minus_lam * c.one_minus_q * c.one_minus_q;
    if (immortal) {
      src00 = A;
    } else {
      src00 = one_minus_lam;
      src01 = -one_minus_lam * c.q;
      src11 = one_minus_lam * c.q * c.q;
    }
    tau = tau_in;
  }

  double amplification() const { return B / A; }
  double l1_error() const { return dropped * amplification(); }

  double source(std::int64_t r, std::int64_t c) const {
    if (r > 1 || c > 1) return 0.0;
    if (r == 0) return c == 0 ? src00 : src01;
    return c == 0 ? src01 : src11;
  }

  double prev_at(std::int64_t y2) const {
    std::int64_t i = y2 - off;
    if (i < 0 || i >= static_cast<std::int64_t>(row.size())) return 0.0;
    return row[static_cast<std::size_t>(i)];
  }

  void advance() {
    ++y1;
    if (exhausted) {
      row.clear();
      return;
    }
    std::int64_t prev_end = off + static_cast<std::int64_t>(row.size());
    std::int64_t cand_lo = y1 <= 1 ? 0 : off;
    scratch.clear();
    std::int64_t last_nz = -1;
    double west = 0.0;
    for (std::int64_t y2 = cand_lo;; ++y2) {
      double north = prev_at(y2);
      double northwest = prev_at(y2 - 1);
      double v = (C * (north + west) - D * northwest + source(y1, y2)) / B;
      if (v < 0.0) {
        dropped += -v;
        v = 0.0;
      } else if (v > 0.0 && v <= tau) {
        dropped += v;
        v = 0.0;
      }
      ++cells;
      scratch.push_back(v);
      if (v > 0.0) last_nz = static_cast<std::int64_t>(scratch.size()) - 1;
      west = v;
      bool north_done = y2 >= prev_end;
      bool src_done = y1 > 1 || y2 >= 1;
      if (west == 0.0 && north_done && src_done) break;
    }
    std::int64_t first_nz = -1;
    for (std::size_t i = 0; i < scratch.size(); ++i)
      if (scratch[i] > 0.0) {
        first_nz = static_cast<std::int64_t>(i);
        break;
      }
    if (last_nz < 0) {
      row.clear();
      off = 0;
      exhausted = true;
      return;
    }
    double row_sum = 0.0;
    for (std::int64_t i = first_nz; i <= last_nz; ++i)
      row_sum += scratch[static_cast<std::size_t>(i)];
    emitted += row_sum;
    off = cand_lo + first_nz;
    row.assign(scratch.begin() + first_nz, scratch.begin() + last_nz + 1);
  }
};

void check_pair_args(double h, double eps) {
  if (!(h > 0.0)) throw ParamError{"height must be > 0"};
  if (!(eps > 0.0 && eps < 0.1)) throw ParamError{"eps must lie in (0, 0.1)"};
}

}  // namespace

JointLaw joint_pair_law(const ModelParams& p, double h, bool include_immortal, double eps,
                        std::size_t cell_cap) {
  check_pair_args(h, eps);
  PairStream s;
  s.init(p, h, include_immortal, 1e-22);
  JointLaw law;
  law.y1_offset = 0;
  while (s.emitted < 1.0 - eps) {
    s.advance();
    if (s.exhausted) break;
    if (s.cells > cell_cap)
      throw ResourceError{"joint law exceeds cell cap " + std::to_string(cell_cap)};
    JointLaw::Row r;
    r.y2_offset = s.off;
    r.masses = s.row;
    law.rows.push_back(std::move(r));
  }
  law.tail_bound = std::max(0.0, 1.0 - s.emitted) + s.l1_error();
  return law;
}

TvInterval tv_between_pair_laws(const ModelParams& p, double h1, double h2, double eps,
                                bool include_immortal) {
  check_pair_args(h1, eps);
  check_pair_args(h2, eps);
  PairStream s1, s2;
  s1.init(p, h1, include_immortal, 1e-22);
  s2.init(p, h2, include_immortal, 1e-22);
  double l1 = 0.0, l1c = 0.0, mn = 0.0, mnc = 0.0;  // Kahan pairs
  auto add = [](double& s, double& comp, double x) {
    double y = x - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  };
  const std::uint64_t hard_cap = std::uint64_t{1} << 34;
  auto done = [&](const PairStream& s) { return s.exhausted || s.emitted >= 1.0 - eps; };
  while (!(done(s1) && done(s2))) {
    s1.advance();
    s2.advance();
    if (s1.cells + s2.cells > hard_cap)
      throw ResourceError{"tv stream exceeded the internal cell budget"};
    bool e1 = s1.row.empty(), e2 = s2.row.empty();
    if (e1 && e2) {
      if (s1.exhausted && s2.exhausted) break;
      continue;
    }
    std::int64_t lo = e1 ? s2.off : e2 ? s1.off : std::min(s1.off, s2.off);
    std::int64_t end1 = s1.off + static_cast<std::int64_t>(s1.row.size());
    std::int64_t end2 = s2.off + static_cast<std::int64_t>(s2.row.size());
    std::int64_t hi = e1 ? end2 : e2 ? end1 : std::max(end1, end2);
    for (std::int64_t y2 = lo; y2 < hi; ++y2) {
      double a = e1 ? 0.0 : s1.prev_at(y2);
      double b = e2 ? 0.0 : s2.prev_at(y2);
      add(l1, l1c, std::fabs(a - b));
      add(mn, mnc, std::min(a, b));
    }
  }
  double err = s1.l1_error() + s2.l1_error();
  double tail1 = std::max(0.0, 1.0 - s1.emitted) + s1.l1_error();
  double tail2 = std::max(0.0, 1.0 - s2.emitted) + s2.l1_error();
  // On the streamed region, |a−b|/2 + min(a,b) sums to (emitted1+emitted2)/2.
  if (std::fabs(0.5 * l1 + mn - 0.5 * (s1.emitted + s2.emitted)) > 1e-9)
    throw ProbError{"tv/overlap identity violated in the row stream"};
  TvInterval out;
  out.lo = std::max(0.0, 0.5 * l1 - 0.5 * err);
  out.hi = std::min(1.0, 0.5 * l1 + 0.5 * (tail1 + tail2) + 0.5 * err);
  out.overlap_lo = std::max(0.0, mn - err);
  out.overlap_hi = std::min(1.0, mn + std::min(tail1, tail2) + err);
  return out;
}

double berry_esseen_bound(const ModelParams& p, double t, std::int64_t M) {
  if (M < 2) throw ParamError{"berry_esseen_bound requires M >= 2"};
  Moments m = progeny_moments(p, t);
  double sigma = std::sqrt(m.sigma2);
  return 3.0 * m.rho / (sigma * sigma * sigma * std::sqrt(static_cast<double>(M - 1)));
}

OverlapCertificate overlap_certificate(const ModelParams& p, double h1, double h2,
                                       std::int64_t M, int K) {
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw ParamError{"heights must be > 0"};
  if (M < 2) throw ParamError{"overlap_certificate requires M >= 2"};
  if (K < 1) throw ParamError{"overlap_certificate requires K >= 1"};
  Moments m1 = progeny_moments(p, h1);
  double sigma1 = std::sqrt(m1.sigma2);
  double sqrt_m = std::sqrt(static_cast<double>(M - 1));
  std::int64_t R = static_cast<std::int64_t>(std::floor(sqrt_m / static_cast<double>(K)));
  if (R < 1)
    throw DegenerateError{"no window of width K*sigma fits inside one standard deviation"};

  OverlapCertificate cert;
  cert.M = M;
  cert.K = K;
  double center = m1.beta * static_cast<double>(M - 1);
  double w = static_cast<double>(K) * sigma1;
  for (std::int64_t r = -R; r < R; ++r) {
    OverlapCertificate::Window win;
    win.lo = center + static_cast<double>(r) * w;
    win.hi = win.lo + w;
    win.first = static_cast<std::int64_t>(std::ceil(win.lo));
    win.last = static_cast<std::int64_t>(std::ceil(win.hi)) - 1;
    if (win.last < win.first)
      throw DegenerateError{"certificate window [" + std::to_string(win.lo) + ", " +
                            std::to_string(win.hi) + ") contains no integer"};
    cert.windows.push_back(win);
  }

  DiscreteLaw pm1 = leaf_length_pmf_given_root(p, h1, M - 1, false);
  DiscreteLaw pm2 = leaf_length_pmf_given_root(p, h2, M - 1, false);
  for (auto& win : cert.windows) {
    win.argmax_h1 = win.argmax_h2 = win.first;
    for (std::int64_t n = std::max<std::int64_t>(win.first, 0); n <= win.last; ++n) {
      double a = pm1.at(n), b = pm2.at(n);
      win.mass_h1 += a;
      win.mass_h2 += b;
      if (a > pm1.at(win.argmax_h1)) win.argmax_h1 = n;
      if (b > pm2.at(win.argmax_h2)) win.argmax_h2 = n;
    }
  }

  // Lemma-4 style matching: one extra mortal link carries window r's argmax
  // mass into window r+1; min over heights of the single matched term is a
  // pointwise lower bound for both leaf laws (immortal link handled below).
  LinkCoeffs c1 = link_coeffs(p, h1);
  LinkCoeffs c2 = link_coeffs(p, h2);
  DiscreteLaw g1 = mortal_progeny_pmf(p, h1);
  DiscreteLaw g2 = mortal_progeny_pmf(p, h2);
  double matched = 0.0;
  double matched_min = 0.0;
  for (std::size_t i = 0; i + 1 < cert.windows.size(); ++i) {
    const auto& from = cert.windows[i];
    const auto& to = cert.windows[i + 1];
    double p1 = pm1.at(from.argmax_h1);
    double p2 = pm2.at(from.argmax_h2);
    for (std::int64_t y = std::max<std::int64_t>(to.first, 0); y <= to.last; ++y) {
      double t1 = p1 * g1.at(y - from.argmax_h1);
      double t2 = p2 * g2.at(y - from.argmax_h2);
      double contrib = std::min(t1, t2);
      matched += contrib;
      if (contrib > 0.0 && (matched_min == 0.0 || contrib < matched_min)) matched_min = contrib;
    }
  }
  cert.matched_sum = matched;
  cert.matched_min = matched_min;
  double imm = std::min(c1.one_minus_q, c2.one_minus_q);
  cert.immortal_factor = imm * imm;
  cert.overlap_constant = cert.immortal_factor * matched * matched;
  return cert;
}

}  // namespace tkf

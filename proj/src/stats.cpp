#include "tkf/stats.hpp"

#include <cmath>

#include "tkf/errors.hpp"

namespace tkf {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Lower regularized gamma P(a,x) by series; valid and fast for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 100000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a,x) by Lentz continued fraction; for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 100000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw ParamError{"gamma_q requires a > 0, x >= 0"};
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double x, double dof) {
  if (!(dof > 0.0)) throw ParamError{"chi2_sf requires dof > 0"};
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double chi2_two_sample_pvalue(const std::vector<std::int64_t>& counts1,
                              const std::vector<std::int64_t>& counts2) {
  if (counts1.size() != counts2.size())
    throw ParamError{"count vectors must be index-aligned with equal length"};
  double n1 = 0.0, n2 = 0.0;
  for (std::int64_t c : counts1) n1 += static_cast<double>(c);
  for (std::int64_t c : counts2) n2 += static_cast<double>(c);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw ParamError{"both samples must be non-empty"};
  double n = n1 + n2;

  // Pool adjacent cells until each pooled expectation is >= 5; a short
  // remainder merges into the previous pooled cell.
  std::vector<std::pair<double, double>> cells;  // (observed1, observed2)
  double o1 = 0.0, o2 = 0.0;
  for (std::size_t i = 0; i < counts1.size(); ++i) {
    o1 += static_cast<double>(counts1[i]);
    o2 += static_cast<double>(counts2[i]);
    double tot = o1 + o2;
    if (std::min(n1, n2) * tot / n >= 5.0) {
      cells.emplace_back(o1, o2);
      o1 = o2 = 0.0;
    }
  }
  if (o1 + o2 > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(o1, o2);
    } else {
      cells.back().first += o1;
      cells.back().second += o2;
    }
  }
  if (cells.size() < 2) return 1.0;

  double x2 = 0.0;
  for (auto [a, b] : cells) {
    double tot = a + b;
    double e1 = n1 * tot / n;
    double e2 = n2 * tot / n;
    x2 += (a - e1) * (a - e1) / e1 + (b - e2) * (b - e2) / e2;
  }
  return chi2_sf(x2, static_cast<double>(cells.size() - 1));
}

}  // namespace tkf

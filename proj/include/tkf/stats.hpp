#pragma once

#include <cstdint>
#include <vector>

namespace tkf {

// Φ(x), the standard normal CDF.
double normal_cdf(double x);

// Regularized upper incomplete gamma Q(a, x); the chi-square survival
// function is chi2_sf(x, dof) = Q(dof/2, x/2).
double gamma_q(double a, double x);
double chi2_sf(double x, double dof);

// Two-sample chi-square homogeneity test on count vectors over a shared
// support (index-aligned). Adjacent cells are pooled left to right until
// each pooled cell's expected counts reach 5 in both samples; a short
// remainder joins the last cell. Returns the p-value; dof = (#cells − 1).
double chi2_two_sample_pvalue(const std::vector<std::int64_t>& counts1,
                              const std::vector<std::int64_t>& counts2);

}  // namespace tkf

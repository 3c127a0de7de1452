#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tkf/analytics.hpp"
#include "tkf/params.hpp"

namespace tkf {

// One grid point of the impossibility curve: exact TV between the two-leaf
// joint laws at heights h1 and h2, with certified interval, plus the induced
// Bayes error bounds. bayes_lo = (1−tv_hi)/2 is the conservative endpoint.
struct TvCurveRow {
  double lambda = 0.0;
  double h1 = 0.0, h2 = 0.0;
  double tv_lo = 0.0, tv_hi = 0.0;
  double overlap = 0.0;
  double bayes_lo = 0.0, bayes_hi = 0.0;
};
std::vector<TvCurveRow> tv_curve(const ModelParams& base, double h1, double h2,
                                 const std::vector<double>& lambdas, double eps,
                                 int threads = 1);
void write_csv(std::ostream& os, const std::vector<TvCurveRow>& rows);

// Proof-sketch scalings at M = ⌈1/(1−λ/μ)⌉: the scaled mean difference
// M(β₁−β₂) (→ h2−h1 in μ=1 units) versus the scaled variances Mσ²(λ,hᵢ)
// (→ 2hᵢ/(1−λ/μ)); ratio = [M(β₁−β₂)]²/[Mσ²(λ,h1)] must decay along the grid.
struct ScalingRow {
  double lambda = 0.0;
  std::int64_t M = 0;
  double mean_diff_scaled = 0.0;
  double var_scaled_h1 = 0.0;
  double var_scaled_h2 = 0.0;
  double ratio = 0.0;
};
std::vector<ScalingRow> scaling_check(const ModelParams& base, double h1, double h2,
                                      const std::vector<double>& lambdas);

// Certificate assembly over the proof window M ∈ [c1/(1−λ/μ), c2/(1−λ/μ)]:
// per sampled M the Berry–Esséen bound and the overlap certificate; the
// assembled lower bound Σ_M γ_M · overlap_constant_M on the joint-law
// overlap. Degenerate M values (no window fits) are recorded and skipped;
// if every sampled M is degenerate the error propagates.
struct ProofWindowReport {
  double lambda = 0.0, h1 = 0.0, h2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  int K = 0;
  struct Entry {
    std::int64_t M = 0;
    double gamma_M = 0.0;
    double be_bound = 0.0;
    bool degenerate = false;
    double matched_sum = 0.0;
    double overlap_constant = 0.0;
  };
  std::vector<Entry> entries;
  double assembled_lower_bound = 0.0;
  bool positive = false;
};
ProofWindowReport proof_window_report(const ModelParams& p, double h1, double h2,
                                      double c1, double c2, int K);

// TV between γ and the one-step leaf marginal Σ_M γ_M·q_M(t) per t; the
// decisive check of the immortal-link progeny law. truncation is the
// certified neglected mass; pass iff tv_lo <= 1e-6 + truncation.
struct StationarityRow {
  double lambda = 0.0;
  double t = 0.0;
  double tv_lo = 0.0, tv_hi = 0.0;
  double truncation = 0.0;
  bool pass = false;
};
std::vector<StationarityRow> stationarity_report(const ModelParams& p,
                                                 const std::vector<double>& t_grid);

// Σ_M γ_M · (M-fold mortal convolution ⊛ immortal law), built by incremental
// convolution: the independent oracle behind the stationarity fixed point.
DiscreteLaw stationary_leaf_mixture(const ModelParams& p, double t, double m_tail,
                                    double* neglected = nullptr);

}  // namespace tkf

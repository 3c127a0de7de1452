#pragma once

#include <cstdint>
#include <vector>

#include "tkf/law.hpp"
#include "tkf/params.hpp"

namespace tkf {

// Per-(λ/μ, μt) bundle of the closed-form link quantities, evaluated so the
// complements stay exact as λ/μ ↗ 1 (never as 1 − something). λ/μ = 1 is
// admitted as the continuous limit even though model params require λ < μ.
struct LinkCoeffs {
  double lam;            // λ/μ
  double s;              // μ·t
  double eta;            // mass at 0 of one mortal site's progeny law
  double q;              // λη, the shared geometric ratio of both progeny tails
  double one_minus_eta;  // (1−λ/μ)e^{−x}/den, exact
  double one_minus_q;    // (1−λ/μ)/den, exact
  double beta;           // e^{−(1−λ/μ)μt}, mean progeny count of a mortal site
};
LinkCoeffs link_coeffs(const ModelParams& p, double t);

// η(λ,t) = (1−e^{−(1−λ)t})/(1−λe^{−(1−λ)t}) in μ=1 units; t/(1+t) at λ=μ.
double eta(const ModelParams& p, double t);

struct Moments {
  double beta;    // mean
  double sigma2;  // variance
  double rho;     // absolute third central moment; Lyapunov: rho >= sigma2^{3/2}
};
// rho is computed by the certified series (the reference); the closed form
// below must agree and is exposed for cross-checks.
Moments progeny_moments(const ModelParams& p, double t);
double progeny_rho_series(const ModelParams& p, double t);
double progeny_rho_closed(const ModelParams& p, double t);

// Law of one mortal site's surviving progeny (itself included): mass η at 0,
// (1−η)(1−q)q^{n−1} at n >= 1.
DiscreteLaw mortal_progeny_pmf(const ModelParams& p, double t, double tail = 1e-14);

// Mortal descendants of the immortal link: geometric, (1−q)q^k on {0,1,...}.
// Validated by the stationarity fixed point (the γ-mixture of leaf laws must
// reproduce γ) and by a Monte Carlo lineage-tag oracle.
DiscreteLaw immortal_progeny_pmf(const ModelParams& p, double t, double tail = 1e-14);

// Convolution with edge trimming; trimmed mass is added to the tail bound.
DiscreteLaw convolve(const DiscreteLaw& a, const DiscreteLaw& b,
                     double trim = 1e-18, std::size_t support_cap = std::size_t{1} << 22);

enum class PmfAlgo { convolution, closed_form };

// Law of a leaf length after time t given root length M: the M-fold
// convolution of mortal_progeny_pmf, plus the immortal term if requested.
// Algorithms: iterated convolution, or the closed-form mixture
//   P(S=0) = η^M,
//   P(S=n) = Σ_k C(M,k)(1−η)^k η^{M−k} · C(n−1,k−1)(1−q)^k q^{n−k},
// which are proven equal by the cross-algorithm acceptance gate.
DiscreteLaw leaf_length_pmf_given_root(const ModelParams& p, double t, std::int64_t M,
                                       bool include_immortal,
                                       PmfAlgo algo = PmfAlgo::closed_form,
                                       std::size_t support_cap = std::size_t{1} << 22);

// Joint law of the two leaf lengths of a star tree of height h, started from
// stationarity. Materializes the banded table from the lattice recurrence
// (see src/analytics.cpp); neglected mass is certified <= eps.
JointLaw joint_pair_law(const ModelParams& p, double h, bool include_immortal, double eps,
                        std::size_t cell_cap = std::size_t{1} << 26);

// TV between the joint pair laws at two heights, streamed row by row without
// materializing either law; usable up to λ/μ = 0.9999 and beyond.
struct TvInterval {
  double lo = 0.0, hi = 0.0;
  double overlap_lo = 0.0, overlap_hi = 0.0;
};
TvInterval tv_between_pair_laws(const ModelParams& p, double h1, double h2, double eps,
                                bool include_immortal = true);

// Uniform CDF-deviation bound 3ρ/(σ³√(M−1)) for the standardized M-fold law.
double berry_esseen_bound(const ModelParams& p, double t, std::int64_t M);

// Interval/matched-point overlap certificate for the laws p_{M−1,·} at two
// heights: disjoint half-open windows of width K·σ₁(λ,h1) covering
// β₁(M−1) ± σ₁√(M−1); exact window masses at both heights; matched
// single-point lower bounds through one extra mortal-link convolution; the
// per-coordinate matched sum S and the pair-law constant c·S².
struct OverlapCertificate {
  std::int64_t M = 0;
  int K = 0;
  struct Window {
    double lo = 0.0, hi = 0.0;       // real half-open endpoints [lo, hi)
    std::int64_t first = 0, last = -1;  // integers inside; empty if last < first
    double mass_h1 = 0.0, mass_h2 = 0.0;
    std::int64_t argmax_h1 = -1, argmax_h2 = -1;
  };
  std::vector<Window> windows;
  double matched_sum = 0.0;      // S: certified Σ_y min over matched terms
  double matched_min = 0.0;      // smallest positive matched term used
  double immortal_factor = 0.0;  // min over heights of (1−q)², both leaves
  double overlap_constant = 0.0; // immortal_factor · S²; <= pair-law overlap given M
};
OverlapCertificate overlap_certificate(const ModelParams& p, double h1, double h2,
                                       std::int64_t M, int K);

}  // namespace tkf

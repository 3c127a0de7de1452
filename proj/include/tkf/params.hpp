#pragma once

#include <cstdint>
#include <utility>

#include "tkf/sequence.hpp"

namespace tkf {

// Model rates and digit frequencies. Valid iff 0 < lambda < mu, nu >= 0,
// pi0, pi1 >= 0 and pi0 + pi1 = 1. The digit parameters (nu, pi0, pi1) only
// matter to the full-sequence simulator; every length law is free of them.
struct ModelParams {
  double lambda = 0.5;  // insertion rate per site, immortal link included
  double mu = 1.0;      // deletion rate per mortal site
  double nu = 0.0;      // substitution rate per mortal site
  double pi0 = 0.5;     // stationary frequency of digit 0
  double pi1 = 0.5;     // stationary frequency of digit 1

  double ratio() const { return lambda / mu; }  // λ/μ ∈ (0,1) for valid params
};

// Returns params unchanged; throws ParamError if any invariant fails.
ModelParams validate(const ModelParams& p);

// γ_M = (1−λ/μ)(λ/μ)^M, the stationary law of the length process.
double stationary_length_pmf(const ModelParams& p, std::int64_t M);

// L̄ = (λ/μ)/(1−λ/μ), the stationary mean length.
double stationary_mean_length(const ModelParams& p);

// log Π(x) = log(1−λ/μ) + M·log(λ/μ) + Σ_i log π_{x_i}.
// Throws ProbError if a digit with zero frequency is present.
double stationary_sequence_logprob(const ModelParams& p, const Sequence& seq);

// Rescales to deletion rate 1: (λ, μ, ν) → (λ/μ, 1, ν/μ), times ↦ μ·t.
// Every length law and estimator output is invariant under this map.
ModelParams time_rescale(const ModelParams& p);
std::pair<ModelParams, StarTree2> time_rescale(const ModelParams& p, const StarTree2& star);
std::pair<ModelParams, RootedTree> time_rescale(const ModelParams& p, const RootedTree& tree);

}  // namespace tkf

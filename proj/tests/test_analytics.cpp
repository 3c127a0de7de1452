#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "tkf/analytics.hpp"
#include "tkf/errors.hpp"
#include "tkf/params.hpp"

using namespace tkf;

namespace {

ModelParams params(double lambda, double mu = 1.0) {
  ModelParams p;
  p.lambda = lambda;
  p.mu = mu;
  return p;
}

}  // namespace

// Oracle: 80-digit decimal evaluation of (1−e^{−(1−λ)t})/(1−λe^{−(1−λ)t}).
TEST_CASE("link coefficients at lambda 0.5, t 1") {
  LinkCoeffs c = link_coeffs(params(0.5), 1.0);
  CHECK(c.eta == doctest::Approx(0.5647334016064161).epsilon(1e-15));
  CHECK(c.q == doctest::Approx(0.28236670080320806).epsilon(1e-15));
  CHECK(c.beta == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(c.eta + c.one_minus_eta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.q + c.one_minus_q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eta(params(0.5), 1.0) == c.eta);
}

TEST_CASE("link coefficients at the lambda = mu limit") {
  LinkCoeffs c = link_coeffs(params(1.0), 1.0);
  CHECK(c.eta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.q == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.one_minus_eta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.one_minus_q == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.beta == 1.0);
  CHECK(eta(params(1.0), 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("link coefficients at t = 0") {
  LinkCoeffs c = link_coeffs(params(0.7), 0.0);
  CHECK(c.eta == 0.0);
  CHECK(c.q == 0.0);
  CHECK(c.one_minus_eta == 1.0);
  CHECK(c.one_minus_q == 1.0);
  CHECK(c.beta == 1.0);
}

TEST_CASE("complements stay exact near the critical ratio") {
  for (double lam : {0.999, 0.9999, 0.999999}) {
    LinkCoeffs c = link_coeffs(params(lam), 2.0);
    CHECK(c.one_minus_q > 0.0);
    CHECK(c.one_minus_eta > 0.0);
    CHECK(c.eta + c.one_minus_eta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.q + c.one_minus_q == doctest::Approx(1.0).epsilon(1e-14));
  }
}

// Oracles: beta = e^{-0.1}; sigma2 and rho from an exact 200-digit direct
// summation of the progeny law, frozen here.
TEST_CASE("progeny moments at lambda 0.9, t 1") {
  Moments m = progeny_moments(params(0.9), 1.0);
  CHECK(m.beta == doctest::Approx(0.9048374180359596).epsilon(1e-15));
  CHECK(m.sigma2 == doctest::Approx(1.636026634201577).epsilon(1e-14));
  CHECK(m.rho == doctest::Approx(5.114602229277917).epsilon(1e-13));
}

TEST_CASE("progeny variance at the lambda = mu limit equals 2t") {
  Moments m = progeny_moments(params(1.0), 1.0);
  CHECK(m.beta == 1.0);
  CHECK(m.sigma2 == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("rho series and closed form agree") {
  for (double lam : {0.5, 0.9, 0.99}) {
    for (double t : {0.5, 1.0, 2.0}) {
      double a = progeny_rho_series(params(lam), t);
      double b = progeny_rho_closed(params(lam), t);
      CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
  }
}

TEST_CASE("rho dominates sigma cubed") {
  for (double lam : {0.5, 0.9, 0.999}) {
    Moments m = progeny_moments(params(lam), 1.0);
    CHECK(m.rho >= std::pow(m.sigma2, 1.5) * (1.0 - 1e-12));
  }
}

TEST_CASE("mortal progeny pmf matches the closed form") {
  ModelParams p = params(0.5);
  LinkCoeffs c = link_coeffs(p, 1.0);
  DiscreteLaw law = mortal_progeny_pmf(p, 1.0);
  CHECK(law.min_support() == 0);
  CHECK(law.at(0) == doctest::Approx(c.eta).epsilon(1e-15));
  CHECK(law.at(1) == doctest::Approx(c.one_minus_eta * c.one_minus_q).epsilon(1e-15));
  CHECK(law.at(2) == doctest::Approx(c.one_minus_eta * c.one_minus_q * c.q).epsilon(1e-15));
  CHECK(law.total() + law.tail_bound == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(law.tail_bound <= 1e-14);
}

TEST_CASE("mortal progeny pmf at t = 0 is a delta at 1") {
  DiscreteLaw law = mortal_progeny_pmf(params(0.5), 0.0);
  CHECK(law.at(0) == 0.0);
  CHECK(law.at(1) == 1.0);
  CHECK(law.tail_bound == 0.0);
}

TEST_CASE("immortal progeny pmf is geometric") {
  ModelParams p = params(0.9);
  LinkCoeffs c = link_coeffs(p, 1.0);
  DiscreteLaw law = immortal_progeny_pmf(p, 1.0);
  CHECK(law.at(0) == doctest::Approx(c.one_minus_q).epsilon(1e-15));
  CHECK(law.at(3) == doctest::Approx(c.one_minus_q * c.q * c.q * c.q).epsilon(1e-14));
  CHECK(law.total() + law.tail_bound == doctest::Approx(1.0).epsilon(1e-13));

  DiscreteLaw at0 = immortal_progeny_pmf(p, 0.0);
  CHECK(at0.at(0) == 1.0);
  CHECK(at0.masses.size() == 1);
}

TEST_CASE("convolution of deltas shifts the offset") {
  DiscreteLaw a, b;
  a.support_offset = 2;
  a.masses = {1.0};
  b.support_offset = 3;
  b.masses = {1.0};
  DiscreteLaw c = convolve(a, b);
  CHECK(c.support_offset == 5);
  REQUIRE(c.masses.size() == 1);
  CHECK(c.masses[0] == 1.0);
}

TEST_CASE("convolution preserves mass and accumulates tails") {
  DiscreteLaw a, b;
  a.masses = {0.5, 0.5};
  a.tail_bound = 1e-3;
  b.masses = {0.25, 0.75};
  b.tail_bound = 2e-3;
  DiscreteLaw c = convolve(a, b, 0.0);
  CHECK(c.total() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.at(0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(c.at(2) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(c.tail_bound >= 3e-3 - 1e-12);
}

TEST_CASE("convolution support cap throws before allocating") {
  DiscreteLaw a, b;
  a.masses.assign(3000, 1.0 / 3000);
  b.masses.assign(3000, 1.0 / 3000);
  CHECK_THROWS_AS(convolve(a, b, 1e-18, 4096), ResourceError);
}

TEST_CASE("leaf pmf at root length 0 and 1") {
  ModelParams p = params(0.9);
  DiscreteLaw zero = leaf_length_pmf_given_root(p, 1.0, 0, false);
  CHECK(zero.at(0) == 1.0);
  CHECK(zero.masses.size() == 1);

  DiscreteLaw one = leaf_length_pmf_given_root(p, 1.0, 1, false, PmfAlgo::convolution);
  DiscreteLaw site = mortal_progeny_pmf(p, 1.0, 1e-18);
  REQUIRE(one.masses.size() == site.masses.size());
  for (std::size_t i = 0; i < one.masses.size(); ++i) CHECK(one.masses[i] == site.masses[i]);
}

TEST_CASE("leaf pmf with immortal term at root length 0") {
  ModelParams p = params(0.9);
  DiscreteLaw law = leaf_length_pmf_given_root(p, 1.0, 0, true);
  DiscreteLaw imm = immortal_progeny_pmf(p, 1.0);
  CHECK(law.at(0) == doctest::Approx(imm.at(0)).epsilon(1e-14));
  CHECK(law.at(5) == doctest::Approx(imm.at(5)).epsilon(1e-13));
}

TEST_CASE("closed-form leaf pmf head values") {
  ModelParams p = params(0.5);
  LinkCoeffs c = link_coeffs(p, 1.0);
  DiscreteLaw law = leaf_length_pmf_given_root(p, 1.0, 2, false);
  CHECK(law.at(0) == doctest::Approx(c.eta * c.eta).epsilon(1e-14));
  // n=1: two ways to pick the surviving site, k=1 term only.
  double expect1 = 2.0 * c.one_minus_eta * c.eta * c.one_minus_q;
  CHECK(law.at(1) == doctest::Approx(expect1).epsilon(1e-14));
}

TEST_CASE("closed form and convolution agree to 1e-12") {
  ModelParams p = params(0.98);
  DiscreteLaw a = leaf_length_pmf_given_root(p, 1.0, 50, false, PmfAlgo::closed_form);
  DiscreteLaw b = leaf_length_pmf_given_root(p, 1.0, 50, false, PmfAlgo::convolution);
  std::int64_t lo = std::min(a.min_support(), b.min_support());
  std::int64_t hi = std::max(a.max_support(), b.max_support());
  double worst = 0.0;
  for (std::int64_t n = lo; n <= hi; ++n) worst = std::max(worst, std::fabs(a.at(n) - b.at(n)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("leaf pmf at t = 0 is a delta at the root length") {
  DiscreteLaw law = leaf_length_pmf_given_root(params(0.5), 0.0, 7, false);
  CHECK(law.at(7) == 1.0);
  CHECK(law.total() == 1.0);
}

TEST_CASE("leaf pmf moments match M beta and M sigma2") {
  ModelParams p = params(0.9);
  Moments m = progeny_moments(p, 1.0);
  std::int64_t M = 30;
  DiscreteLaw law = leaf_length_pmf_given_root(p, 1.0, M, false);
  CHECK(law.mean() == doctest::Approx(M * m.beta).epsilon(1e-9));
  CHECK(law.variance() == doctest::Approx(M * m.sigma2).epsilon(1e-9));
}

TEST_CASE("leaf pmf support cap throws") {
  CHECK_THROWS_AS(
      leaf_length_pmf_given_root(params(0.9), 1.0, 4000, false, PmfAlgo::closed_form, 64),
      ResourceError);
  CHECK_THROWS_AS(leaf_length_pmf_given_root(params(0.9), 1.0, -1, false), ParamError);
}

// Oracle: 3*rho/(sigma^3*sqrt(99)) with the frozen moment oracles above.
TEST_CASE("cdf deviation bound value and scaling") {
  ModelParams p = params(0.9);
  CHECK(berry_esseen_bound(p, 1.0, 100) ==
        doctest::Approx(0.7369363289373552).epsilon(1e-13));
  double r = berry_esseen_bound(p, 1.0, 101) / berry_esseen_bound(p, 1.0, 26);
  CHECK(r == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(berry_esseen_bound(p, 1.0, 1), ParamError);
}

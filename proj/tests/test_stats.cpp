#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "tkf/errors.hpp"
#include "tkf/stats.hpp"

using namespace tkf;

TEST_CASE("normal cdf values and symmetry") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
  for (double x : {0.3, 1.7, 4.2}) {
    CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(normal_cdf(40.0) == 1.0);
  CHECK(normal_cdf(-40.0) <= 1e-300);
}

TEST_CASE("gamma q edge cases") {
  CHECK(gamma_q(2.5, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_q(0.0, 1.0), ParamError);
  CHECK_THROWS_AS(gamma_q(-1.0, 1.0), ParamError);
  CHECK_THROWS_AS(gamma_q(1.0, -1.0), ParamError);
  CHECK(gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
}

// Frozen quantiles/values from a 50-digit reference implementation of
// Q(dof/2, x/2).
TEST_CASE("chi-square survival oracles") {
  CHECK(chi2_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(chi2_sf(1.0, 4.0) == doctest::Approx(0.9097959895689501).epsilon(1e-13));
  CHECK(chi2_sf(16.918977604620448, 9.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(chi2_sf(12.591587243743977, 6.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(chi2_sf(21.02606981748307, 12.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(chi2_sf(0.0, 3.0) == 1.0);
}

TEST_CASE("identical samples give p near one") {
  std::vector<std::int64_t> c = {40, 80, 120, 60, 30, 10};
  double p = chi2_two_sample_pvalue(c, c);
  CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clearly different samples give tiny p") {
  std::vector<std::int64_t> a = {500, 100, 50, 20};
  std::vector<std::int64_t> b = {100, 500, 50, 20};
  double p = chi2_two_sample_pvalue(a, b);
  CHECK(p < 1e-10);
}

TEST_CASE("two-sample test pools sparse cells") {
  // Tail cells hold a single count each; without pooling the statistic
  // would blow up on near-zero expectations.
  std::vector<std::int64_t> a = {100, 50, 1, 0, 1, 0, 0, 1};
  std::vector<std::int64_t> b = {95, 55, 0, 1, 0, 1, 1, 0};
  double p = chi2_two_sample_pvalue(a, b);
  CHECK(p > 0.05);
  CHECK(p <= 1.0);
}

TEST_CASE("two-sample test input validation") {
  std::vector<std::int64_t> a = {10, 20};
  std::vector<std::int64_t> b = {10, 20, 30};
  CHECK_THROWS_AS(chi2_two_sample_pvalue(a, b), ParamError);
  std::vector<std::int64_t> empty;
  CHECK_THROWS_AS(chi2_two_sample_pvalue(empty, empty), ParamError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "doctest.h"
#include "tkf/errors.hpp"
#include "tkf/params.hpp"
#include "tkf/sequence.hpp"

using namespace tkf;

TEST_CASE("defaults validate and round-trip") {
  ModelParams p;
  ModelParams q = validate(p);
  CHECK(q.lambda == p.lambda);
  CHECK(q.mu == p.mu);
  CHECK(p.ratio() == doctest::Approx(0.5));
}

TEST_CASE("validate rejects each broken invariant") {
  auto broken = [](auto&& fix) {
    ModelParams p;
    fix(p);
    CHECK_THROWS_AS(validate(p), ParamError);
  };
  broken([](ModelParams& p) { p.lambda = 0.0; });
  broken([](ModelParams& p) { p.lambda = -0.5; });
  broken([](ModelParams& p) { p.lambda = 1.0; p.mu = 1.0; });  // lambda < mu violated
  broken([](ModelParams& p) { p.lambda = 2.0; p.mu = 1.0; });
  broken([](ModelParams& p) { p.mu = 0.0; });
  broken([](ModelParams& p) { p.nu = -1e-9; });
  broken([](ModelParams& p) { p.pi0 = -0.1; p.pi1 = 1.1; });
  broken([](ModelParams& p) { p.pi0 = 0.6; p.pi1 = 0.6; });
  broken([](ModelParams& p) { p.lambda = std::numeric_limits<double>::quiet_NaN(); });
  broken([](ModelParams& p) { p.mu = std::numeric_limits<double>::infinity(); });
}

TEST_CASE("zero digit frequencies are allowed by validate") {
  ModelParams p;
  p.pi0 = 0.0;
  p.pi1 = 1.0;
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("stationary length law is geometric with ratio lambda/mu") {
  ModelParams p;  // ratio 1/2
  CHECK(stationary_length_pmf(p, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(stationary_length_pmf(p, 3) == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(stationary_length_pmf(p, -1) == 0.0);
  double sum = 0.0;
  for (int M = 0; M < 200; ++M) sum += stationary_length_pmf(p, M);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stationary_mean_length(p) == doctest::Approx(1.0).epsilon(1e-14));

  ModelParams q;
  q.lambda = 0.9;
  CHECK(stationary_mean_length(q) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("stationary sequence log-probability") {
  ModelParams p;
  Sequence s;
  s.digits = {0, 1};
  s.lineage = {1, 2};
  // (1-r) r^2 pi0 pi1 = 0.5 * 0.25 * 0.25
  CHECK(stationary_sequence_logprob(p, s) ==
        doctest::Approx(std::log(0.03125)).epsilon(1e-14));

  Sequence bad;
  bad.digits = {2};
  bad.lineage = {1};
  CHECK_THROWS_AS(stationary_sequence_logprob(p, bad), ParamError);

  ModelParams skewed;
  skewed.pi0 = 0.0;
  skewed.pi1 = 1.0;
  Sequence zero;
  zero.digits = {0};
  zero.lineage = {1};
  CHECK_THROWS_AS(stationary_sequence_logprob(skewed, zero), ProbError);
}

TEST_CASE("time rescale maps to unit deletion rate") {
  ModelParams p;
  p.lambda = 0.25;
  p.mu = 2.0;
  p.nu = 0.5;
  ModelParams r = time_rescale(p);
  CHECK(r.lambda == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(r.mu == 1.0);
  CHECK(r.nu == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r.pi0 == p.pi0);

  StarTree2 star;
  star.h = 3.0;
  auto [rp, rstar] = time_rescale(p, star);
  CHECK(rp.mu == 1.0);
  CHECK(rstar.h == doctest::Approx(6.0).epsilon(1e-15));

  RootedTree tree = parse_newick("(A:1.5,B:2);");
  auto [tp, rt] = time_rescale(p, tree);
  CHECK(tp.mu == 1.0);
  CHECK(rt.nodes[1].branch == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(rt.nodes[2].branch == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(rt.nodes[1].name == tree.nodes[1].name);
}

TEST_CASE("newick parser accepts nested trees and rejects malformed input") {
  RootedTree t = parse_newick("((A:0.1,B:0.2):0.3,C:0.4);");
  CHECK(t.nodes.size() == 5);
  CHECK(t.root() == 0);
  auto ls = t.leaves();
  REQUIRE(ls.size() == 3);
  CHECK(t.nodes[static_cast<std::size_t>(ls[0])].name == "A");
  CHECK(t.nodes[static_cast<std::size_t>(ls[1])].name == "B");
  CHECK(t.nodes[static_cast<std::size_t>(ls[2])].name == "C");
  CHECK(t.nodes[static_cast<std::size_t>(ls[0])].branch == doctest::Approx(0.1));
  // parent of A is the internal node, whose own branch is 0.3
  int a_parent = t.nodes[static_cast<std::size_t>(ls[0])].parent;
  CHECK(t.nodes[static_cast<std::size_t>(a_parent)].branch == doctest::Approx(0.3));

  CHECK_NOTHROW(parse_newick("(A:1,B:2):0.0;"));  // tolerated root branch
  CHECK_THROWS_AS(parse_newick("(A:1,B:2)"), ParamError);    // missing ';'
  CHECK_THROWS_AS(parse_newick("(A:1,A:2);"), ParamError);   // duplicate leaf
  CHECK_THROWS_AS(parse_newick("(A,B:1);"), ParamError);     // missing branch
  CHECK_THROWS_AS(parse_newick("(A:1,B:2);x"), ParamError);  // trailing junk
  CHECK_THROWS_AS(parse_newick("(A:-1,B:2);"), ParamError);  // negative branch
  CHECK_THROWS_AS(parse_newick("(:1,B:2);"), ParamError);    // unnamed leaf
  CHECK_THROWS_AS(parse_newick(""), ParamError);
}

#include "tkf/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "parallel.hpp"
#include "tkf/analytics.hpp"
#include "tkf/errors.hpp"
#include "tkf/estimate.hpp"
#include "tkf/experiments.hpp"
#include "tkf/params.hpp"
#include "tkf/simulate.hpp"
#include "tkf/stats.hpp"

namespace tkf {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double quantile_type7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

double max_abs_diff(const DiscreteLaw& a, const DiscreteLaw& b) {
  std::int64_t lo = std::min(a.min_support(), b.min_support());
  std::int64_t hi = std::max(a.max_support(), b.max_support());
  double d = 0.0;
  for (std::int64_t n = lo; n <= hi; ++n) d = std::max(d, std::fabs(a.at(n) - b.at(n)));
  return d;
}

// 1. DP convolution vs binomial-negative-binomial closed form, M <= 200.
void criterion_pmf_cross(CriterionResult& r, int threads) {
  const std::vector<double> lams{0.5, 0.9, 0.99, 0.999};
  const std::vector<double> ts{0.5, 1.0, 2.0};
  std::vector<double> worst(lams.size() * ts.size(), 0.0);
  detail::parallel_for_index(static_cast<std::int64_t>(worst.size()), threads,
                             [&](std::int64_t j) {
    ModelParams p;
    p.lambda = lams[static_cast<std::size_t>(j) / ts.size()];
    p.mu = 1.0;
    double t = ts[static_cast<std::size_t>(j) % ts.size()];
    double d = 0.0;
    for (std::int64_t M = 0; M <= 200; ++M) {
      DiscreteLaw a = leaf_length_pmf_given_root(p, t, M, true, PmfAlgo::closed_form);
      DiscreteLaw b = leaf_length_pmf_given_root(p, t, M, true, PmfAlgo::convolution);
      d = std::max(d, max_abs_diff(a, b));
    }
    worst[static_cast<std::size_t>(j)] = d;
  });
  double d = *std::max_element(worst.begin(), worst.end());
  r.pass = d <= 1e-12;
  r.detail = "max_abs_diff=" + num(d) + " tol=1e-12 over lambda{0.5,0.9,0.99,0.999} x "
             "t{0.5,1,2} x M 0..200";
}

// 2. Empirical progeny mean/variance vs beta, sigma^2 at (0.9, 1, 1).
void criterion_progeny_moments(CriterionResult& r, int threads) {
  ModelParams p;
  p.lambda = 0.9;
  p.mu = 1.0;
  const std::int64_t N = 1'000'000;
  SimConfig cfg;
  std::vector<double> x(static_cast<std::size_t>(N));
  detail::parallel_for_index(N, threads, [&](std::int64_t i) {
    Philox rng{424242, 2, static_cast<std::uint32_t>(i)};
    x[static_cast<std::size_t>(i)] =
        static_cast<double>(evolve_mortal_progeny(p, 1.0, cfg, rng));
  });
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(N);
  double s2 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - mean;
    s2 += d * d;
    m4 += d * d * d * d;
  }
  s2 /= static_cast<double>(N - 1);
  m4 /= static_cast<double>(N);
  Moments m = progeny_moments(p, 1.0);
  double se_mean = std::sqrt(m.sigma2 / static_cast<double>(N));
  double se_var = std::sqrt((m4 - s2 * s2) / static_cast<double>(N));
  double dm = std::fabs(mean - m.beta), dv = std::fabs(s2 - m.sigma2);
  r.pass = dm <= 3.0 * se_mean && dv <= 3.0 * se_var;
  r.detail = "mean_err=" + num(dm) + " (3se=" + num(3.0 * se_mean) + ") var_err=" + num(dv) +
             " (3se=" + num(3.0 * se_var) + ") N=1e6 seed=424242";
}

// 3. TV(gamma, sum_M gamma_M q_M) <= 1e-6 + certified truncation, 3x3 grid.
void criterion_stationarity(CriterionResult& r, int threads) {
  const std::vector<double> lams{0.5, 0.9, 0.99};
  std::vector<double> excess(lams.size(), 0.0);
  detail::parallel_for_index(static_cast<std::int64_t>(lams.size()), threads,
                             [&](std::int64_t i) {
    ModelParams p;
    p.lambda = lams[static_cast<std::size_t>(i)];
    p.mu = 1.0;
    double worst = -1.0;
    for (const auto& row : stationarity_report(p, {0.5, 1.0, 2.0}))
      worst = std::max(worst, row.tv_lo - (1e-6 + row.truncation));
    excess[static_cast<std::size_t>(i)] = worst;
  });
  double worst = *std::max_element(excess.begin(), excess.end());
  r.pass = worst <= 0.0;
  r.detail = "max(tv_lo - (1e-6+truncation))=" + num(worst) +
             " over lambda{0.5,0.9,0.99} x t{0.5,1,2}";
}

// 4. Exact CDF deviation of the M-fold mortal law <= 3rho/(sigma^3 sqrt(M-1)).
void criterion_berry_esseen(CriterionResult& r, int threads) {
  struct Job {
    std::int64_t M;
    double lambda, t;
  };
  std::vector<Job> jobs;
  for (std::int64_t M : {25, 100, 400})
    for (double l : {0.9, 0.99})
      for (double t : {1.0, 2.0}) jobs.push_back({M, l, t});
  std::vector<double> margins(jobs.size(), 0.0);
  detail::parallel_for_index(static_cast<std::int64_t>(jobs.size()), threads,
                             [&](std::int64_t j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    ModelParams p;
    p.lambda = job.lambda;
    p.mu = 1.0;
    DiscreteLaw law = leaf_length_pmf_given_root(p, job.t, job.M, false, PmfAlgo::closed_form);
    Moments m = progeny_moments(p, job.t);
    double mean = static_cast<double>(job.M) * m.beta;
    double sd = std::sqrt(m.sigma2 * static_cast<double>(job.M));
    double bound = berry_esseen_bound(p, job.t, job.M);
    double dev = 0.0, F = 0.0;
    for (std::int64_t n = law.min_support(); n <= law.max_support(); ++n) {
      double phi = normal_cdf((static_cast<double>(n) - mean) / sd);
      dev = std::max(dev, std::fabs(F - phi));  // left limit at n
      F += law.at(n);
      dev = std::max(dev, std::fabs(F - phi));
    }
    dev = std::max(dev, std::fabs(F - normal_cdf((static_cast<double>(law.max_support()) +
                                                  1.0 - mean) / sd)));
    margins[static_cast<std::size_t>(j)] = bound - dev;
  });
  double min_margin = *std::min_element(margins.begin(), margins.end());
  r.pass = min_margin >= 0.0;
  r.detail = "min(bound - deviation)=" + num(min_margin) +
             " over M{25,100,400} x lambda{0.9,0.99} x t{1,2}";
}

// 5. TV plateau between heights 2 and 1 as lambda -> mu.
void criterion_plateau(CriterionResult& r, int threads) {
  ModelParams base;
  base.mu = 1.0;
  auto rows = tv_curve(base, 2.0, 1.0, {0.9, 0.99, 0.999, 0.9999}, 1e-7, threads);
  double max_hi = 0.0, min_lo = 1.0, min_bayes = 1.0;
  for (const auto& row : rows) {
    max_hi = std::max(max_hi, row.tv_hi);
    min_lo = std::min(min_lo, row.tv_lo);
    min_bayes = std::min(min_bayes, row.bayes_lo);
  }
  double drift = max_hi - min_lo;
  r.pass = max_hi <= 0.95 && drift <= 0.15 && min_bayes >= 0.025;
  r.detail = "max_tv_hi=" + num(max_hi) + " (<=0.95) drift=" + num(drift) +
             " (<=0.15) min_bayes_lo=" + num(min_bayes) +
             " (>=0.025) lambda{0.9,0.99,0.999,0.9999} h1=2 h2=1 eps=1e-7";
}

// 6. Assembled overlap lower bound: positive and below the exact overlap.
void criterion_certificate(CriterionResult& r, int threads) {
  const std::vector<double> lams{0.99, 0.999};
  std::vector<std::string> notes(lams.size());
  std::vector<bool> ok(lams.size(), false);
  detail::parallel_for_index(static_cast<std::int64_t>(lams.size()), threads,
                             [&](std::int64_t i) {
    ModelParams p;
    p.lambda = lams[static_cast<std::size_t>(i)];
    p.mu = 1.0;
    ProofWindowReport rep = proof_window_report(p, 2.0, 1.0, 0.5, 2.0, 8);
    TvInterval tv = tv_between_pair_laws(p, 2.0, 1.0, 1e-7);
    bool good = rep.positive && rep.assembled_lower_bound > 0.0 &&
                rep.assembled_lower_bound <= tv.overlap_lo;
    ok[static_cast<std::size_t>(i)] = good;
    notes[static_cast<std::size_t>(i)] = "lambda=" + num(p.lambda) + " lb=" +
                                         num(rep.assembled_lower_bound) + " overlap_lo=" +
                                         num(tv.overlap_lo);
  });
  r.pass = std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
  r.detail = notes[0] + "; " + notes[1] + " (c1=0.5 c2=2 K=8 h1=2 h2=1)";
}

// 7. Many-sample consistency at theta=1 plus single-pair IQR non-shrinkage.
void criterion_estimator(CriterionResult& r, int threads) {
  ModelParams p;
  p.lambda = 0.5;
  p.mu = 1.0;
  SimConfig cfg;
  cfg.seed = 7001;
  cfg.stream_id = 3;
  cfg.threads = threads;
  StarTree2 star;
  star.h = 1.0;
  DistanceEstimate est = fit_many_samples(sample_leaf_pairs(p, star, 10'000, cfg));
  double theta_err = std::fabs(est.theta_hat - 1.0);
  bool pass_many = theta_err <= 0.05;

  auto iqr_at = [&](int k) {
    ModelParams q;
    q.lambda = 1.0 - std::ldexp(1.0, -k);
    q.mu = 1.0;
    StarTree2 s2;
    s2.h = 0.5 / (1.0 - q.lambda);  // constant normalized separation theta = 1
    SimConfig c2;
    c2.seed = 7002;
    c2.stream_id = 4;
    c2.threads = threads;
    double lbar = stationary_mean_length(q);
    std::vector<double> thetas;
    for (const auto& pr : sample_leaf_pairs_exact(q, s2, 100'000, c2)) {
      SinglePairResult sp = estimate_single_pair(pr, lbar);
      if (sp.ok) thetas.push_back(sp.theta_hat);
    }
    return quantile_type7(thetas, 0.75) - quantile_type7(thetas, 0.25);
  };
  double iqr_tight = iqr_at(10), iqr_loose = iqr_at(4);
  double ratio = iqr_tight / iqr_loose;
  bool pass_single = ratio >= 0.5;
  r.pass = pass_many && pass_single;
  r.detail = "theta_hat=" + num(est.theta_hat) + " (|err|=" + num(theta_err) +
             " <=0.05, 1e4 pairs, lambda=0.5 h=1) iqr_ratio=" + num(ratio) +
             " (>=0.5, 1e5 reps, lambda=1-2^-10 vs 1-2^-4 at theta=1)";
}

// 8. Length-only vs full-sequence length laws, plus CLI byte determinism.
void criterion_simulator(CriterionResult& r, int threads, const std::string& cli,
                         const std::string& work_dir) {
  ModelParams p;
  p.lambda = 0.9;
  p.mu = 1.0;
  p.nu = 0.1;
  const std::int64_t N = 100'000;
  SimConfig cfg;
  std::vector<std::int64_t> lens1(static_cast<std::size_t>(N)),
      lens2(static_cast<std::size_t>(N));
  detail::parallel_for_index(N, threads, [&](std::int64_t i) {
    Philox ra{9090, 1, static_cast<std::uint32_t>(i)};
    lens1[static_cast<std::size_t>(i)] = evolve_length(p, 10, 1.0, cfg, ra);
    Philox rb{9090, 2, static_cast<std::uint32_t>(i)};
    Sequence root;
    for (std::int64_t s = 1; s <= 10; ++s) {
      root.digits.push_back(rb.bernoulli(p.pi1) ? 1 : 0);
      root.lineage.push_back(s);
    }
    lens2[static_cast<std::size_t>(i)] =
        evolve_sequence(p, std::move(root), 1.0, cfg, rb).length();
  });
  std::int64_t top = 0;
  for (std::int64_t v : lens1) top = std::max(top, v);
  for (std::int64_t v : lens2) top = std::max(top, v);
  std::vector<std::int64_t> c1(static_cast<std::size_t>(top) + 1, 0), c2 = c1;
  for (std::int64_t v : lens1) ++c1[static_cast<std::size_t>(v)];
  for (std::int64_t v : lens2) ++c2[static_cast<std::size_t>(v)];
  double pval = chi2_two_sample_pvalue(c1, c2);
  bool pass_chi2 = pval > 0.001;

  bool pass_cli = false;
  std::string cli_note;
  if (cli.empty()) {
    cli_note = "cli path missing";
  } else {
    fs::path dir = work_dir.empty() ? fs::temp_directory_path() / "tkf91-accept"
                                    : fs::path(work_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto run_once = [&](const fs::path& out) {
      std::string cmd = "\"" + cli + "\" simulate --star-height 1 --lambda 0.9 --mu 1 "
                        "--nu 0.1 --replicates 200 --seed 777 --lengths-only --out \"" +
                        out.string() + "\"";
      return std::system(cmd.c_str());
    };
    fs::path fa = dir / "det_a.csv", fb = dir / "det_b.csv";
    int rc1 = run_once(fa), rc2 = run_once(fb);
    auto slurp = [](const fs::path& f) {
      std::ifstream in{f, std::ios::binary};
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    std::string sa = slurp(fa), sb = slurp(fb);
    pass_cli = rc1 == 0 && rc2 == 0 && !sa.empty() && sa == sb;
    cli_note = rc1 == 0 && rc2 == 0
                   ? (pass_cli ? "identical CSVs (" + std::to_string(sa.size()) + " bytes)"
                               : "CSV outputs differ")
                   : "cli exited nonzero";
  }
  r.pass = pass_chi2 && pass_cli;
  r.detail = "chi2_p=" + num(pval) + " (>0.001, 1e5 lengths, lambda=0.9 t=1 M=10) cli: " +
             cli_note;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  auto run = [&](int idx, const std::string& name, auto&& fn) {
    CriterionResult r;
    r.index = idx;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      fn(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string{"exception: "} + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  int T = opt.threads;
  run(1, "pmf-cross-algorithm", [&](CriterionResult& r) { criterion_pmf_cross(r, T); });
  run(2, "progeny-moments", [&](CriterionResult& r) { criterion_progeny_moments(r, T); });
  run(3, "stationarity-fixed-point", [&](CriterionResult& r) { criterion_stationarity(r, T); });
  run(4, "berry-esseen-domination", [&](CriterionResult& r) { criterion_berry_esseen(r, T); });
  run(5, "impossibility-plateau", [&](CriterionResult& r) { criterion_plateau(r, T); });
  run(6, "overlap-certificate", [&](CriterionResult& r) { criterion_certificate(r, T); });
  run(7, "estimator-split", [&](CriterionResult& r) { criterion_estimator(r, T); });
  run(8, "simulator-equivalence",
      [&](CriterionResult& r) { criterion_simulator(r, T, opt.cli_path, opt.work_dir); });
  return out;
}

}  // namespace tkf

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tkf/acceptance.hpp"
#include "tkf/analytics.hpp"
#include "tkf/errors.hpp"
#include "tkf/estimate.hpp"
#include "tkf/experiments.hpp"
#include "tkf/format.hpp"
#include "tkf/law.hpp"
#include "tkf/params.hpp"
#include "tkf/sequence.hpp"
#include "tkf/simulate.hpp"
#include "tkf/stats.hpp"

namespace {

using nlohmann::json;

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutStream(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw tkf::Error{"Io", "cannot open output file " + path};
    os = &file;
  }
  std::ostream& get() { return *os; }
};

double quantile_type7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (v[lo + 1] - v[lo]) * (h - static_cast<double>(lo));
}

std::string load_tree_text(const std::string& arg) {
  // path if a file of that name exists, literal Newick otherwise
  std::error_code ec;
  if (std::filesystem::exists(arg, ec)) {
    std::ifstream in{arg, std::ios::binary};
    if (!in) throw tkf::Error{"Io", "cannot read tree file " + arg};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

std::vector<tkf::LengthPair> read_pairs_csv(const std::string& path) {
  std::ifstream in{path};
  if (!in) throw tkf::Error{"Io", "cannot read pairs file " + path};
  std::string line;
  if (!std::getline(in, line)) throw tkf::Error{"Io", "pairs file is empty: " + path};
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };
  if (strip(line) != "n1,n2")
    throw tkf::Error{"Io", "pairs file must start with header 'n1,n2', got '" + line + "'"};
  std::vector<tkf::LengthPair> pairs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    std::istringstream row{line};
    tkf::LengthPair pr;
    char comma = 0;
    if (!(row >> pr.n1 >> comma >> pr.n2) || comma != ',')
      throw tkf::Error{"Io", "bad pair at line " + std::to_string(lineno) + ": '" + line + "'"};
    pairs.push_back(pr);
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  std::string self = argc > 0 ? argv[0] : "tkf91";
  CLI::App app{"TKF91 sequence-length process: simulation, exact laws, distance estimation"};
  app.require_subcommand(1);

  tkf::ModelParams params;
  std::string out_path, format = "csv", config_path;
  std::uint64_t seed = 12345;
  int threads = 0;
  auto* opt_lambda = app.add_option("--lambda", params.lambda, "insertion rate");
  auto* opt_mu = app.add_option("--mu", params.mu, "deletion rate");
  auto* opt_nu = app.add_option("--nu", params.nu, "substitution rate");
  auto* opt_pi0 = app.add_option("--pi0", params.pi0, "stationary frequency of digit 0");
  auto* opt_pi1 = app.add_option("--pi1", params.pi1, "stationary frequency of digit 1");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "rng seed");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")
      ->envname("TKF_THREADS");
  app.add_option("--config", config_path, "JSON file with model parameters");

  auto* sim = app.add_subcommand("simulate", "evolve sequences down a rooted tree");
  std::string tree_arg;
  double star_height = 0.0;
  std::int64_t replicates = 1;
  bool lengths_only = false;
  auto* opt_tree = sim->add_option("--tree", tree_arg, "Newick file or literal");
  auto* opt_star = sim->add_option("--star-height", star_height,
                                   "two-leaf star tree with this branch length");
  opt_tree->excludes(opt_star);
  sim->add_option("--replicates", replicates, "independent replicates")
      ->check(CLI::NonNegativeNumber);
  sim->add_flag("--lengths-only", lengths_only, "emit a length CSV instead of FASTA");

  auto* pmf = app.add_subcommand("pmf", "leaf length pmf conditional on root length");
  std::int64_t pmf_M = 1;
  double pmf_t = 1.0;
  bool with_immortal = false;
  std::string algo = "closed";
  pmf->add_option("--M", pmf_M, "root length")->required()->check(CLI::NonNegativeNumber);
  pmf->add_option("--t", pmf_t, "elapsed time")->required();
  pmf->add_flag("--with-immortal", with_immortal, "include the immortal-link offspring");
  pmf->add_option("--algo", algo, "evaluation algorithm")
      ->check(CLI::IsMember({"closed", "conv"}));

  auto* joint = app.add_subcommand("joint", "stationary two-leaf joint length law");
  double joint_h = 1.0, joint_eps = 1e-6;
  // The contract flag --h collides with the default -h/--help pair.
  joint->set_help_flag("--help", "print help and exit");
  joint->add_option("--h", joint_h, "leaf height")->required();
  joint->add_option("--eps", joint_eps, "mass truncation tolerance");

  auto* curve = app.add_subcommand("tv-curve", "TV between leaf-pair laws on a lambda grid");
  double c_h1 = 2.0, c_h2 = 1.0, c_eps = 1e-6;
  std::vector<double> c_lambdas;
  curve->add_option("--h1", c_h1, "first height")->required();
  curve->add_option("--h2", c_h2, "second height")->required();
  curve->add_option("--lambdas", c_lambdas, "comma-separated lambda grid")
      ->required()
      ->delimiter(',');
  curve->add_option("--eps", c_eps, "mass truncation tolerance");

  auto* est = app.add_subcommand("estimate", "distance estimation from leaf length pairs");
  std::string pairs_path;
  bool single = false;
  est->add_option("--pairs", pairs_path, "CSV with header n1,n2")->required();
  est->add_flag("--single", single, "per-pair plug-in estimates instead of regression");

  auto* cert = app.add_subcommand("certify", "overlap certificate over the proof window");
  double ct_h1 = 2.0, ct_h2 = 1.0, ct_c1 = 0.5, ct_c2 = 2.0;
  int ct_K = 8;
  cert->add_option("--h1", ct_h1, "first height");
  cert->add_option("--h2", ct_h2, "second height");
  cert->add_option("--c1", ct_c1, "window lower constant");
  cert->add_option("--c2", ct_c2, "window upper constant");
  cert->add_option("--K", ct_K, "window width in sigma units");

  auto* verify = app.add_subcommand("verify", "run the full acceptance suite");

  // Global options (--lambda, --seed, ...) may appear after the subcommand.
  for (CLI::App* s : app.get_subcommands(nullptr)) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in{config_path};
      if (!in) throw tkf::Error{"Io", "cannot read config file " + config_path};
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const json::exception& e) {
        throw tkf::Error{"Config", std::string{"config parse failed: "} + e.what()};
      }
      auto load = [&](const char* key, const CLI::Option* opt, double& dst) {
        if (cfg.contains(key) && opt->count() == 0) dst = cfg.at(key).get<double>();
      };
      load("lambda", opt_lambda, params.lambda);
      load("mu", opt_mu, params.mu);
      load("nu", opt_nu, params.nu);
      load("pi0", opt_pi0, params.pi0);
      load("pi1", opt_pi1, params.pi1);
    }
    tkf::validate(params);

    if (sim->parsed()) {
      if (opt_tree->count() == 0 && opt_star->count() == 0)
        throw CLI::RequiredError{"--tree or --star-height"};
      std::string newick;
      if (opt_star->count() > 0) {
        if (!(star_height > 0.0)) throw tkf::ParamError{"--star-height must be > 0"};
        newick = "(leaf1:" + tkf::fmt_g17(star_height) + ",leaf2:" +
                 tkf::fmt_g17(star_height) + ");";
      } else {
        newick = load_tree_text(tree_arg);
      }
      tkf::RootedTree tree = tkf::parse_newick(newick);
      tkf::SimConfig cfg;
      cfg.seed = seed;
      OutStream out{out_path};
      if (lengths_only) {
        std::vector<tkf::LengthRecord> rows;
        for (std::int64_t r = 0; r < replicates; ++r)
          for (auto& [leaf, s] : tkf::simulate_tree(params, tree, cfg,
                                                    static_cast<std::uint32_t>(r)))
            rows.push_back({r, leaf, s.length()});
        tkf::write_lengths_csv(out.get(), rows);
      } else {
        for (std::int64_t r = 0; r < replicates; ++r)
          for (auto& [leaf, s] : tkf::simulate_tree(params, tree, cfg,
                                                    static_cast<std::uint32_t>(r)))
            tkf::write_fasta(out.get(), "rep" + std::to_string(r) + "/" + leaf, s);
      }
    } else if (pmf->parsed()) {
      tkf::DiscreteLaw law = tkf::leaf_length_pmf_given_root(
          params, pmf_t, pmf_M, with_immortal,
          algo == "closed" ? tkf::PmfAlgo::closed_form : tkf::PmfAlgo::convolution);
      OutStream out{out_path};
      if (format == "csv")
        tkf::write_csv(out.get(), law);
      else
        tkf::write_json(out.get(), law);
    } else if (joint->parsed()) {
      tkf::JointLaw law = tkf::joint_pair_law(params, joint_h, true, joint_eps);
      OutStream out{out_path};
      if (format == "csv")
        tkf::write_csv(out.get(), law);
      else
        tkf::write_json(out.get(), law);
    } else if (curve->parsed()) {
      auto rows = tkf::tv_curve(params, c_h1, c_h2, c_lambdas, c_eps, threads);
      OutStream out{out_path};
      if (format == "csv") {
        tkf::write_csv(out.get(), rows);
      } else {
        json arr = json::array();
        for (const auto& r : rows)
          arr.push_back({{"lambda", r.lambda},
                         {"h1", r.h1},
                         {"h2", r.h2},
                         {"tv_lo", r.tv_lo},
                         {"tv_hi", r.tv_hi},
                         {"overlap", r.overlap},
                         {"bayes_lo", r.bayes_lo},
                         {"bayes_hi", r.bayes_hi}});
        out.get() << arr.dump(2) << '\n';
      }
    } else if (est->parsed()) {
      std::vector<tkf::LengthPair> pairs = read_pairs_csv(pairs_path);
      json res;
      if (single) {
        double lbar = 0.0;
        for (const auto& pr : pairs)
          lbar += static_cast<double>(pr.n1) + static_cast<double>(pr.n2);
        if (pairs.empty()) throw tkf::DegenerateError{"no pairs in input"};
        lbar /= 2.0 * static_cast<double>(pairs.size());
        std::vector<double> thetas;
        std::int64_t n_zero = 0, n_nonpos = 0;
        for (const auto& pr : pairs) {
          tkf::SinglePairResult sp = tkf::estimate_single_pair(pr, lbar);
          if (sp.ok)
            thetas.push_back(sp.theta_hat);
          else if (sp.failure == tkf::SinglePairFailure::zero_denominator)
            ++n_zero;
          else
            ++n_nonpos;
        }
        if (thetas.empty()) throw tkf::DegenerateError{"no valid single-pair estimates"};
        res = {{"mode", "single"},
               {"n_pairs", pairs.size()},
               {"n_ok", thetas.size()},
               {"n_zero_denominator", n_zero},
               {"n_nonpositive_slope", n_nonpos},
               {"l_bar", lbar},
               {"theta_median", quantile_type7(thetas, 0.5)},
               {"theta_iqr", quantile_type7(thetas, 0.75) - quantile_type7(thetas, 0.25)}};
      } else {
        tkf::DistanceEstimate e = tkf::fit_many_samples(pairs);
        res = {{"mode", "many"},
               {"n_pairs", e.n_pairs},
               {"theta_hat", e.theta_hat},
               {"slope_hat", e.slope_hat},
               {"lambda_ratio_hat", e.lambda_ratio_hat},
               {"theta_se", e.theta_se},
               {"slope_se", e.slope_se},
               {"lambda_ratio_se", e.lambda_ratio_se}};
      }
      OutStream out{out_path};
      out.get() << res.dump(2) << '\n';
    } else if (cert->parsed()) {
      tkf::ProofWindowReport rep =
          tkf::proof_window_report(params, ct_h1, ct_h2, ct_c1, ct_c2, ct_K);
      OutStream out{out_path};
      if (format == "csv") {
        out.get() << "lambda,h1,h2,c1,c2,K,M,gamma_M,be_bound,degenerate,matched_sum,"
                     "overlap_constant,assembled_lower_bound\n";
        for (const auto& e : rep.entries)
          out.get() << tkf::fmt_g17(rep.lambda) << ',' << tkf::fmt_g17(rep.h1) << ','
                    << tkf::fmt_g17(rep.h2) << ',' << tkf::fmt_g17(rep.c1) << ','
                    << tkf::fmt_g17(rep.c2) << ',' << rep.K << ',' << e.M << ','
                    << tkf::fmt_g17(e.gamma_M) << ',' << tkf::fmt_g17(e.be_bound) << ','
                    << (e.degenerate ? 1 : 0) << ',' << tkf::fmt_g17(e.matched_sum) << ','
                    << tkf::fmt_g17(e.overlap_constant) << ','
                    << tkf::fmt_g17(rep.assembled_lower_bound) << '\n';
      } else {
        json entries = json::array();
        for (const auto& e : rep.entries)
          entries.push_back({{"M", e.M},
                             {"gamma_M", e.gamma_M},
                             {"be_bound", e.be_bound},
                             {"degenerate", e.degenerate},
                             {"matched_sum", e.matched_sum},
                             {"overlap_constant", e.overlap_constant}});
        json rj = {{"lambda", rep.lambda},        {"h1", rep.h1},
                   {"h2", rep.h2},                {"c1", rep.c1},
                   {"c2", rep.c2},                {"K", rep.K},
                   {"entries", entries},          {"assembled_lower_bound",
                                                   rep.assembled_lower_bound},
                   {"positive", rep.positive}};
        out.get() << rj.dump(2) << '\n';
      }
    } else if (verify->parsed()) {
      tkf::AcceptanceOptions opt;
      opt.threads = threads;
      opt.cli_path = self;
      auto results = tkf::run_acceptance(opt);
      OutStream out{out_path};
      bool all = true;
      for (const auto& r : results) {
        all = all && r.pass;
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
        out.get() << (r.pass ? "[PASS] " : "[FAIL] ") << r.index << ' ' << r.name << " ("
                  << secs << "s): " << r.detail << '\n';
      }
      return all ? 0 : 1;
    }
  } catch (const tkf::Error& e) {
    json err = {{"error", e.kind()}, {"what", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const CLI::RequiredError&) {
    std::cerr << "usage error: simulate requires --tree or --star-height\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", "Internal"}, {"what", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}

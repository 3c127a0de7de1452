#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tkf/analytics.hpp"
#include "tkf/params.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "tkf91-cli-test";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& out = {}, const fs::path& err = {}) {
  std::string cmd = std::string{"\""} + TKF91_BIN + "\" " + args;
  if (!out.empty()) cmd += " > \"" + out.string() + "\"";
  if (!err.empty()) cmd += " 2> \"" + err.string() + "\"";
  int st = std::system(cmd.c_str());
  REQUIRE(st != -1);
  return WEXITSTATUS(st);
}

std::string read_file(const fs::path& p) {
  std::ifstream in{p};
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out{p};
  out << text;
}

// First data row of a law CSV must be "0,<mass at 0>".
double mass_at_zero(const std::string& csv) {
  REQUIRE(csv.rfind("value,mass\n0,", 0) == 0);
  std::size_t start = csv.find('\n') + 3;
  return std::strtod(csv.c_str() + start, nullptr);
}

tkf::ModelParams params(double lambda) {
  tkf::ModelParams p;
  p.lambda = lambda;
  return p;
}

}  // namespace

TEST_CASE("pmf emits the mortal-only law by default") {
  fs::path out = work_dir() / "pmf_default.csv";
  REQUIRE(run_cli("pmf --M 1 --t 1 --lambda 0.5 --out \"" + out.string() + "\"") == 0);
  double got = mass_at_zero(read_file(out));
  CHECK(std::fabs(got - 0.5647334016064161) <= 1e-12);

  fs::path out2 = work_dir() / "pmf_immortal.csv";
  REQUIRE(run_cli("pmf --M 1 --t 1 --lambda 0.5 --with-immortal --out \"" + out2.string() +
                  "\"") == 0);
  double with_imm = mass_at_zero(read_file(out2));
  tkf::LinkCoeffs c = tkf::link_coeffs(params(0.5), 1.0);
  CHECK(std::fabs(with_imm - c.eta * c.one_minus_q) <= 1e-12);
}

TEST_CASE("pmf json output carries the law fields") {
  fs::path out = work_dir() / "pmf.json";
  REQUIRE(run_cli("pmf --M 2 --t 0.5 --lambda 0.9 --format json --out \"" + out.string() +
                  "\"") == 0);
  json j = json::parse(read_file(out));
  CHECK(j.at("support_offset").get<std::int64_t>() == 0);
  CHECK(j.at("tail_bound").get<double>() >= 0.0);
  double eta = tkf::eta(params(0.9), 0.5);
  CHECK(j.at("masses")[0].get<double>() == doctest::Approx(eta * eta).epsilon(1e-13));
}

TEST_CASE("pmf algorithms agree through the cli") {
  fs::path a = work_dir() / "pmf_closed.csv";
  fs::path b = work_dir() / "pmf_conv.csv";
  REQUIRE(run_cli("pmf --M 20 --t 1 --lambda 0.9 --algo closed --out \"" + a.string() + "\"") ==
          0);
  REQUIRE(run_cli("pmf --M 20 --t 1 --lambda 0.9 --algo conv --out \"" + b.string() + "\"") == 0);
  std::istringstream sa{read_file(a)}, sb{read_file(b)};
  std::string la, lb;
  std::getline(sa, la);
  std::getline(sb, lb);
  REQUIRE(la == lb);
  while (std::getline(sa, la) && std::getline(sb, lb)) {
    auto comma_a = la.find(','), comma_b = lb.find(',');
    REQUIRE(la.substr(0, comma_a) == lb.substr(0, comma_b));
    double va = std::strtod(la.c_str() + comma_a + 1, nullptr);
    double vb = std::strtod(lb.c_str() + comma_b + 1, nullptr);
    CHECK(std::fabs(va - vb) <= 1e-12);
  }
}

TEST_CASE("tv-curve at equal heights reports zero tv_lo") {
  fs::path out = work_dir() / "curve_eq.csv";
  REQUIRE(run_cli("tv-curve --h1 2 --h2 2 --lambdas 0.5,0.8 --eps 1e-6 --out \"" +
                  out.string() + "\"") == 0);
  std::istringstream ss{read_file(out)};
  std::string line;
  std::getline(ss, line);
  CHECK(line == "lambda,h1,h2,tv_lo,tv_hi,overlap,bayes_error");
  int rows = 0;
  while (std::getline(ss, line)) {
    ++rows;
    // Fourth field is tv_lo.
    std::size_t pos = 0;
    for (int f = 0; f < 3; ++f) pos = line.find(',', pos) + 1;
    CHECK(line.compare(pos, 2, "0,") == 0);
  }
  CHECK(rows == 2);
}

TEST_CASE("tv-curve json and thread-count invariance") {
  fs::path a = work_dir() / "curve_a.json";
  fs::path b = work_dir() / "curve_b.json";
  std::string args = "tv-curve --h1 2 --h2 1 --lambdas 0.5,0.8 --eps 1e-6 --format json";
  REQUIRE(run_cli(args + " --threads 1 --out \"" + a.string() + "\"") == 0);
  std::string cmd = "TKF_THREADS=3 \"" + std::string{TKF91_BIN} + "\" " + args + " --out \"" +
                    b.string() + "\"";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(read_file(a) == read_file(b));
  json arr = json::parse(read_file(a));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  for (auto& row : arr) {
    double lo = row.at("tv_lo").get<double>(), hi = row.at("tv_hi").get<double>();
    CHECK(lo <= hi);
    CHECK(row.at("bayes_lo").get<double>() == doctest::Approx((1.0 - hi) / 2.0).epsilon(1e-13));
  }
}

TEST_CASE("estimate regression mode on an exact line") {
  fs::path pairs = work_dir() / "pairs_line.csv";
  write_file(pairs, "n1,n2\n0,2\n4,4\n8,6\n");
  fs::path out = work_dir() / "est_many.json";
  REQUIRE(run_cli("estimate --pairs \"" + pairs.string() + "\" --out \"" + out.string() +
                  "\"") == 0);
  json j = json::parse(read_file(out));
  CHECK(j.at("mode") == "many");
  CHECK(j.at("n_pairs").get<std::int64_t>() == 3);
  CHECK(j.at("slope_hat").get<double>() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(j.at("theta_hat").get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("estimate single mode counts the outcome classes") {
  fs::path pairs = work_dir() / "pairs_single.csv";
  write_file(pairs, "n1,n2\n0,2\n10,8\n5,7\n3,5\n");
  fs::path out = work_dir() / "est_single.json";
  REQUIRE(run_cli("estimate --single --pairs \"" + pairs.string() + "\" --out \"" +
                  out.string() + "\"") == 0);
  json j = json::parse(read_file(out));
  CHECK(j.at("mode") == "single");
  CHECK(j.at("n_pairs").get<std::int64_t>() == 4);
  CHECK(j.at("n_ok").get<std::int64_t>() == 2);
  CHECK(j.at("n_zero_denominator").get<std::int64_t>() == 1);
  CHECK(j.at("n_nonpositive_slope").get<std::int64_t>() == 1);
  CHECK(j.at("l_bar").get<double>() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(j.at("theta_median").get<double>() ==
        doctest::Approx(-std::log(0.6)).epsilon(1e-13));
  CHECK(j.at("theta_iqr").get<double>() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("certify emits one csv row per window point") {
  fs::path out = work_dir() / "cert.csv";
  REQUIRE(run_cli("certify --lambda 0.9 --h1 2 --h2 1 --c1 0.5 --c2 2 --K 1 --out \"" +
                  out.string() + "\"") == 0);
  std::istringstream ss{read_file(out)};
  std::string line;
  std::getline(ss, line);
  CHECK(line ==
        "lambda,h1,h2,c1,c2,K,M,gamma_M,be_bound,degenerate,matched_sum,"
        "overlap_constant,assembled_lower_bound");
  int rows = 0;
  std::string last_field;
  while (std::getline(ss, line)) {
    ++rows;
    std::size_t pos = line.rfind(',');
    std::string assembled = line.substr(pos + 1);
    if (rows == 1) last_field = assembled;
    CHECK(assembled == last_field);
    CHECK(std::strtod(assembled.c_str(), nullptr) > 0.0);
  }
  CHECK(rows == 5);
}

TEST_CASE("simulate is byte-deterministic in the seed") {
  fs::path a = work_dir() / "sim_a.csv";
  fs::path b = work_dir() / "sim_b.csv";
  fs::path c = work_dir() / "sim_c.csv";
  std::string base =
      "simulate --star-height 1 --lambda 0.9 --nu 0.1 --replicates 50 --lengths-only";
  REQUIRE(run_cli(base + " --seed 42 --out \"" + a.string() + "\"") == 0);
  REQUIRE(run_cli(base + " --seed 42 --out \"" + b.string() + "\"") == 0);
  REQUIRE(run_cli(base + " --seed 43 --out \"" + c.string() + "\"") == 0);
  std::string sa = read_file(a);
  CHECK(sa == read_file(b));
  CHECK(sa != read_file(c));
  CHECK(sa.rfind("replicate,leaf,length\n", 0) == 0);
  CHECK(sa.find("leaf1") != std::string::npos);
  CHECK(sa.find("leaf2") != std::string::npos);
}

TEST_CASE("simulate accepts a newick literal or file with identical output") {
  fs::path file = work_dir() / "tree.nwk";
  write_file(file, "(A:0.4,B:0.6);");
  fs::path a = work_dir() / "fasta_literal.fa";
  fs::path b = work_dir() / "fasta_file.fa";
  REQUIRE(run_cli("simulate --tree \"(A:0.4,B:0.6);\" --lambda 0.8 --replicates 2 --seed 9 "
                  "--out \"" +
                  a.string() + "\"") == 0);
  REQUIRE(run_cli("simulate --tree \"" + file.string() + "\" --lambda 0.8 --replicates 2 "
                  "--seed 9 --out \"" +
                  b.string() + "\"") == 0);
  std::string fa = read_file(a);
  CHECK(fa == read_file(b));
  CHECK(fa.rfind(">rep0/A\n", 0) == 0);
  CHECK(fa.find(">rep1/B\n") != std::string::npos);
}

TEST_CASE("simulate with zero replicates emits only the header") {
  fs::path out = work_dir() / "sim_empty.csv";
  REQUIRE(run_cli("simulate --star-height 1 --lambda 0.5 --replicates 0 --lengths-only "
                  "--out \"" +
                  out.string() + "\"") == 0);
  CHECK(read_file(out) == "replicate,leaf,length\n");
}

TEST_CASE("joint emits csv and json forms of the pair law") {
  fs::path csv = work_dir() / "joint.csv";
  REQUIRE(run_cli("joint --h 1 --eps 1e-6 --lambda 0.5 --out \"" + csv.string() + "\"") == 0);
  CHECK(read_file(csv).rfind("value,value2,mass\n", 0) == 0);

  fs::path js = work_dir() / "joint.json";
  REQUIRE(run_cli("joint --h 1 --eps 1e-6 --lambda 0.5 --format json --out \"" + js.string() +
                  "\"") == 0);
  json j = json::parse(read_file(js));
  CHECK(j.at("y1_offset").get<std::int64_t>() == 0);
  CHECK(j.at("tail_bound").get<double>() <= 2e-6);
  REQUIRE(!j.at("rows").empty());
  double p00 = j.at("rows")[0].at("masses")[0].get<double>();
  tkf::JointLaw law = tkf::joint_pair_law(params(0.5), 1.0, true, 1e-6);
  CHECK(p00 == doctest::Approx(law.at(0, 0)).epsilon(1e-13));
}

TEST_CASE("config file fills parameters and flags take precedence") {
  fs::path cfg = work_dir() / "cfg.json";
  write_file(cfg, "{\"lambda\": 0.9}\n");
  fs::path a = work_dir() / "cfg_a.csv";
  REQUIRE(run_cli("pmf --M 1 --t 1 --config \"" + cfg.string() + "\" --out \"" + a.string() +
                  "\"") == 0);
  CHECK(std::fabs(mass_at_zero(read_file(a)) - tkf::eta(params(0.9), 1.0)) <= 1e-14);

  fs::path b = work_dir() / "cfg_b.csv";
  REQUIRE(run_cli("pmf --M 1 --t 1 --config \"" + cfg.string() + "\" --lambda 0.5 --out \"" +
                  b.string() + "\"") == 0);
  CHECK(std::fabs(mass_at_zero(read_file(b)) - tkf::eta(params(0.5), 1.0)) <= 1e-14);
}

TEST_CASE("usage errors exit 2, model errors exit 1 with json on stderr") {
  fs::path devnull = work_dir() / "ignored.txt";
  fs::path err = work_dir() / "err.txt";
  CHECK(run_cli("", devnull, err) == 2);
  CHECK(run_cli("pmf --M 1 --t 1 --bogus-flag", devnull, err) == 2);
  CHECK(run_cli("simulate --replicates 3", devnull, err) == 2);

  CHECK(run_cli("pmf --M 1 --t 1 --lambda 1.0 --mu 1.0", devnull, err) == 1);
  CHECK(read_file(err).find("\"error\":\"ParamError\"") != std::string::npos);

  CHECK(run_cli("estimate --pairs \"" + (work_dir() / "missing.csv").string() + "\"", devnull,
                err) == 1);
  CHECK(read_file(err).find("\"error\":\"Io\"") != std::string::npos);

  fs::path bad_pairs = work_dir() / "bad_pairs.csv";
  write_file(bad_pairs, "x,y\n1,2\n");
  CHECK(run_cli("estimate --pairs \"" + bad_pairs.string() + "\"", devnull, err) == 1);
  CHECK(read_file(err).find("\"error\":\"Io\"") != std::string::npos);
}

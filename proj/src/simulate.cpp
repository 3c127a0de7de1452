#include "tkf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "parallel.hpp"
#include "tkf/analytics.hpp"
#include "tkf/errors.hpp"
#include "tkf/sequence.hpp"

namespace tkf {

namespace {

void check_cap(std::int64_t next_len, std::int64_t cap) {
  if (next_len > cap)
    throw CapExceededError{"sequence length would exceed cap " + std::to_string(cap)};
}

void check_rates(const ModelParams& p) {
  if (!(p.lambda > 0.0) || !(p.mu > 0.0) || !(p.nu >= 0.0))
    throw ParamError{"rates must satisfy lambda > 0, mu > 0, nu >= 0"};
}

using detail::parallel_for_index;

}  // namespace

Sequence sample_root_stationary(const ModelParams& p, const SimConfig& cfg, Philox& rng) {
  double r = p.ratio();
  if (!(r < 1.0)) throw ParamError{"stationary root sampling requires lambda < mu"};
  std::int64_t M = rng.geometric(std::log(r));
  check_cap(M, cfg.max_length_cap);
  Sequence seq;
  seq.digits.reserve(static_cast<std::size_t>(M));
  seq.lineage.reserve(static_cast<std::size_t>(M));
  for (std::int64_t i = 1; i <= M; ++i) {
    seq.digits.push_back(rng.bernoulli(p.pi1) ? 1 : 0);
    seq.lineage.push_back(i);
  }
  return seq;
}

Sequence evolve_sequence(const ModelParams& p, Sequence seq, double t, const SimConfig& cfg,
                         Philox& rng) {
  check_rates(p);
  if (!(t >= 0.0)) throw ParamError{"time must be >= 0"};
  double now = 0.0;
  for (;;) {
    double n = static_cast<double>(seq.length());
    double ins = (n + 1.0) * p.lambda;
    double del = n * p.mu;
    double sub = n * p.nu;
    double total = ins + del + sub;
    now += rng.exponential(total);
    if (!(now < t)) break;
    double u = rng.uniform01() * total;
    if (u < ins) {
      check_cap(seq.length() + 1, cfg.max_length_cap);
      // slot 0 is the immortal link; slot i >= 1 is mortal site i (1-based)
      auto slot = std::min<std::int64_t>(static_cast<std::int64_t>(u / p.lambda), seq.length());
      std::uint8_t d = rng.bernoulli(p.pi1) ? 1 : 0;
      std::int64_t lin = slot == 0 ? 0 : seq.lineage[static_cast<std::size_t>(slot - 1)];
      seq.digits.insert(seq.digits.begin() + slot, d);
      seq.lineage.insert(seq.lineage.begin() + slot, lin);
    } else if (u < ins + del) {
      auto j = std::min<std::int64_t>(static_cast<std::int64_t>((u - ins) / p.mu),
                                      seq.length() - 1);
      seq.digits.erase(seq.digits.begin() + j);
      seq.lineage.erase(seq.lineage.begin() + j);
    } else {
      auto j = std::min<std::int64_t>(static_cast<std::int64_t>((u - ins - del) / p.nu),
                                      seq.length() - 1);
      seq.digits[static_cast<std::size_t>(j)] = rng.bernoulli(p.pi1) ? 1 : 0;
    }
  }
  return seq;
}

std::int64_t evolve_length(const ModelParams& p, std::int64_t M, double t, const SimConfig& cfg,
                           Philox& rng) {
  check_rates(p);
  if (!(t >= 0.0)) throw ParamError{"time must be >= 0"};
  if (M < 0) throw ParamError{"length must be >= 0"};
  std::int64_t n = M;
  double now = 0.0;
  for (;;) {
    double ins = (static_cast<double>(n) + 1.0) * p.lambda;
    double del = static_cast<double>(n) * p.mu;
    double total = ins + del;
    now += rng.exponential(total);
    if (!(now < t)) break;
    if (rng.uniform01() * total < ins) {
      check_cap(n + 1, cfg.max_length_cap);
      ++n;
    } else {
      --n;
    }
  }
  return n;
}

std::int64_t evolve_mortal_progeny(const ModelParams& p, double t, const SimConfig& cfg,
                                   Philox& rng) {
  check_rates(p);
  if (!(t >= 0.0)) throw ParamError{"time must be >= 0"};
  std::int64_t n = 1;
  double now = 0.0;
  while (n > 0) {
    double total = static_cast<double>(n) * (p.lambda + p.mu);
    now += rng.exponential(total);
    if (!(now < t)) break;
    if (rng.uniform01() * (p.lambda + p.mu) < p.lambda) {
      check_cap(n + 1, cfg.max_length_cap);
      ++n;
    } else {
      --n;
    }
  }
  return n;
}

std::int64_t sample_leaf_length_exact(const ModelParams& p, double t, std::int64_t M,
                                      Philox& rng) {
  if (M < 0) throw ParamError{"length must be >= 0"};
  LinkCoeffs c = link_coeffs(p, t);
  if (c.q == 0.0) return M;  // t = 0: every link survives unchanged
  double ln_q = std::log(c.q);
  std::int64_t total = rng.geometric(ln_q);  // immortal offspring
  for (std::int64_t i = 0; i < M; ++i)
    if (!rng.bernoulli(c.eta)) total += 1 + rng.geometric(ln_q);
  return total;
}

std::vector<LengthPair> sample_leaf_pairs(const ModelParams& p, const StarTree2& star,
                                          std::int64_t count, const SimConfig& cfg) {
  if (count < 0) throw ParamError{"replicate count must be >= 0"};
  validate(p);
  std::vector<LengthPair> out(static_cast<std::size_t>(count));
  parallel_for_index(count, cfg.threads, [&](std::int64_t r) {
    Philox rng{cfg.seed, cfg.stream_id, static_cast<std::uint32_t>(r)};
    Sequence root = sample_root_stationary(p, cfg, rng);
    std::int64_t M = root.length();
    out[static_cast<std::size_t>(r)].n1 = evolve_length(p, M, star.h, cfg, rng);
    out[static_cast<std::size_t>(r)].n2 = evolve_length(p, M, star.h, cfg, rng);
  });
  return out;
}

std::vector<LengthPair> sample_leaf_pairs_exact(const ModelParams& p, const StarTree2& star,
                                                std::int64_t count, const SimConfig& cfg) {
  if (count < 0) throw ParamError{"replicate count must be >= 0"};
  validate(p);
  std::vector<LengthPair> out(static_cast<std::size_t>(count));
  parallel_for_index(count, cfg.threads, [&](std::int64_t r) {
    Philox rng{cfg.seed, cfg.stream_id, static_cast<std::uint32_t>(r)};
    double ratio = p.ratio();
    std::int64_t M = rng.geometric(std::log(ratio));
    out[static_cast<std::size_t>(r)].n1 = sample_leaf_length_exact(p, star.h, M, rng);
    out[static_cast<std::size_t>(r)].n2 = sample_leaf_length_exact(p, star.h, M, rng);
  });
  return out;
}

std::map<std::string, Sequence> simulate_tree(const ModelParams& p, const RootedTree& tree,
                                              const SimConfig& cfg, std::uint32_t replicate) {
  if (tree.nodes.empty()) throw ParamError{"tree has no nodes"};
  Philox rng{cfg.seed, cfg.stream_id, replicate};
  std::vector<Sequence> seqs(tree.nodes.size());
  seqs[0] = sample_root_stationary(p, cfg, rng);
  // parse order puts every parent before its children
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    seqs[i] = evolve_sequence(p, seqs[static_cast<std::size_t>(node.parent)], node.branch, cfg,
                              rng);
  }
  std::map<std::string, Sequence> out;
  for (int leaf : tree.leaves()) out[tree.nodes[static_cast<std::size_t>(leaf)].name] =
      std::move(seqs[static_cast<std::size_t>(leaf)]);
  return out;
}

void write_lengths_csv(std::ostream& os, const std::vector<LengthRecord>& rows) {
  os << "replicate,leaf,length\n";
  for (const auto& r : rows) os << r.replicate << ',' << r.leaf << ',' << r.length << '\n';
}

void write_fasta(std::ostream& os, const std::string& label, const Sequence& seq) {
  os << '>' << label << '\n';
  for (std::uint8_t d : seq.digits) os << static_cast<char>('0' + d);
  os << '\n';
}

}  // namespace tkf

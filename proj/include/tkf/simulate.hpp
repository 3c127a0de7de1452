#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tkf/params.hpp"
#include "tkf/rng.hpp"

namespace tkf {

struct SimConfig {
  std::uint64_t seed = 12345;
  std::uint32_t stream_id = 0;
  std::int64_t max_length_cap = 10'000'000;  // hitting it throws, never truncates
  int threads = 1;                           // 0 = hardware concurrency
};

// Observed leaf lengths from one two-leaf star-tree evolution.
struct LengthPair {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
};

// Root state from the stationary measure: geometric length, i.i.d. digits,
// lineage ids 1..M.
Sequence sample_root_stationary(const ModelParams& p, const SimConfig& cfg, Philox& rng);

// Exact event-driven simulation of the full sequence process for time t.
// Event classes: insertion rate (M+1)λ (every site incl. the immortal link),
// deletion Mμ, substitution Mν; inserted digits go immediately right of the
// parent and inherit its lineage id (immortal children get 0).
Sequence evolve_sequence(const ModelParams& p, Sequence seq, double t,
                         const SimConfig& cfg, Philox& rng);

// Length-only path: the linear birth-death chain with immigration
// (up n → n+1 at rate (n+1)λ, down at nμ). Marginally identical in law to
// the length of evolve_sequence.
std::int64_t evolve_length(const ModelParams& p, std::int64_t M, double t,
                           const SimConfig& cfg, Philox& rng);

// Progeny of a single mortal site (itself included): birth-death without
// immigration, up nλ / down nμ, started at 1 and absorbed at 0.
std::int64_t evolve_mortal_progeny(const ModelParams& p, double t,
                                   const SimConfig& cfg, Philox& rng);

// Draws a leaf length given root length M from the exact conditional law
// (binomial survivors + geometric offspring + immortal geometric) instead of
// simulating events. Identical in law to evolve_length(M, t) with the
// immortal link included; O(M) draws regardless of t.
std::int64_t sample_leaf_length_exact(const ModelParams& p, double t, std::int64_t M,
                                      Philox& rng);

// count replicates of: root ~ γ, two independent evolutions of height h.
// Replicates are partitioned across cfg.threads; replicate i always uses
// substream (seed, stream_id, i), so results never depend on thread count.
std::vector<LengthPair> sample_leaf_pairs(const ModelParams& p, const StarTree2& star,
                                          std::int64_t count, const SimConfig& cfg);
// Same interface, but each leaf is drawn via sample_leaf_length_exact.
std::vector<LengthPair> sample_leaf_pairs_exact(const ModelParams& p, const StarTree2& star,
                                                std::int64_t count, const SimConfig& cfg);

// One replicate of the recursive process down a rooted tree: root ~ Π, each
// edge an independent evolve_sequence run. Returns leaf name -> sequence.
std::map<std::string, Sequence> simulate_tree(const ModelParams& p, const RootedTree& tree,
                                              const SimConfig& cfg, std::uint32_t replicate = 0);

// Writers for simulation output: CSV length table (replicate, leaf, length)
// and FASTA-like digit strings (">rep<i>/<leaf>" records).
struct LengthRecord {
  std::int64_t replicate = 0;
  std::string leaf;
  std::int64_t length = 0;
};
void write_lengths_csv(std::ostream& os, const std::vector<LengthRecord>& rows);
void write_fasta(std::ostream& os, const std::string& label, const Sequence& seq);

}  // namespace tkf

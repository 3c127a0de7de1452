#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tkf {

// A sequence state: the immortal link is implicit (never stored), `digits`
// holds the mortal sites in order, and `lineage[i]` is the id of the root
// site that digit i descends from (0 = descendant of the immortal link,
// k >= 1 = descendant of root mortal site k).
struct Sequence {
  std::vector<std::uint8_t> digits;   // values in {0,1}
  std::vector<std::int64_t> lineage;  // same length as digits

  std::int64_t length() const { return static_cast<std::int64_t>(digits.size()); }
};

// Two-leaf star tree: both leaves at distance h from the root.
struct StarTree2 {
  double h = 1.0;
};

// General rooted tree with branch lengths. Node 0 is the root; children are
// kept in parse order so traversals are deterministic.
struct RootedTree {
  struct Node {
    std::string name;              // empty for unnamed internal nodes
    int parent = -1;               // -1 for the root
    double branch = 0.0;           // length of the edge to the parent
    std::vector<int> children;
  };
  std::vector<Node> nodes;

  int root() const { return 0; }
  std::vector<int> leaves() const;
};

// Parses a Newick string, e.g. "((A:0.1,B:0.2):0.3,C:0.4);".
// Leaf labels and branch lengths are required; throws ParamError otherwise.
RootedTree parse_newick(std::string_view text);

}  // namespace tkf

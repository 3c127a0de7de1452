#include "tkf/sequence.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <string>

#include "tkf/errors.hpp"

namespace tkf {

std::vector<int> RootedTree::leaves() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
    if (nodes[i].children.empty()) out.push_back(i);
  return out;
}

namespace {

struct NewickParser {
  std::string_view text;
  std::size_t pos = 0;
  RootedTree tree;

  [[noreturn]] void fail(const std::string& why) const {
    throw ParamError{"newick parse error at offset " + std::to_string(pos) + ": " + why};
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }

  std::string parse_name() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos;
    }
    return std::string{text.substr(start, pos - start)};
  }

  double parse_branch() {
    skip_ws();
    if (pos >= text.size() || text[pos] != ':') fail("expected ':' before branch length");
    ++pos;
    skip_ws();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{}) fail("invalid branch length");
    pos = static_cast<std::size_t>(ptr - text.data());
    if (!(value > 0.0)) fail("branch lengths must be > 0");
    return value;
  }

  // subtree := '(' subtree (',' subtree)* ')' [name] | name
  int parse_subtree(int parent) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].parent = parent;
    if (peek() == '(') {
      ++pos;
      while (true) {
        int child = parse_subtree(id);
        tree.nodes[child].branch = parse_branch();
        tree.nodes[id].children.push_back(child);
        char c = peek();
        if (c == ',') {
          ++pos;
          continue;
        }
        if (c == ')') {
          ++pos;
          break;
        }
        fail("expected ',' or ')'");
      }
      tree.nodes[id].name = parse_name();  // optional internal label
    } else {
      tree.nodes[id].name = parse_name();
      if (tree.nodes[id].name.empty()) fail("leaf labels are required");
    }
    return id;
  }
};

}  // namespace

RootedTree parse_newick(std::string_view text) {
  NewickParser p{text};
  p.parse_subtree(-1);
  p.skip_ws();
  if (p.pos < text.size() && text[p.pos] == ':') {
    // A root branch length is tolerated (and ignored: the root has no edge).
    ++p.pos;
    p.skip_ws();
    double ignored = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + p.pos, text.data() + text.size(), ignored);
    if (ec != std::errc{} || ignored < 0.0) p.fail("invalid root branch length");
    p.pos = static_cast<std::size_t>(ptr - text.data());
    p.skip_ws();
  }
  if (p.pos >= text.size() || text[p.pos] != ';') p.fail("expected ';'");
  ++p.pos;
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters after ';'");
  std::set<std::string> seen;
  for (int leaf : p.tree.leaves()) {
    const std::string& name = p.tree.nodes[leaf].name;
    if (name.empty()) p.fail("leaf labels are required");
    if (!seen.insert(name).second) p.fail("duplicate leaf label '" + name + "'");
  }
  return std::move(p.tree);
}

}  // namespace tkf

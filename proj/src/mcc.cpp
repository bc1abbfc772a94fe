#include "hce/mcc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "hce/error.hpp"

namespace hce {

namespace {

std::string id_str(std::size_t id) { return std::to_string(id); }

}  // namespace

CompletedTree complete_tree(const ConsensusTree& tree) {
  const std::size_t n = tree.s_c.size();
  if (n == 0) throw Error(ErrorCode::NTooSmall, "s_c is empty");

  std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> children;
  std::map<std::size_t, std::size_t> parent_of;
  std::set<std::size_t> nodes;
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    const TreeEdge& edge = tree.edges[e];
    if (!(edge.similarity > 0.0 && edge.similarity <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig,
                  "tree row " + id_str(e) + ": similarity must lie in (0, 1]", e);
    }
    if (edge.parent == edge.child) {
      throw Error(ErrorCode::CyclicTree,
                  "tree row " + id_str(e) + ": community " + id_str(edge.child) +
                      " is its own parent",
                  e);
    }
    if (!parent_of.emplace(edge.child, edge.parent).second) {
      throw Error(ErrorCode::CyclicTree,
                  "tree row " + id_str(e) + ": community " + id_str(edge.child) +
                      " has two parents",
                  e);
    }
    children[edge.parent].emplace_back(edge.child, edge.similarity);
    nodes.insert(edge.parent);
    nodes.insert(edge.child);
  }
  for (auto& [p, list] : children) std::sort(list.begin(), list.end());

  const std::set<std::size_t> finest(tree.s_c.begin(), tree.s_c.end());
  std::size_t root = 0;
  if (tree.edges.empty()) {
    if (finest.size() != 1) {
      throw Error(ErrorCode::MultipleRoots,
                  "no merges given but s_c has " + id_str(finest.size()) +
                      " communities");
    }
    root = *finest.begin();
  } else {
    std::vector<std::size_t> roots;
    for (std::size_t c : nodes) {
      if (!parent_of.count(c)) roots.push_back(c);
    }
    if (roots.empty()) throw Error(ErrorCode::CyclicTree, "the merge list has no root");
    if (roots.size() > 1) {
      throw Error(ErrorCode::MultipleRoots,
                  "communities " + id_str(roots[0]) + " and " + id_str(roots[1]) +
                      " both have no parent");
    }
    root = roots[0];

    std::size_t reached = 0;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++reached;
      if (auto it = children.find(c); it != children.end()) {
        for (const auto& [child, s] : it->second) stack.push_back(child);
      }
    }
    if (reached != nodes.size()) {
      throw Error(ErrorCode::CyclicTree, "some merges are not reachable from root " +
                                             id_str(root));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!nodes.count(tree.s_c[i])) {
        throw Error(ErrorCode::OrphanNode,
                    "node " + id_str(i) + " belongs to community " +
                        id_str(tree.s_c[i]) + ", which the merge list never mentions",
                    i);
      }
    }
    for (std::size_t c : nodes) {
      const bool is_finest = finest.count(c) > 0;
      const bool has_children = children.count(c) > 0;
      if (is_finest && has_children) {
        throw Error(ErrorCode::InvalidConfig,
                    "finest community " + id_str(c) + " has child communities", c);
      }
      if (!is_finest && !has_children) {
        throw Error(ErrorCode::EmptyCommunity,
                    "community " + id_str(c) + " has no members", c);
      }
    }
    for (const auto& [p, list] : children) {
      const auto up = parent_of.find(p);
      if (up == parent_of.end()) continue;
      const double above = std::find_if(children[up->second].begin(),
                                        children[up->second].end(),
                                        [&](const auto& x) { return x.first == p; })
                               ->second;
      for (const auto& [child, s] : list) {
        if (above > s) {
          throw Error(ErrorCode::NonMonotoneSimilarity,
                      "community " + id_str(p) + " merges at similarity " +
                          std::to_string(above) + " above a child merge at " +
                          std::to_string(s),
                      p);
        }
      }
    }
  }

  // Post-order numbering, children in ascending original id.
  std::map<std::size_t, std::size_t> new_id;
  std::vector<std::size_t> order;
  std::vector<std::pair<std::size_t, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [c, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      new_id[c] = n + order.size();
      order.push_back(c);
      continue;
    }
    stack.push_back({c, true});
    if (auto it = children.find(c); it != children.end()) {
      for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
        stack.push_back({rit->first, false});
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[tree.s_c[i]].push_back(i);

  CompletedTree out;
  out.n_leaves = n;
  out.root = new_id.at(root);
  for (std::size_t c : order) {
    if (finest.count(c)) {
      for (std::size_t leaf : members[c]) out.edges.push_back({new_id[c], leaf, 1.0});
    } else {
      for (const auto& [child, s] : children[c]) {
        out.edges.push_back({new_id[c], new_id.at(child), s});
      }
    }
  }
  return out;
}

Linkage tree_to_linkage(const CompletedTree& tree) {
  const std::size_t n = tree.n_leaves;
  std::size_t max_id = n == 0 ? 0 : n - 1;
  for (const TreeEdge& e : tree.edges) max_id = std::max({max_id, e.parent, e.child});
  std::vector<std::size_t> remaining(max_id + 1, 0);
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    if (tree.edges[e].parent < n) {
      throw Error(ErrorCode::IdOutOfRange,
                  "tree row " + id_str(e) + ": parent " + id_str(tree.edges[e].parent) +
                      " is a leaf id",
                  e);
    }
    ++remaining[tree.edges[e].parent];
  }

  std::vector<std::size_t> order(tree.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const TreeEdge& a = tree.edges[x];
    const TreeEdge& b = tree.edges[y];
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.parent != b.parent) return a.parent < b.parent;
    return a.child < b.child;
  });

  std::vector<std::optional<NodeId>> rep(max_id + 1), current(max_id + 1);
  for (std::size_t i = 0; i < n; ++i) rep[i] = i;
  std::vector<RawMerge> rows;
  rows.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t e : order) {
    const TreeEdge& edge = tree.edges[e];
    if (remaining[edge.child] != 0) {
      throw Error(ErrorCode::NonMonotoneSimilarity,
                  "community " + id_str(edge.child) + " joins its parent at similarity " +
                      std::to_string(edge.similarity) +
                      " before all of its own children merged",
                  e);
    }
    if (!rep[edge.child]) {
      throw Error(ErrorCode::EmptyCommunity,
                  "community " + id_str(edge.child) + " has no members", e);
    }
    const NodeId r = *rep[edge.child];
    auto& cur = current[edge.parent];
    if (!cur) {
      cur = r;
    } else {
      rows.push_back({std::min(*cur, r), std::max(*cur, r), 1.0 - edge.similarity,
                      std::nullopt});
      cur = n + rows.size() - 1;
    }
    if (--remaining[edge.parent] == 0) rep[edge.parent] = cur;
  }
  if (rows.size() + 1 != n) {
    throw Error(ErrorCode::MultipleRoots,
                "tree yields " + id_str(rows.size()) + " merges for " + id_str(n) +
                    " leaves");
  }
  return Linkage::validate(rows, n);
}

}  // namespace hce

#pragma once

// Brute-force reference implementations. They follow the definitions
// directly and share no code with the library beyond its data types.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "usp/core.hpp"
#include "usp/graphalg.hpp"
#include "usp/rational.hpp"

namespace oracle {

using usp::Edge;
using usp::NodeId;
using usp::Path;
using usp::PathSystem;
using usp::Rational;
using usp::WeightedDigraph;
using usp::WeightedPathSystem;

inline std::vector<std::vector<NodeId>> adjacency(const WeightedDigraph& g) {
  std::vector<std::vector<NodeId>> adj(g.node_count());
  for (const auto& [e, w] : g.edges()) adj[e.first].push_back(e.second);
  return adj;
}

// Every simple s -> t path (s != t), by depth-first enumeration.
inline std::vector<Path> simple_paths(const WeightedDigraph& g, NodeId s, NodeId t) {
  auto adj = adjacency(g);
  std::vector<Path> out;
  std::vector<bool> on(g.node_count(), false);
  Path cur{s};
  on[s] = true;
  std::function<void(NodeId)> dfs = [&](NodeId u) {
    if (u == t) {
      out.push_back(cur);
      return;
    }
    for (NodeId v : adj[u]) {
      if (on[v]) continue;
      on[v] = true;
      cur.push_back(v);
      dfs(v);
      cur.pop_back();
      on[v] = false;
    }
  };
  dfs(s);
  return out;
}

inline std::optional<Rational> length(const WeightedDigraph& g, const Path& p) {
  Rational L = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto it = g.edges().find({p[i], p[i + 1]});
    if (it == g.edges().end()) return std::nullopt;
    L += it->second;
  }
  return L;
}

// p is strictly shorter than every other simple path between its endpoints.
inline bool uniquely_shortest(const WeightedDigraph& g, const Path& p) {
  if (p.size() == 1) return true;
  std::set<NodeId> seen(p.begin(), p.end());
  if (seen.size() != p.size()) return false;
  auto L = length(g, p);
  if (!L) return false;
  for (const auto& q : simple_paths(g, p.front(), p.back())) {
    if (q == p) continue;
    if (*length(g, q) <= *L) return false;
  }
  return true;
}

// Positive weights and every path uniquely shortest, by exhaustive enumeration.
inline bool witness_ok(const PathSystem& s, const WeightedDigraph& g) {
  for (const auto& [e, w] : g.edges())
    if (w <= 0) return false;
  for (const auto& p : s.paths)
    if (!uniquely_shortest(g, p)) return false;
  return true;
}

// All minimum-length simple s -> t paths. Valid for graphs without negative
// cycles, where some shortest walk is simple.
inline std::set<Path> shortest_set(const WeightedDigraph& g, NodeId s, NodeId t) {
  std::set<Path> best;
  std::optional<Rational> bl;
  for (const auto& q : simple_paths(g, s, t)) {
    Rational L = *length(g, q);
    if (!bl || L < *bl) {
      bl = L;
      best.clear();
    }
    if (L == *bl) best.insert(q);
  }
  return best;
}

inline bool has_repeat(const Path& p) { return std::set<NodeId>(p.begin(), p.end()).size() != p.size(); }

// For all paths p, q and nodes x, y occurring in both, x (weakly) before y,
// the contiguous x..y stretches agree. A repeated node is inconsistent.
inline bool consistent(const PathSystem& s) {
  for (const auto& p : s.paths)
    if (has_repeat(p)) return false;
  for (const auto& p : s.paths)
    for (const auto& q : s.paths)
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i; j < p.size(); ++j) {
          auto a = std::find(q.begin(), q.end(), p[i]);
          auto b = std::find(q.begin(), q.end(), p[j]);
          if (a == q.end() || b == q.end() || a > b) continue;
          if (!std::equal(p.begin() + i, p.begin() + j + 1, a, b + 1)) return false;
        }
  return true;
}

inline std::map<Edge, Rational> boundary(const WeightedPathSystem& s) {
  std::map<Edge, Rational> b;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Path& p = s.paths()[i];
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      if (p[k] != p[k + 1]) b[{p[k], p[k + 1]}] += s.weights[i];
    if (p.front() != p.back()) b[{p.front(), p.back()}] -= s.weights[i];
  }
  for (auto it = b.begin(); it != b.end();) it = it->second == 0 ? b.erase(it) : std::next(it);
  return b;
}

inline std::map<NodeId, Rational> node_boundary(const std::map<Edge, Rational>& b) {
  std::map<NodeId, Rational> out;
  for (const auto& [e, x] : b) {
    out[e.first] -= x;
    out[e.second] += x;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

inline bool nontrivial(const PathSystem& s) {
  for (const auto& p : s.paths) {
    WeightedPathSystem one{PathSystem{s.names, {p}}, {Rational(1)}};
    if (boundary(one).empty()) return false;
  }
  return true;
}

inline bool semisimple(const PathSystem& s) {
  for (const auto& p : s.paths) {
    if (!has_repeat(p)) continue;
    bool cycle = p.size() > 1 && p.front() == p.back() && !has_repeat(Path(p.begin(), p.end() - 1));
    if (!cycle) return false;
  }
  return true;
}

// No path's endpoint pair appears as a consecutive pair of any path,
// itself included unless `distinct_only`.
inline bool skip_free(const PathSystem& s, bool distinct_only = false) {
  for (const auto& p : s.paths)
    for (const auto& q : s.paths) {
      if (distinct_only && p == q) continue;
      for (std::size_t k = 0; k + 1 < q.size(); ++k)
        if (q[k] == p.front() && q[k + 1] == p.back()) return false;
    }
  return true;
}

// A topological order of all nodes respecting every path order, by trying
// every permutation of the used nodes.
inline bool acyclic(const PathSystem& s) {
  auto used = s.used_nodes();
  std::sort(used.begin(), used.end());
  do {
    std::map<NodeId, std::size_t> rank;
    for (std::size_t i = 0; i < used.size(); ++i) rank[used[i]] = i;
    bool ok = true;
    for (const auto& p : s.paths)
      for (std::size_t k = 0; k + 1 < p.size() && ok; ++k) ok = rank[p[k]] < rank[p[k + 1]];
    if (ok) return true;
  } while (std::next_permutation(used.begin(), used.end()));
  return false;
}

// Homomorphism by the definition. Target paths must be simple so that node
// positions are well defined.
inline bool is_hom(const PathSystem& s1, const PathSystem& s2, const std::vector<NodeId>& phi,
                   const std::vector<int>& rho) {
  auto pos = [](const Path& p, NodeId x) -> long {
    auto it = std::find(p.begin(), p.end(), x);
    return it == p.end() ? -1 : it - p.begin();
  };
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const Path& r = s2.paths[rho[i]];
    Path img;
    for (NodeId v : s1.paths[i]) img.push_back(phi[v]);
    std::size_t j = 0;
    for (NodeId x : r)
      if (j < img.size() && img[j] == x) ++j;
    if (j != img.size()) return false;
  }
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s1.size(); ++j) {
      if (i == j) continue;
      const Path &p1 = s1.paths[i], &p2 = s1.paths[j];
      const Path &r1 = s2.paths[rho[i]], &r2 = s2.paths[rho[j]];
      for (std::size_t a = 0; a < p1.size(); ++a)
        for (std::size_t b = 0; b < p2.size(); ++b) {
          if (p1[a] != p2[b]) continue;
          NodeId v = p1[a];
          if (a > 0 && b > 0 && p1[a - 1] != p2[b - 1]) {
            long lo1 = pos(r1, phi[p1[a - 1]]), hi1 = pos(r1, phi[v]);
            long lo2 = pos(r2, phi[p2[b - 1]]), hi2 = pos(r2, phi[v]);
            bool ok = false;
            for (long x = lo1 + 1; x <= hi1 && !ok; ++x) {
              long y = pos(r2, r1[x]);
              ok = y > lo2 && y <= hi2 && x > 0 && y > 0 && r1[x - 1] != r2[y - 1];
            }
            if (!ok) return false;
          }
          if (a + 1 < p1.size() && b + 1 < p2.size() && p1[a + 1] != p2[b + 1]) {
            long lo1 = pos(r1, phi[v]), hi1 = pos(r1, phi[p1[a + 1]]);
            long lo2 = pos(r2, phi[v]), hi2 = pos(r2, phi[p2[b + 1]]);
            bool ok = false;
            for (long x = lo1; x < hi1 && !ok; ++x) {
              long y = pos(r2, r1[x]);
              ok = y >= lo2 && y < hi2 && x + 1 < static_cast<long>(r1.size()) &&
                   y + 1 < static_cast<long>(r2.size()) && r1[x + 1] != r2[y + 1];
            }
            if (!ok) return false;
          }
        }
    }
  return true;
}

// Whether any homomorphism exists, trying every node map and every path map.
inline bool hom_exists(const PathSystem& s1, const PathSystem& s2) {
  auto used1 = s1.used_nodes();
  auto used2 = s2.used_nodes();
  if (s1.size() > 0 && s2.size() == 0) return false;
  std::vector<NodeId> phi(s1.names.size(), 0);
  std::vector<int> rho(s1.size(), 0);
  std::function<bool(std::size_t)> paths = [&](std::size_t i) {
    if (i == s1.size()) return is_hom(s1, s2, phi, rho);
    for (std::size_t j = 0; j < s2.size(); ++j) {
      rho[i] = static_cast<int>(j);
      if (paths(i + 1)) return true;
    }
    return false;
  };
  std::function<bool(std::size_t)> nodes = [&](std::size_t k) {
    if (k == used1.size()) return paths(0);
    for (NodeId x : used2) {
      phi[used1[k]] = x;
      if (nodes(k + 1)) return true;
    }
    return false;
  };
  return nodes(0);
}

}  // namespace oracle

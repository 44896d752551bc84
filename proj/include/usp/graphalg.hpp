#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "usp/core.hpp"
#include "usp/rational.hpp"

namespace usp {

class WeightedDigraph {
 public:
  WeightedDigraph() = default;
  explicit WeightedDigraph(int n, std::vector<std::string> names = {})
      : n_(n), names_(std::move(names)), out_(n), in_(n) {
    if (names_.empty())
      for (int i = 0; i < n; ++i) names_.push_back(std::to_string(i));
    if (static_cast<int>(names_.size()) != n) throw std::invalid_argument("name table size mismatch");
  }

  int node_count() const { return n_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t edge_count() const { return w_.size(); }

  void set_weight(NodeId u, NodeId v, const Rational& w) {
    check(u);
    check(v);
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
    auto [it, inserted] = w_.insert_or_assign({u, v}, w);
    (void)it;
    if (inserted) {
      out_[u].insert(std::upper_bound(out_[u].begin(), out_[u].end(), v), v);
      in_[v].insert(std::upper_bound(in_[v].begin(), in_[v].end(), u), u);
    }
  }
  std::optional<Rational> weight(NodeId u, NodeId v) const {
    auto it = w_.find({u, v});
    if (it == w_.end()) return std::nullopt;
    return it->second;
  }
  const Rational& weight_ref(NodeId u, NodeId v) const { return w_.at({u, v}); }
  bool has_edge(NodeId u, NodeId v) const { return w_.count({u, v}) != 0; }
  const std::map<Edge, Rational>& edges() const { return w_; }
  const std::vector<NodeId>& out(NodeId u) const { return out_.at(u); }
  const std::vector<NodeId>& in(NodeId v) const { return in_.at(v); }

  friend bool operator==(const WeightedDigraph& a, const WeightedDigraph& b) {
    return a.n_ == b.n_ && a.names_ == b.names_ && a.w_ == b.w_;
  }

 private:
  void check(NodeId u) const {
    if (u < 0 || u >= n_) throw std::out_of_range("node id out of range");
  }
  int n_ = 0;
  std::vector<std::string> names_;
  std::map<Edge, Rational> w_;
  std::vector<std::vector<NodeId>> out_, in_;
};

inline std::optional<Rational> path_length(const WeightedDigraph& g, const Path& p) {
  Rational len = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto w = g.weight(p[i], p[i + 1]);
    if (!w) return std::nullopt;
    len += *w;
  }
  return len;
}

namespace detail {

struct DijkstraResult {
  std::vector<std::optional<Rational>> dist;
  std::vector<NodeId> parent;
};

// Requires nonnegative weights on every usable edge.
inline DijkstraResult dijkstra(const WeightedDigraph& g, NodeId src, const std::vector<bool>* banned = nullptr,
                               std::optional<Edge> banned_edge = std::nullopt) {
  const int n = g.node_count();
  DijkstraResult r{std::vector<std::optional<Rational>>(n), std::vector<NodeId>(n, -1)};
  using Item = std::pair<Rational, NodeId>;
  auto cmp = [](const Item& a, const Item& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  std::vector<bool> done(n, false);
  r.dist[src] = Rational(0);
  pq.emplace(Rational(0), src);
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    for (NodeId v : g.out(u)) {
      if (banned && (*banned)[v]) continue;
      if (banned_edge && banned_edge->first == u && banned_edge->second == v) continue;
      const Rational& w = g.weight_ref(u, v);
      if (w < 0) throw std::invalid_argument("negative edge weight in Dijkstra");
      Rational cand = du + w;
      if (!r.dist[v] || cand < *r.dist[v]) {
        r.dist[v] = cand;
        r.parent[v] = u;
        pq.emplace(cand, v);
      }
    }
  }
  return r;
}

inline Path tree_path(const std::vector<NodeId>& parent, NodeId s, NodeId t) {
  Path p{t};
  while (p.back() != s) p.push_back(parent[p.back()]);
  std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace detail

struct ShortestPathResult {
  std::optional<Rational> distance;  // nullopt encodes +infinity
  Path path;
  bool unique = false;
  bool reachable() const { return distance.has_value(); }
};

// Exact Dijkstra plus a uniqueness test on the tight-edge subgraph: the
// shortest path is unique iff the tight edges lying on some tight s~>t walk
// form an acyclic graph with exactly one s~>t path.
inline ShortestPathResult shortest_path(const WeightedDigraph& g, NodeId s, NodeId t) {
  auto dj = detail::dijkstra(g, s);
  ShortestPathResult res;
  if (!dj.dist[t]) return res;
  res.distance = dj.dist[t];
  res.path = detail::tree_path(dj.parent, s, t);

  const int n = g.node_count();
  auto tight = [&](NodeId u, NodeId v) {
    return dj.dist[u] && dj.dist[v] && *dj.dist[u] + g.weight_ref(u, v) == *dj.dist[v];
  };
  std::vector<bool> to_t(n, false);
  std::vector<NodeId> stack{t};
  to_t[t] = true;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : g.in(v))
      if (!to_t[u] && tight(u, v)) {
        to_t[u] = true;
        stack.push_back(u);
      }
  }
  // Kahn order over the relevant tight subgraph, counting s~>t paths.
  std::vector<int> indeg(n, 0);
  int relevant = 0;
  for (NodeId u = 0; u < n; ++u) {
    if (!to_t[u]) continue;
    ++relevant;
    for (NodeId v : g.out(u))
      if (to_t[v] && tight(u, v)) ++indeg[v];
  }
  std::vector<BigInt> count(n, BigInt(0));
  count[s] = 1;
  std::vector<NodeId> order;
  for (NodeId u = 0; u < n; ++u)
    if (to_t[u] && indeg[u] == 0) order.push_back(u);
  for (std::size_t k = 0; k < order.size(); ++k) {
    NodeId u = order[k];
    for (NodeId v : g.out(u)) {
      if (!to_t[v] || !tight(u, v)) continue;
      count[v] += count[u];
      if (--indeg[v] == 0) order.push_back(v);
    }
  }
  bool has_cycle = static_cast<int>(order.size()) != relevant;
  res.unique = !has_cycle && count[t] == 1;
  return res;
}

// Shortest simple s~>t path different from `baseline`, by enumerating the
// first deviation point along the baseline.
inline std::optional<std::pair<Rational, Path>> second_shortest_simple(const WeightedDigraph& g, NodeId s,
                                                                        NodeId t, const Path& baseline) {
  if (baseline.empty() || baseline.front() != s || baseline.back() != t)
    throw std::invalid_argument("baseline must be an s~>t path");
  if (!is_simple_path(baseline)) throw std::invalid_argument("baseline must be simple");
  const int n = g.node_count();
  std::optional<std::pair<Rational, Path>> best;
  std::vector<bool> banned(n, false);
  Rational root_len = 0;
  for (std::size_t i = 0; i + 1 < baseline.size(); ++i) {
    NodeId spur = baseline[i];
    auto dj = detail::dijkstra(g, spur, &banned, Edge{spur, baseline[i + 1]});
    if (dj.dist[t]) {
      Rational total = root_len + *dj.dist[t];
      Path cand(baseline.begin(), baseline.begin() + static_cast<std::ptrdiff_t>(i));
      Path tail = detail::tree_path(dj.parent, spur, t);
      cand.insert(cand.end(), tail.begin(), tail.end());
      if (!best || total < best->first || (total == best->first && cand < best->second))
        best = std::make_pair(total, std::move(cand));
    }
    banned[spur] = true;
    auto w = g.weight(spur, baseline[i + 1]);
    if (!w) throw std::invalid_argument("baseline uses an edge absent from the graph");
    root_len += *w;
  }
  return best;
}

inline bool strongly_connected(const WeightedDigraph& g) {
  const int n = g.node_count();
  if (n == 0) return true;
  for (int dir = 0; dir < 2; ++dir) {
    std::vector<bool> seen(n, false);
    std::vector<NodeId> st{0};
    seen[0] = true;
    int cnt = 1;
    while (!st.empty()) {
      NodeId u = st.back();
      st.pop_back();
      for (NodeId v : dir == 0 ? g.out(u) : g.in(u))
        if (!seen[v]) {
          seen[v] = true;
          ++cnt;
          st.push_back(v);
        }
    }
    if (cnt != n) return false;
  }
  return true;
}

namespace detail {

// Bellman-Ford from the given initial potentials; throws on a negative cycle.
inline std::vector<Rational> bellman_ford(const WeightedDigraph& g, std::vector<std::optional<Rational>> d) {
  const int n = g.node_count();
  for (int round = 0; round <= n; ++round) {
    bool changed = false;
    for (const auto& [e, w] : g.edges()) {
      if (!d[e.first]) continue;
      Rational cand = *d[e.first] + w;
      if (!d[e.second] || cand < *d[e.second]) {
        d[e.second] = cand;
        changed = true;
      }
    }
    if (!changed) {
      std::vector<Rational> out(n);
      for (int v = 0; v < n; ++v) out[v] = d[v] ? *d[v] : Rational(0);
      return out;
    }
  }
  throw std::invalid_argument("negative cycle detected");
}

inline WeightedDigraph shift_by_potential(const WeightedDigraph& g, const std::vector<Rational>& h) {
  WeightedDigraph out(g.node_count(), g.names());
  for (const auto& [e, w] : g.edges()) out.set_weight(e.first, e.second, w + h[e.first] - h[e.second]);
  return out;
}

}  // namespace detail

// w'(u,v) = w(u,v) + dist(x,u) - dist(x,v). Requires strong connectivity.
inline WeightedDigraph johnson_reweight(const WeightedDigraph& g, NodeId x) {
  if (!strongly_connected(g)) throw std::invalid_argument("johnson_reweight requires a strongly connected graph");
  std::vector<std::optional<Rational>> d(g.node_count());
  d.at(x) = Rational(0);
  return detail::shift_by_potential(g, detail::bellman_ford(g, std::move(d)));
}

// Same reweighting with potentials from a virtual source joined to every node
// by a zero edge, so strong connectivity is not needed.
inline WeightedDigraph johnson_reweight_any(const WeightedDigraph& g) {
  std::vector<std::optional<Rational>> d(g.node_count(), Rational(0));
  return detail::shift_by_potential(g, detail::bellman_ford(g, std::move(d)));
}

// w'(u,v) = w'(v,u) = w(u,v) + w(v,u). Requires symmetric support.
inline WeightedDigraph symmetrize(const WeightedDigraph& g) {
  WeightedDigraph out(g.node_count(), g.names());
  for (const auto& [e, w] : g.edges()) {
    auto back = g.weight(e.second, e.first);
    if (!back)
      throw std::invalid_argument("symmetrize: edge (" + g.names()[e.first] + "," + g.names()[e.second] +
                                  ") has no reverse");
    out.set_weight(e.first, e.second, w + *back);
  }
  return out;
}

inline std::string to_dot(const WeightedDigraph& g, const std::string& name = "G") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (int v = 0; v < g.node_count(); ++v) os << "  \"" << g.names()[v] << "\";\n";
  for (const auto& [e, w] : g.edges())
    os << "  \"" << g.names()[e.first] << "\" -> \"" << g.names()[e.second] << "\" [label=\"" << to_string(w)
       << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace usp

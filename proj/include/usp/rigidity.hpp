#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "usp/core.hpp"
#include "usp/exactlp.hpp"
#include "usp/normalize.hpp"

namespace usp {

// Nonnegative edge vector with boundary lambda * (-s + t).
struct Flow {
  BoundaryVec values;
  NodeId s = 0;
  NodeId t = 0;
  Rational lambda;

  bool well_formed() const {
    for (const auto& [e, x] : values)
      if (x < 0 || e.first == e.second) return false;
    NodeVec expect;
    if (s != t) {
      expect.add(s, -lambda);
      expect.add(t, lambda);
    }
    return boundary_edges(values) == expect;
  }
  friend bool operator==(const Flow&, const Flow&) = default;
};

using Multiflow = std::vector<Flow>;
using CycleWeights = std::map<Path, Rational>;  // closed paths (v0,...,v0)
using PathWeights = std::map<Path, Rational>;

// Weighted sum of the arcs of each path (cycles or simple paths).
inline BoundaryVec arc_sum(const std::map<Path, Rational>& w) {
  BoundaryVec out;
  for (const auto& [p, x] : w)
    for (const auto& [u, v] : consecutive_pairs(p))
      if (u != v) out.add({u, v}, x);
  return out;
}

inline Multiflow canonical_multiflow(const WeightedPathSystem& s) {
  Multiflow F;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Path& p = s.paths()[i];
    Flow f;
    f.s = p.front();
    f.t = p.back();
    f.lambda = f.s == f.t ? Rational(0) : s.weights[i];
    for (const auto& [u, v] : consecutive_pairs(p))
      if (u != v) f.values.add({u, v}, s.weights[i]);
    F.push_back(std::move(f));
  }
  return F;
}

namespace detail {

// Finds a directed cycle in the support, returned as (v0,...,v0) rotated so
// its smallest node comes first.
inline std::optional<Path> find_support_cycle(const BoundaryVec& f) {
  std::map<NodeId, std::vector<NodeId>> out;
  for (const auto& [e, x] : f) out[e.first].push_back(e.second);
  std::map<NodeId, int> state;
  std::map<NodeId, std::size_t> pos;
  for (const auto& [root, unused] : out) {
    if (state[root]) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    std::vector<NodeId> trail{root};
    state[root] = 1;
    pos[root] = 0;
    while (!stack.empty()) {
      auto& [u, k] = stack.back();
      auto it = out.find(u);
      if (it == out.end() || k >= it->second.size()) {
        state[u] = 2;
        stack.pop_back();
        trail.pop_back();
        continue;
      }
      NodeId v = it->second[k++];
      if (state[v] == 1) {
        Path c(trail.begin() + static_cast<std::ptrdiff_t>(pos[v]), trail.end());
        auto m = std::min_element(c.begin(), c.end());
        std::rotate(c.begin(), m, c.end());
        c.push_back(c.front());
        return c;
      }
      if (state[v] == 0) {
        state[v] = 1;
        pos[v] = trail.size();
        trail.push_back(v);
        stack.emplace_back(v, 0);
      }
    }
  }
  return std::nullopt;
}

inline Rational min_along(const BoundaryVec& f, const Path& p) {
  Rational m = f.at({p[0], p[1]});
  for (std::size_t i = 1; i + 1 < p.size(); ++i) m = std::min(m, f.at({p[i], p[i + 1]}));
  return m;
}

inline void subtract_along(BoundaryVec& f, const Path& p, const Rational& x) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i) f.add({p[i], p[i + 1]}, -x);
}

}  // namespace detail

struct AcyclicSplit {
  Flow acyclic;
  CycleWeights cycles;
};

// f = f' + arcs(cycles) with f' acyclic.
inline AcyclicSplit acyclic_decompose(const Flow& f) {
  for (const auto& [e, x] : f.values)
    if (x < 0) throw std::invalid_argument("flow has a negative entry");
  AcyclicSplit out{f, {}};
  while (auto c = detail::find_support_cycle(out.acyclic.values)) {
    Rational m = detail::min_along(out.acyclic.values, *c);
    detail::subtract_along(out.acyclic.values, *c, m);
    detail::add_weight(out.cycles, *c, m);
  }
  return out;
}

// Decomposes a nonnegative circulation into simple cycles.
inline CycleWeights cycle_decompose(const BoundaryVec& f) {
  if (!boundary_edges(f).empty()) throw std::invalid_argument("cycle_decompose: nonzero boundary");
  Flow fl{f, 0, 0, Rational(0)};
  auto split = acyclic_decompose(fl);
  if (!split.acyclic.values.empty()) throw std::logic_error("acyclic circulation is not zero");
  return split.cycles;
}

struct PathSplit {
  CycleWeights cycles;
  PathWeights paths;  // simple s~>t paths, total weight lambda
};

// arcs(cycles) + arcs(paths) = f and the path weights sum to lambda.
inline PathSplit path_decompose(const Flow& f) {
  if (!f.well_formed()) throw std::invalid_argument("path_decompose: flow boundary does not match lambda");
  if (f.lambda < 0) throw std::invalid_argument("path_decompose: negative flow value");
  auto split = acyclic_decompose(f);
  PathSplit out{std::move(split.cycles), {}};
  BoundaryVec& rest = split.acyclic.values;
  std::map<NodeId, std::vector<NodeId>> unused;
  while (!rest.empty()) {
    if (f.s == f.t) throw std::logic_error("acyclic remainder of a circulation");
    Path p{f.s};
    while (p.back() != f.t) {
      auto it = rest.entries().lower_bound({p.back(), -1});
      if (it == rest.entries().end() || it->first.first != p.back())
        throw std::logic_error("path walk got stuck");
      p.push_back(it->first.second);
    }
    Rational m = detail::min_along(rest, p);
    detail::subtract_along(rest, p, m);
    detail::add_weight(out.paths, p, m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rigidity

struct RigidityOutcome {
  bool rigid = true;
  Multiflow witness;                // F' when non-rigid
  std::vector<Rational> direction;  // over `layout`
  Rational epsilon;
  std::vector<std::pair<std::size_t, Edge>> layout;  // (path index, edge) per coordinate
  bool from_kernel = false;
  std::size_t pivots = 0;
};

namespace detail {

inline std::vector<int> scc_ids(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> out(n), in(n);
  for (auto [u, v] : edges) {
    out[u].push_back(v);
    in[v].push_back(u);
  }
  std::vector<int> order;
  std::vector<bool> seen(n, false);
  for (int r = 0; r < n; ++r) {
    if (seen[r]) continue;
    std::vector<std::pair<int, std::size_t>> st{{r, 0}};
    seen[r] = true;
    while (!st.empty()) {
      auto& [u, k] = st.back();
      if (k < out[u].size()) {
        int v = out[u][k++];
        if (!seen[v]) {
          seen[v] = true;
          st.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        st.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  int c = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> st{*it};
    comp[*it] = c;
    while (!st.empty()) {
      int u = st.back();
      st.pop_back();
      for (int v : in[u])
        if (comp[v] < 0) {
          comp[v] = c;
          st.push_back(v);
        }
    }
    ++c;
  }
  return comp;
}

inline std::vector<bool> reach_from(int n, const std::vector<Edge>& edges, int s, bool backward) {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    if (backward) adj[v].push_back(u);
    else adj[u].push_back(v);
  }
  std::vector<bool> seen(n, false);
  std::vector<int> st{s};
  seen[s] = true;
  while (!st.empty()) {
    int u = st.back();
    st.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        st.push_back(v);
      }
  }
  return seen;
}

}  // namespace detail

// Checks the defining equalities of a rerouting against the canonical flow.
inline bool valid_rerouting(const Multiflow& F, const Multiflow& G) {
  if (F.size() != G.size()) return false;
  BoundaryVec sf, sg;
  for (std::size_t i = 0; i < F.size(); ++i) {
    for (const auto& [e, x] : G[i].values)
      if (x < 0) return false;
    if (boundary_edges(F[i].values) != boundary_edges(G[i].values)) return false;
    sf.add_scaled(F[i].values, 1);
    sg.add_scaled(G[i].values, 1);
  }
  return sf == sg;
}

// Decides whether the canonical multiflow is the only point of
// { per-path conservation, joint capacities, x >= 0 } by a kernel test on its
// support followed by a feasible-direction LP.
inline RigidityOutcome rigidity_test(const WeightedPathSystem& s) {
  if (s.size() < 2) throw std::invalid_argument("rigidity_test requires at least two paths");
  const int n = s.system.node_count();
  const Multiflow F = canonical_multiflow(s);

  std::set<Edge> eset;
  BoundaryVec capacity;
  for (const auto& f : F)
    for (const auto& [e, x] : f.values) {
      eset.insert(e);
      capacity.add(e, x);
    }
  const std::vector<Edge> E(eset.begin(), eset.end());
  const auto comp = detail::scc_ids(n, E);

  // Coordinates x^i_e; an edge can only carry commodity i if it lies on an
  // s_i~>t_i walk or inside a strongly connected component.
  RigidityOutcome out;
  std::vector<std::map<Edge, int>> col(s.size());
  std::vector<Rational> x0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto from_s = detail::reach_from(n, E, F[i].s, false);
    auto to_t = detail::reach_from(n, E, F[i].t, true);
    for (const auto& e : E) {
      bool usable = (from_s[e.first] && to_t[e.second]) || comp[e.first] == comp[e.second];
      if (!usable) continue;
      col[i][e] = static_cast<int>(out.layout.size());
      out.layout.emplace_back(i, e);
      x0.push_back(F[i].values.at(e));
    }
  }
  const int dim = static_cast<int>(out.layout.size());

  std::vector<SparseRow> rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::map<NodeId, SparseRow> by_node;
    for (const auto& [e, j] : col[i]) {
      by_node[e.first].emplace_back(j, Rational(-1));
      by_node[e.second].emplace_back(j, Rational(1));
    }
    for (auto& [v, r] : by_node) rows.push_back(std::move(r));
  }
  for (const auto& e : E) {
    SparseRow r;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto it = col[i].find(e);
      if (it != col[i].end()) r.emplace_back(it->second, Rational(1));
    }
    rows.push_back(std::move(r));
  }

  std::vector<int> support;
  std::vector<int> support_pos(dim, -1);
  for (int j = 0; j < dim; ++j)
    if (x0[j] != 0) {
      support_pos[j] = static_cast<int>(support.size());
      support.push_back(j);
    }

  std::vector<Rational> d;
  {
    std::vector<SparseRow> restricted;
    for (const auto& r : rows) {
      SparseRow rr;
      for (const auto& [j, c] : r)
        if (support_pos[j] >= 0) rr.emplace_back(support_pos[j], c);
      restricted.push_back(std::move(rr));
    }
    auto ker = kernel_basis(restricted, static_cast<int>(support.size()));
    if (!ker.empty()) {
      d.assign(dim, Rational(0));
      for (std::size_t k = 0; k < support.size(); ++k) d[support[k]] = ker.front()[k];
      out.from_kernel = true;
    }
  }
  if (d.empty()) {
    Rational B = 1;
    for (const auto& [e, c] : capacity) B += c;
    LinearProgram lp(dim);
    for (int j = 0; j < dim; ++j) {
      if (x0[j] != 0) lp.set_bounds(j, Rational(-B), B);
      else {
        lp.set_bounds(j, Rational(0), Rational(1));
        lp.objective.emplace_back(j, Rational(1));
      }
    }
    for (auto& r : rows) lp.add_row(r, Relation::Equal, Rational(0));
    auto res = solve(lp);
    out.pivots = res.pivots;
    if (!res.optimal()) throw std::logic_error("direction LP is bounded and feasible by construction");
    if (res.value == 0) return out;
    d = res.point;
  }

  Rational eps = 1;
  for (int j = 0; j < dim; ++j)
    if (d[j] < 0) {
      Rational q = x0[j] / -d[j];
      if (q < eps) eps = q;
    }
  out.rigid = false;
  out.direction = d;
  out.epsilon = eps;
  out.witness = F;
  for (auto& f : out.witness) f.values = BoundaryVec{};
  for (int j = 0; j < dim; ++j) {
    const auto& [i, e] = out.layout[j];
    out.witness[i].values.add(e, x0[j] + eps * d[j]);
  }
  if (!valid_rerouting(F, out.witness) || out.witness == F)
    throw std::logic_error("non-rigidity witness failed re-verification");
  return out;
}

inline RigidityOutcome rigidity_test(const PathSystem& s) { return rigidity_test(WeightedPathSystem::unit(s)); }

struct CertificateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Boundary-sharing normalized system built from the rerouted multiflow.
inline WeightedPathSystem certificate(const WeightedPathSystem& s, const RigidityOutcome& o,
                                      NormalizeStats* stats = nullptr) {
  if (o.rigid) throw std::invalid_argument("certificate requires a non-rigid outcome");
  if (o.witness.size() != s.size()) throw std::invalid_argument("outcome does not belong to this system");
  std::map<Path, Rational> raw;
  for (const auto& f : o.witness) {
    if (f.s == f.t) {
      for (const auto& [c, x] : cycle_decompose(f.values)) detail::add_weight(raw, c, x);
      continue;
    }
    auto split = path_decompose(f);
    for (const auto& [c, x] : split.cycles) detail::add_weight(raw, c, x);
    for (const auto& [p, x] : split.paths) detail::add_weight(raw, p, x);
  }
  auto S2 = normalize(WeightedPathSystem::from_map(s.names(), raw), stats);
  if (boundary_system(S2) != boundary_system(s)) throw CertificateError("certificate boundary differs");
  if (S2.system.paths == s.system.paths) throw CertificateError("certificate equals the input system");
  auto fl = classify(S2.system);
  if (!fl.semisimple || !fl.nontrivial || !fl.skip_free) throw CertificateError("certificate is not normalized");
  return S2;
}

inline WeightedPathSystem certificate(const PathSystem& s, const RigidityOutcome& o) {
  return certificate(WeightedPathSystem::unit(s), o);
}

}  // namespace usp

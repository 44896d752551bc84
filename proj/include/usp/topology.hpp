#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "usp/core.hpp"

namespace usp {

// Where a path leaves or enters a node: a consecutive pair (v,w) or, when the
// node is an endpoint, the closure to the opposite endpoint.
struct Slot {
  bool end = false;
  NodeId node = -1;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

// One visit of a path to a node. A cycle's first and last entries are the
// same corner.
struct Corner {
  std::size_t path = 0;
  std::size_t pos = 0;
  Slot out, in;
  friend auto operator<=>(const Corner&, const Corner&) = default;
};

inline std::vector<Corner> corners_at(const PathSystem& s, NodeId v) {
  std::vector<Corner> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Path& p = s.paths[i];
    const std::size_t k = p.size();
    const bool cyc = is_cycle(p);
    for (std::size_t j = 0; j < k; ++j) {
      if (p[j] != v || (cyc && j == k - 1)) continue;
      Corner c{i, j, {}, {}};
      if (cyc) {
        c.out = {false, p[j + 1]};
        c.in = {false, j == 0 ? p[k - 2] : p[j - 1]};
      } else {
        c.out = j + 1 < k ? Slot{false, p[j + 1]} : Slot{true, p[0]};
        c.in = j > 0 ? Slot{false, p[j - 1]} : Slot{true, p[k - 1]};
      }
      out.push_back(c);
    }
  }
  return out;
}

// colorful[i] and gray[i] share the out-slot towards out_nodes[i]; gray[i]
// and colorful[i+1] share the in-slot from in_nodes[i].
struct Pinwheel {
  NodeId center = -1;
  std::vector<Corner> colorful, gray;
  std::vector<NodeId> out_nodes, in_nodes;
  std::size_t size() const { return colorful.size(); }
};

namespace detail {

inline void require_same_table(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a != b) throw std::invalid_argument("systems must share a node table");
}

inline bool through(const Path& p, NodeId v) { return std::find(p.begin(), p.end(), v) != p.end(); }

constexpr std::size_t kPinwheelStepCap = 2000000;

// Depth-first search for a pinwheel through the current colorful corner,
// respecting the available multiplicities. Choices are tried in corner order,
// so the first branch explored is the greedy one.
struct PinwheelSearch {
  const std::vector<Corner>& C;
  const std::vector<Corner>& G;
  std::vector<bool> c_ok, g_ok;
  NodeId v;
  std::vector<bool> c_used, g_used;
  std::set<NodeId> us, ws;
  std::vector<std::size_t> cs, gs;
  std::vector<NodeId> wn, un;
  std::size_t steps = 0;

  PinwheelSearch(const std::vector<Corner>& c, const std::vector<Corner>& g, std::vector<bool> cok,
                 std::vector<bool> gok, NodeId center)
      : C(c), G(g), c_ok(std::move(cok)), g_ok(std::move(gok)), v(center), c_used(c.size(), false),
        g_used(g.size(), false) {}

  bool dfs(std::size_t c) {
    if (++steps > kPinwheelStepCap) throw std::logic_error("pinwheel search exceeded its step budget");
    const Slot out = C[c].out;
    if (out.node == v || ws.count(out.node)) return false;
    for (std::size_t g = 0; g < G.size(); ++g) {
      if (g_used[g] || !g_ok[g] || G[g].out != out) continue;
      const Slot in = G[g].in;
      if (in.node == v || us.count(in.node)) continue;
      g_used[g] = true;
      gs.push_back(g);
      ws.insert(out.node);
      us.insert(in.node);
      wn.push_back(out.node);
      un.push_back(in.node);
      for (std::size_t c2 = 0; c2 < C.size(); ++c2) {
        if (!c_ok[c2] || C[c2].in != in) continue;
        if (c2 == cs.front()) return true;
        if (c_used[c2]) continue;
        c_used[c2] = true;
        cs.push_back(c2);
        if (dfs(c2)) return true;
        c_used[c2] = false;
        cs.pop_back();
      }
      g_used[g] = false;
      gs.pop_back();
      ws.erase(out.node);
      us.erase(in.node);
      wn.pop_back();
      un.pop_back();
    }
    return false;
  }

  std::optional<Pinwheel> run() {
    for (std::size_t c0 = 0; c0 < C.size(); ++c0) {
      if (!c_ok[c0]) continue;
      cs = {c0};
      gs.clear();
      wn.clear();
      un.clear();
      us.clear();
      ws.clear();
      std::fill(c_used.begin(), c_used.end(), false);
      std::fill(g_used.begin(), g_used.end(), false);
      c_used[c0] = true;
      if (dfs(c0)) {
        Pinwheel p;
        p.center = v;
        for (auto i : cs) p.colorful.push_back(C[i]);
        for (auto i : gs) p.gray.push_back(G[i]);
        p.out_nodes = wn;
        p.in_nodes = un;
        return p;
      }
    }
    return std::nullopt;
  }
};

}  // namespace detail

inline bool cancel_at(const WeightedPathSystem& s1, const WeightedPathSystem& s2, NodeId v) {
  detail::require_same_table(s1.names(), s2.names());
  auto touching = [v](const BoundaryVec& b) {
    std::vector<std::pair<Edge, Rational>> out;
    for (const auto& [e, x] : b)
      if ((e.first == v) != (e.second == v)) out.emplace_back(e, x);
    return out;
  };
  return touching(boundary_system(s1)) == touching(boundary_system(s2));
}

inline bool cancel_at(const PathSystem& s1, const PathSystem& s2, NodeId v) {
  return cancel_at(WeightedPathSystem::unit(s1), WeightedPathSystem::unit(s2), v);
}

inline bool valid_pinwheel(const Pinwheel& p, Setting setting = Setting::Directed) {
  const std::size_t k = p.colorful.size();
  if (k == 0 || p.gray.size() != k || p.out_nodes.size() != k || p.in_nodes.size() != k) return false;
  std::set<NodeId> us(p.in_nodes.begin(), p.in_nodes.end()), ws(p.out_nodes.begin(), p.out_nodes.end());
  if (us.size() != k || ws.size() != k || us.count(p.center) || ws.count(p.center)) return false;
  auto has = [](const Corner& c, NodeId x) { return c.out.node == x || c.in.node == x; };
  for (std::size_t i = 0; i < k; ++i) {
    const Corner& c = p.colorful[i];
    const Corner& g = p.gray[i];
    const Corner& c_next = p.colorful[(i + 1) % k];
    if (setting == Setting::Undirected) {
      if (!has(c, p.out_nodes[i]) || !has(g, p.out_nodes[i])) return false;
      if (!has(c_next, p.in_nodes[i]) || !has(g, p.in_nodes[i])) return false;
    } else {
      if (c.out != g.out || c.out.node != p.out_nodes[i]) return false;
      if (g.in != c_next.in || g.in.node != p.in_nodes[i]) return false;
    }
  }
  if (setting == Setting::Undirected)
    for (NodeId u : us)
      if (ws.count(u)) return false;
  return true;
}

// Pinwheel centered at v, found by following shared out-slots from colorful
// to gray and shared in-slots from gray back to colorful.
inline std::optional<Pinwheel> find_pinwheel(const PathSystem& s1, const PathSystem& s2, NodeId v) {
  detail::require_same_table(s1.names, s2.names);
  auto f1 = classify(s1), f2 = classify(s2);
  if (!f1.nontrivial || !f2.nontrivial || !f1.skip_free || !f2.skip_free)
    throw std::invalid_argument("find_pinwheel requires nontrivial skip-free systems");
  if (!cancel_at(s1, s2, v)) throw std::invalid_argument("systems do not cancel at the center");
  auto C = corners_at(s1, v), G = corners_at(s2, v);
  detail::PinwheelSearch search(C, G, std::vector<bool>(C.size(), true), std::vector<bool>(G.size(), true), v);
  auto p = search.run();
  if (!p) return p;
  if (!valid_pinwheel(*p)) throw std::logic_error("pinwheel search returned an invalid pinwheel");
  if (f1.semisimple && f2.semisimple) {
    std::vector<Path> a, b;
    for (const auto& c : p->colorful) a.push_back(s1.paths[c.path]);
    for (const auto& c : p->gray) b.push_back(s2.paths[c.path]);
    if (!cancel_at(PathSystem::over(s1.names, a), PathSystem::over(s2.names, b), v))
      throw std::logic_error("pinwheel does not cancel at its center");
  }
  return p;
}

// Each path through v appears in exactly beta * weight pinwheels.
inline std::vector<Pinwheel> pinwheel_decomposition(const WeightedPathSystem& s1, const WeightedPathSystem& s2,
                                                    NodeId v) {
  detail::require_same_table(s1.names(), s2.names());
  for (const auto* s : {&s1, &s2}) {
    auto f = classify(s->system);
    if (!f.nontrivial || !f.semisimple || !f.skip_free)
      throw std::invalid_argument("pinwheel_decomposition requires nontrivial semisimple skip-free systems");
  }
  if (!cancel_at(s1, s2, v)) throw std::invalid_argument("systems do not cancel at the center");
  BigInt beta = 1;
  for (const auto& x : s1.weights) lcm_accumulate(beta, x);
  for (const auto& x : s2.weights) lcm_accumulate(beta, x);
  auto C = corners_at(s1.system, v), G = corners_at(s2.system, v);
  auto residual = [&](const WeightedPathSystem& s, const std::vector<Corner>& X) {
    std::vector<BigInt> r;
    for (const auto& c : X) {
      Rational scaled = s.weights[c.path] * Rational(beta);
      r.push_back(scaled.get_num());
    }
    return r;
  };
  auto rc = residual(s1, C), rg = residual(s2, G);
  std::vector<Pinwheel> out;
  for (;;) {
    std::vector<bool> cok(C.size()), gok(G.size());
    bool any = false;
    for (std::size_t i = 0; i < C.size(); ++i) any |= (cok[i] = rc[i] > 0);
    for (std::size_t i = 0; i < G.size(); ++i) gok[i] = rg[i] > 0;
    if (!any) break;
    detail::PinwheelSearch search(C, G, cok, gok, v);
    auto p = search.run();
    if (!p || !valid_pinwheel(*p)) throw std::logic_error("no pinwheel in a canceling residual");
    for (const auto& c : p->colorful)
      for (std::size_t i = 0; i < C.size(); ++i)
        if (C[i] == c) rc[i] -= 1;
    for (const auto& g : p->gray)
      for (std::size_t i = 0; i < G.size(); ++i)
        if (G[i] == g) rg[i] -= 1;
    out.push_back(std::move(*p));
    if (out.size() > 1000000) throw std::logic_error("pinwheel decomposition is too large");
  }
  for (const auto& r : rg)
    if (r != 0) throw std::logic_error("gray paths left over after pinwheel decomposition");
  return out;
}

// All paths of both systems through v form one pinwheel. Directed: out-slots
// and in-slots match exactly; undirected: only the neighbor nodes matter and
// in-nodes and out-nodes must be disjoint.
inline bool is_flat(const PathSystem& t1, const PathSystem& t2, NodeId v, Setting setting = Setting::Directed) {
  detail::require_same_table(t1.names, t2.names);
  for (const auto* t : {&t1, &t2})
    for (const auto& p : t->paths)
      if (detail::through(p, v) && !is_semisimple_path(p)) return false;
  auto C = corners_at(t1, v), G = corners_at(t2, v);
  const std::size_t k = C.size();
  if (k == 0 || G.size() != k) return false;

  if (setting != Setting::Undirected) {
    std::map<Slot, std::size_t> g_by_out, c_by_in;
    auto distinct = [&](const std::vector<Corner>& X) {
      std::set<NodeId> o, i;
      for (const auto& c : X)
        if (c.out.node == v || c.in.node == v || !o.insert(c.out.node).second || !i.insert(c.in.node).second)
          return false;
      return true;
    };
    if (!distinct(C) || !distinct(G)) return false;
    for (std::size_t j = 0; j < k; ++j) g_by_out[G[j].out] = j;
    for (std::size_t j = 0; j < k; ++j) c_by_in[C[j].in] = j;
    std::size_t cur = 0, steps = 0;
    std::vector<bool> seen(k, false);
    do {
      seen[cur] = true;
      auto git = g_by_out.find(C[cur].out);
      if (git == g_by_out.end()) return false;
      auto cit = c_by_in.find(G[git->second].in);
      if (cit == c_by_in.end()) return false;
      cur = cit->second;
      ++steps;
    } while (cur != 0 && !seen[cur]);
    return cur == 0 && steps == k;
  }

  std::map<NodeId, std::size_t> c_of, g_of;
  auto index = [&](const std::vector<Corner>& X, std::map<NodeId, std::size_t>& at) {
    for (std::size_t j = 0; j < X.size(); ++j) {
      NodeId a = X[j].out.node, b = X[j].in.node;
      if (a == b || a == v || b == v) return false;
      if (!at.emplace(a, j).second || !at.emplace(b, j).second) return false;
    }
    return true;
  };
  if (!index(C, c_of) || !index(G, g_of)) return false;
  for (const auto& [x, j] : c_of)
    if (!g_of.count(x)) return false;
  auto other = [](const Corner& c, NodeId x) { return c.out.node == x ? c.in.node : c.out.node; };
  std::size_t cur = 0, steps = 0;
  NodeId x = C[0].out.node;
  do {
    std::size_t g = g_of.at(x);
    NodeId y = other(G[g], x);
    cur = c_of.at(y);
    x = other(C[cur], y);
    ++steps;
  } while (cur != 0 && steps <= k);
  return cur == 0 && steps == k;
}

struct PolyhedralCheck {
  bool ok = false;
  std::string reason;
  std::optional<std::string> node;  // first node that is not flat
};

inline PolyhedralCheck check_polyhedral_pair(const PathSystem& a, const PathSystem& b,
                                             Setting setting = Setting::Directed) {
  auto [t1, t2] = align(a, b);
  PolyhedralCheck r;
  if (t1.paths == t2.paths) {
    r.reason = "the two systems are equal";
    return r;
  }
  for (const auto* t : {&t1, &t2}) {
    auto f = classify(*t);
    const char* which = t == &t1 ? "first" : "second";
    if (!f.nontrivial || !f.semisimple || !f.skip_free) {
      r.reason = std::string(which) + " system is not nontrivial, semisimple and skip-free";
      return r;
    }
  }
  std::set<NodeId> nodes;
  for (const auto* t : {&t1, &t2})
    for (NodeId v : t->used_nodes()) nodes.insert(v);
  for (NodeId v : nodes)
    if (!is_flat(t1, t2, v, setting)) {
      r.reason = "not flat at " + t1.names[v];
      r.node = t1.names[v];
      return r;
    }
  r.ok = true;
  return r;
}

inline bool is_polyhedral_pair(const PathSystem& a, const PathSystem& b, Setting setting = Setting::Directed) {
  return check_polyhedral_pair(a, b, setting).ok;
}

// ---------------------------------------------------------------------------
// Gray partner search

struct GrayPartnerStats {
  std::size_t candidates = 0;
  std::size_t nodes = 0;
  bool exhausted = true;  // false when the step budget stopped the search
};

namespace detail {

// Exact cover item: kind 0 is an endpoint pair (directed only), kind 1 an arc
// or an undirected cell edge.
using CoverItem = std::pair<int, Edge>;

inline Edge undirected_key(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline std::map<CoverItem, int> cover_items(const Path& p, Setting setting) {
  std::map<CoverItem, int> out;
  const bool cyc = is_cycle(p);
  for (const auto& [u, v] : consecutive_pairs(p)) {
    if (u == v) continue;
    if (setting == Setting::Undirected) ++out[{1, undirected_key(u, v)}];
    else ++out[{1, {u, v}}];
  }
  if (!cyc) {
    if (setting == Setting::Undirected) ++out[{1, undirected_key(p.back(), p.front())}];
    else ++out[{0, {p.front(), p.back()}}];
  }
  return out;
}

}  // namespace detail

// Bounded exact-cover search for a gray T' with T, T' polyhedral. Items are
// the arcs and endpoint pairs of T (cell edges when undirected); candidates
// are simple paths and simple cycles with at most `max_len` entries built
// from those items. Returns the first cover, in canonical order, that passes
// the polyhedral check.
inline std::optional<PathSystem> find_gray_partner(const PathSystem& t, std::size_t max_len = 6,
                                                   Setting setting = Setting::Directed,
                                                   GrayPartnerStats* stats = nullptr,
                                                   std::size_t step_cap = 2000000) {
  auto f = classify(t);
  if (!f.nontrivial || !f.semisimple || !f.skip_free)
    throw std::invalid_argument("find_gray_partner requires a nontrivial semisimple skip-free system");
  GrayPartnerStats local;
  GrayPartnerStats& st = stats ? *stats : local;
  const bool und = setting == Setting::Undirected;
  const int n = t.node_count();

  std::map<detail::CoverItem, int> need;
  for (const auto& p : t.paths)
    for (const auto& [item, c] : detail::cover_items(p, setting)) need[item] += c;
  std::vector<std::set<NodeId>> adj(n);
  for (const auto& [item, c] : need) {
    if (item.first != 1) continue;
    adj[item.second.first].insert(item.second.second);
    if (und) adj[item.second.second].insert(item.second.first);
  }
  auto has_edge = [&](NodeId a, NodeId b) {
    return need.count({1, und ? detail::undirected_key(a, b) : Edge{a, b}}) != 0;
  };

  std::set<Path> cand_set;
  Path cur;
  std::vector<bool> on(n, false);
  // Simple paths from cur.back(); an accepted path must close through an
  // endpoint item (directed) or a cell edge (undirected).
  auto extend = [&](auto&& self) -> void {
    NodeId x = cur.back();
    if (cur.size() >= 3) {
      NodeId s = cur.front();
      if (und ? has_edge(x, s) : need.count({0, {s, x}}) != 0) cand_set.insert(cur);
    }
    if (cur.size() >= max_len) return;
    for (NodeId y : adj[x]) {
      if (on[y]) continue;
      on[y] = true;
      cur.push_back(y);
      self(self);
      cur.pop_back();
      on[y] = false;
    }
  };
  // Cycles rooted at their least node, so each rotation class appears once
  // per orientation.
  auto cycles = [&](auto&& self, NodeId root) -> void {
    NodeId x = cur.back();
    if (cur.size() >= 2 && cur.size() + 1 <= max_len && adj[x].count(root)) {
      Path c = cur;
      c.push_back(root);
      cand_set.insert(c);
    }
    if (cur.size() + 1 >= max_len) return;
    for (NodeId y : adj[x]) {
      if (y <= root || on[y]) continue;
      on[y] = true;
      cur.push_back(y);
      self(self, root);
      cur.pop_back();
      on[y] = false;
    }
  };
  for (NodeId s = 0; s < n; ++s) {
    if (adj[s].empty()) continue;
    cur = {s};
    on[s] = true;
    extend(extend);
    cycles(cycles, s);
    on[s] = false;
  }

  std::vector<Path> cands(cand_set.begin(), cand_set.end());
  std::vector<std::map<detail::CoverItem, int>> covers;
  std::map<detail::CoverItem, std::vector<std::size_t>> by_item;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    auto c = detail::cover_items(cands[i], setting);
    bool fits = true;
    for (const auto& [item, k] : c) {
      auto it = need.find(item);
      if (it == need.end() || it->second < k) fits = false;
    }
    covers.push_back(fits ? c : std::map<detail::CoverItem, int>{});
    if (!fits) continue;
    for (const auto& [item, k] : c) by_item[item].push_back(i);
  }
  st.candidates = cands.size();

  std::map<detail::CoverItem, int> left = need;
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(cands.size(), false);
  std::optional<PathSystem> found;
  auto search = [&](auto&& self) -> bool {
    if (++st.nodes > step_cap) {
      st.exhausted = false;
      return true;
    }
    auto it = std::find_if(left.begin(), left.end(), [](const auto& e) { return e.second > 0; });
    if (it == left.end()) {
      std::vector<Path> paths;
      for (auto i : chosen) paths.push_back(cands[i]);
      auto tp = PathSystem::over(t.names, std::move(paths));
      if (tp.paths != t.paths && is_polyhedral_pair(t, tp, setting)) {
        found = std::move(tp);
        return true;
      }
      return false;
    }
    for (auto i : by_item[it->first]) {
      if (taken[i]) continue;
      bool fits = true;
      for (const auto& [item, k] : covers[i])
        if (left[item] < k) fits = false;
      if (!fits) continue;
      for (const auto& [item, k] : covers[i]) left[item] -= k;
      taken[i] = true;
      chosen.push_back(i);
      if (self(self)) return true;
      chosen.pop_back();
      taken[i] = false;
      for (const auto& [item, k] : covers[i]) left[item] += k;
    }
    return false;
  };
  search(search);
  return found;
}

// ---------------------------------------------------------------------------
// Cell complex

struct ArcRef {
  std::size_t cell = 0;
  std::size_t index = 0;
  friend auto operator<=>(const ArcRef&, const ArcRef&) = default;
};

// Boundary points in clockwise order; arc i runs from boundary[i] to
// boundary[i+1] (cyclically). A simple path's closing arc (last, first) is
// marked.
struct Cell {
  bool gray = false;
  std::size_t path = 0;
  std::vector<NodeId> boundary;
  std::vector<bool> marked;
  std::size_t arc_count() const { return boundary.size(); }
  Edge arc(std::size_t i) const { return {boundary[i], boundary[(i + 1) % boundary.size()]}; }
};

struct CellComplex {
  std::vector<std::string> names;
  std::vector<Cell> cells;
  std::vector<std::pair<ArcRef, ArcRef>> gluing;  // colorful occurrence first
  Setting setting = Setting::Directed;
  Edge arc(const ArcRef& r) const { return cells.at(r.cell).arc(r.index); }
};

// One cell per path (colorful first), arcs glued colorful-to-gray by label in
// order of appearance.
inline CellComplex build_complex(const PathSystem& a, const PathSystem& b, Setting setting = Setting::Directed) {
  auto [t1, t2] = align(a, b);
  CellComplex cx;
  cx.names = t1.names;
  cx.setting = setting;
  const bool und = setting == Setting::Undirected;
  std::map<Edge, std::vector<ArcRef>> color_arcs, gray_arcs;
  for (int side = 0; side < 2; ++side) {
    const PathSystem& t = side == 0 ? t1 : t2;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Path& p = t.paths[i];
      Cell c;
      c.gray = side == 1;
      c.path = i;
      const bool cyc = is_cycle(p);
      c.boundary.assign(p.begin(), cyc ? p.end() - 1 : p.end());
      c.marked.assign(c.boundary.size(), false);
      if (!cyc) c.marked.back() = true;
      const std::size_t id = cx.cells.size();
      for (std::size_t j = 0; j < c.arc_count(); ++j) {
        Edge e = c.arc(j);
        if (e.first == e.second) continue;
        if (und) e = detail::undirected_key(e.first, e.second);
        (side == 0 ? color_arcs : gray_arcs)[e].push_back({id, j});
      }
      cx.cells.push_back(std::move(c));
    }
  }
  std::set<Edge> keys;
  for (const auto& [e, v] : color_arcs) keys.insert(e);
  for (const auto& [e, v] : gray_arcs) keys.insert(e);
  for (const auto& e : keys) {
    const auto& ca = color_arcs[e];
    const auto& ga = gray_arcs[e];
    if (ca.size() != ga.size())
      throw std::invalid_argument("arc multiplicity mismatch on (" + cx.names[e.first] + "," + cx.names[e.second] +
                                  "): " + std::to_string(ca.size()) + " colorful vs " +
                                  std::to_string(ga.size()) + " gray");
    for (std::size_t k = 0; k < ca.size(); ++k) cx.gluing.emplace_back(ca[k], ga[k]);
  }
  return cx;
}

struct ManifoldReport {
  bool is_manifold = false;
  bool boundaryless = false;
  bool orientable = false;
  std::size_t components = 0;
  std::size_t V = 0, E = 0, F = 0;
  long euler_characteristic = 0;
  Rational genus;  // orientable: sum of (2 - chi_c)/2; otherwise sum of 2 - chi_c
  std::vector<Rational> component_genus;
  bool locally_balanced = false;
  bool globally_balanced = false;
  std::size_t colorful_cells = 0, gray_cells = 0;
  std::size_t glued_pairs = 0;
  std::vector<NodeId> offending_vertices;
  std::vector<NodeId> degenerate_vertices;  // on exactly two cells
  std::vector<std::string> problems;
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  std::size_t find(std::size_t x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

}  // namespace detail

inline ManifoldReport manifold_report(const CellComplex& cx) {
  ManifoldReport r;
  const std::size_t F = cx.cells.size();
  r.F = F;
  for (const auto& c : cx.cells) ++(c.gray ? r.gray_cells : r.colorful_cells);
  r.globally_balanced = r.gray_cells == r.colorful_cells;
  r.glued_pairs = cx.gluing.size();

  auto name_arc = [&](const ArcRef& a) {
    Edge e = cx.arc(a);
    return "(" + cx.names[e.first] + "," + cx.names[e.second] + ")";
  };
  std::map<ArcRef, std::vector<ArcRef>> partners;
  for (const auto& [a, b] : cx.gluing) {
    partners[a].push_back(b);
    partners[b].push_back(a);
  }
  std::size_t unglued = 0;
  bool glue_ok = true;
  for (std::size_t i = 0; i < F; ++i)
    for (std::size_t j = 0; j < cx.cells[i].arc_count(); ++j) {
      ArcRef a{i, j};
      auto it = partners.find(a);
      std::size_t k = it == partners.end() ? 0 : it->second.size();
      if (k == 0) {
        ++unglued;
        glue_ok = false;
        r.problems.push_back("arc " + name_arc(a) + " of cell " + std::to_string(i) + " is not glued");
      } else if (k > 1) {
        glue_ok = false;
        r.problems.push_back("arc " + name_arc(a) + " of cell " + std::to_string(i) + " is glued " +
                             std::to_string(k) + " times");
      }
    }
  r.boundaryless = unglued == 0;

  // Vertex links: corners at x are joined when their arcs through x are glued.
  std::set<NodeId> vertices;
  for (const auto& c : cx.cells) vertices.insert(c.boundary.begin(), c.boundary.end());
  r.V = vertices.size();
  std::map<NodeId, std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>>>
      link;
  std::set<NodeId> offending;
  for (const auto& c_i : vertices) (void)link[c_i];
  for (std::size_t i = 0; i < F; ++i)
    for (std::size_t j = 0; j < cx.cells[i].boundary.size(); ++j) (void)link[cx.cells[i].boundary[j]][{i, j}];
  auto corner_of = [&](const ArcRef& a, NodeId x) -> std::optional<std::pair<std::size_t, std::size_t>> {
    const Cell& c = cx.cells[a.cell];
    if (c.boundary[a.index] == x) return std::make_pair(a.cell, a.index);
    std::size_t h = (a.index + 1) % c.boundary.size();
    if (c.boundary[h] == x) return std::make_pair(a.cell, h);
    return std::nullopt;
  };
  bool labels_ok = true;
  for (const auto& [a, b] : cx.gluing) {
    Edge ea = cx.arc(a), eb = cx.arc(b);
    bool same = ea == eb || (cx.setting == Setting::Undirected && ea == Edge{eb.second, eb.first});
    if (!same) {
      labels_ok = false;
      r.problems.push_back("arc " + name_arc(a) + " glued to differently labeled arc " + name_arc(b));
    }
    for (NodeId x : {ea.first, ea.second}) {
      auto ca = corner_of(a, x), cb = corner_of(b, x);
      if (!ca || !cb) {
        offending.insert(x);
        continue;
      }
      link[x][*ca].push_back(*cb);
      link[x][*cb].push_back(*ca);
    }
    for (NodeId x : {eb.first, eb.second})
      if (!corner_of(a, x)) offending.insert(x);
  }
  bool links_ok = true;
  for (const auto& [x, g] : link) {
    bool ok = !g.empty();
    for (const auto& [corner, nb] : g)
      if (nb.size() != 2) ok = false;
    if (ok) {
      std::set<std::pair<std::size_t, std::size_t>> seen{g.begin()->first};
      std::vector<std::pair<std::size_t, std::size_t>> st{g.begin()->first};
      while (!st.empty()) {
        auto c = st.back();
        st.pop_back();
        for (const auto& d : g.at(c))
          if (seen.insert(d).second) st.push_back(d);
      }
      ok = seen.size() == g.size();
    }
    if (!ok) offending.insert(x);
    if (g.size() == 2) r.degenerate_vertices.push_back(x);
  }
  for (NodeId x : offending) {
    links_ok = false;
    r.offending_vertices.push_back(x);
    r.problems.push_back("vertex " + cx.names[x] + " does not have a single closed link");
  }
  r.is_manifold = glue_ok && labels_ok && links_ok && F > 0;

  // Glued arcs traversed the same way force opposite orientations.
  std::vector<int> sign(F, 0);
  std::vector<std::vector<std::pair<std::size_t, int>>> adj(F);
  for (const auto& [a, b] : cx.gluing) {
    int rel = cx.arc(a) == cx.arc(b) ? -1 : 1;
    adj[a.cell].emplace_back(b.cell, rel);
    adj[b.cell].emplace_back(a.cell, rel);
  }
  r.orientable = true;
  for (std::size_t s = 0; s < F; ++s) {
    if (sign[s]) continue;
    sign[s] = cx.cells[s].gray ? -1 : 1;
    std::vector<std::size_t> st{s};
    while (!st.empty()) {
      auto c = st.back();
      st.pop_back();
      for (auto [d, rel] : adj[c]) {
        int want = sign[c] * rel;
        if (!sign[d]) {
          sign[d] = want;
          st.push_back(d);
        } else if (sign[d] != want) {
          r.orientable = false;
        }
      }
    }
  }

  detail::UnionFind uf(F);
  for (const auto& [a, b] : cx.gluing) uf.unite(a.cell, b.cell);
  std::map<NodeId, std::size_t> first_cell;
  for (std::size_t i = 0; i < F; ++i)
    for (NodeId x : cx.cells[i].boundary) {
      auto [it, inserted] = first_cell.emplace(x, i);
      if (!inserted) uf.unite(it->second, i);
    }
  std::map<std::size_t, std::size_t> comp_index;
  for (std::size_t i = 0; i < F; ++i) comp_index.emplace(uf.find(i), comp_index.size());
  r.components = comp_index.size();
  const std::size_t K = r.components;
  std::vector<long> cv(K, 0), ce(K, 0), cf(K, 0);
  for (std::size_t i = 0; i < F; ++i) ++cf[comp_index[uf.find(i)]];
  for (const auto& [x, i] : first_cell) ++cv[comp_index[uf.find(i)]];
  for (const auto& [a, b] : cx.gluing) ++ce[comp_index[uf.find(a.cell)]];
  for (std::size_t i = 0; i < F; ++i)
    for (std::size_t j = 0; j < cx.cells[i].arc_count(); ++j)
      if (!partners.count({i, j})) ++ce[comp_index[uf.find(i)]];
  r.E = cx.gluing.size() + unglued;
  r.euler_characteristic = static_cast<long>(r.V) - static_cast<long>(r.E) + static_cast<long>(r.F);
  r.genus = 0;
  for (std::size_t k = 0; k < K; ++k) {
    long chi = cv[k] - ce[k] + cf[k];
    Rational g = r.orientable ? Rational(2 - chi, 2) : Rational(2 - chi);
    g.canonicalize();
    r.component_genus.push_back(g);
    r.genus += g;
  }

  r.locally_balanced = true;
  for (std::size_t i = 0; i < F; ++i) {
    std::size_t marks = 0;
    for (std::size_t j = 0; j < cx.cells[i].arc_count(); ++j) {
      bool m = cx.cells[i].marked[j];
      auto it = partners.find({i, j});
      if (it != partners.end())
        for (const auto& q : it->second) m = m || cx.cells[q.cell].marked[q.index];
      marks += m;
    }
    if (marks > 1) r.locally_balanced = false;
  }
  return r;
}

// OFF export: vertices on a Fibonacci sphere, one face per cell with an RGB
// color (gray cells gray).
inline std::string to_off(const CellComplex& cx) {
  std::set<NodeId> used;
  for (const auto& c : cx.cells) used.insert(c.boundary.begin(), c.boundary.end());
  std::map<NodeId, std::size_t> index;
  for (NodeId v : used) index.emplace(v, index.size());
  static const double palette[][3] = {{0.933, 0.400, 0.467}, {0.800, 0.733, 0.267}, {0.133, 0.533, 0.200},
                                      {0.267, 0.467, 0.667}, {0.400, 0.800, 0.933}, {0.667, 0.200, 0.467}};
  std::string out = "OFF\n# vertices:";
  for (NodeId v : used) out += " " + cx.names[v];
  out += "\n";
  for (std::size_t f = 0; f < cx.cells.size(); ++f) {
    const Cell& c = cx.cells[f];
    out += "# face " + std::to_string(f) + (c.gray ? " gray (" : " colorful (");
    for (std::size_t j = 0; j < c.boundary.size(); ++j) out += (j ? "," : "") + cx.names[c.boundary[j]];
    out += ")\n";
  }
  out += std::to_string(used.size()) + " " + std::to_string(cx.cells.size()) + " 0\n";
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double n = static_cast<double>(used.size());
  char buf[128];
  for (std::size_t i = 0; i < used.size(); ++i) {
    double y = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / n;
    double rad = std::sqrt(std::max(0.0, 1.0 - y * y));
    double th = golden * static_cast<double>(i);
    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f\n", rad * std::cos(th), y, rad * std::sin(th));
    out += buf;
  }
  std::size_t colorful = 0;
  for (const auto& c : cx.cells) {
    out += std::to_string(c.boundary.size());
    for (NodeId v : c.boundary) out += " " + std::to_string(index.at(v));
    const double* rgb = c.gray ? nullptr : palette[colorful++ % 6];
    if (rgb) std::snprintf(buf, sizeof buf, " %.3f %.3f %.3f\n", rgb[0], rgb[1], rgb[2]);
    else std::snprintf(buf, sizeof buf, " %.3f %.3f %.3f\n", 0.6, 0.6, 0.6);
    out += buf;
  }
  return out;
}

}  // namespace usp

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "usp/rational.hpp"

namespace usp {

using NodeId = int;
using Path = std::vector<NodeId>;
using Edge = std::pair<NodeId, NodeId>;

// Unweighted path system. `names` is the node table (sorted, unique) and ids
// index into it, so lexicographic order on id sequences is lexicographic order
// on names. Systems derived from another one (normalization, certificates)
// keep the parent's table even if some nodes drop out; `pruned()` compacts.
struct PathSystem {
  std::vector<std::string> names;
  std::vector<Path> paths;

  int node_count() const { return static_cast<int>(names.size()); }
  std::size_t size() const { return paths.size(); }
  bool empty() const { return paths.empty(); }

  std::optional<NodeId> find(std::string_view name) const {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return std::nullopt;
    return static_cast<NodeId>(it - names.begin());
  }
  NodeId id(std::string_view name) const {
    auto v = find(name);
    if (!v) throw std::invalid_argument("unknown node '" + std::string(name) + "'");
    return *v;
  }
  bool contains(const Path& p) const {
    return std::binary_search(paths.begin(), paths.end(), p);
  }
  std::optional<std::size_t> index_of(const Path& p) const {
    auto it = std::lower_bound(paths.begin(), paths.end(), p);
    if (it == paths.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - paths.begin());
  }
  // Nodes that occur in at least one path.
  std::vector<NodeId> used_nodes() const {
    std::vector<bool> seen(names.size(), false);
    for (const auto& p : paths)
      for (NodeId v : p) seen[v] = true;
    std::vector<NodeId> out;
    for (NodeId v = 0; v < node_count(); ++v)
      if (seen[v]) out.push_back(v);
    return out;
  }

  static PathSystem from_named(const std::vector<std::vector<std::string>>& named_paths);
  // Builds over an explicit table, sorting and deduplicating the paths.
  static PathSystem over(std::vector<std::string> names, std::vector<Path> paths);

  PathSystem pruned() const;
  std::vector<std::string> path_names(const Path& p) const {
    std::vector<std::string> out;
    out.reserve(p.size());
    for (NodeId v : p) out.push_back(names.at(v));
    return out;
  }

  friend bool operator==(const PathSystem&, const PathSystem&) = default;
};

// Path weights aligned with `system.paths`; all strictly positive.
struct WeightedPathSystem {
  PathSystem system;
  std::vector<Rational> weights;

  std::size_t size() const { return system.paths.size(); }
  bool empty() const { return system.paths.empty(); }
  const std::vector<Path>& paths() const { return system.paths; }
  const std::vector<std::string>& names() const { return system.names; }

  static WeightedPathSystem unit(const PathSystem& s) {
    return {s, std::vector<Rational>(s.paths.size(), Rational(1))};
  }
  // Drops zero weights; negative weights are rejected.
  static WeightedPathSystem from_map(std::vector<std::string> names, const std::map<Path, Rational>& w);
  std::map<Path, Rational> as_map() const {
    std::map<Path, Rational> m;
    for (std::size_t i = 0; i < size(); ++i) m[system.paths[i]] = weights[i];
    return m;
  }

  friend bool operator==(const WeightedPathSystem&, const WeightedPathSystem&) = default;
};

inline void sort_unique_paths(std::vector<Path>& paths) {
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
}

inline PathSystem PathSystem::over(std::vector<std::string> names, std::vector<Path> paths) {
  for (const auto& p : paths) {
    if (p.empty()) throw std::invalid_argument("empty path");
    for (NodeId v : p)
      if (v < 0 || v >= static_cast<NodeId>(names.size()))
        throw std::invalid_argument("node id out of range");
  }
  sort_unique_paths(paths);
  return PathSystem{std::move(names), std::move(paths)};
}

inline PathSystem PathSystem::from_named(const std::vector<std::vector<std::string>>& named_paths) {
  std::vector<std::string> names;
  for (const auto& p : named_paths) names.insert(names.end(), p.begin(), p.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  PathSystem s{names, {}};
  for (const auto& p : named_paths) {
    if (p.empty()) throw std::invalid_argument("empty path");
    Path q;
    for (const auto& n : p) q.push_back(s.id(n));
    s.paths.push_back(std::move(q));
  }
  sort_unique_paths(s.paths);
  return s;
}

inline PathSystem PathSystem::pruned() const {
  auto used = used_nodes();
  std::vector<NodeId> remap(names.size(), -1);
  std::vector<std::string> nn;
  for (NodeId v : used) {
    remap[v] = static_cast<NodeId>(nn.size());
    nn.push_back(names[v]);
  }
  std::vector<Path> np;
  for (const auto& p : paths) {
    Path q;
    for (NodeId v : p) q.push_back(remap[v]);
    np.push_back(std::move(q));
  }
  return over(std::move(nn), std::move(np));
}

inline WeightedPathSystem WeightedPathSystem::from_map(std::vector<std::string> names,
                                                       const std::map<Path, Rational>& w) {
  WeightedPathSystem out;
  out.system.names = std::move(names);
  for (const auto& [p, x] : w) {
    if (x < 0) throw std::invalid_argument("negative path weight");
    if (x == 0) continue;
    if (p.empty()) throw std::invalid_argument("empty path");
    out.system.paths.push_back(p);
    out.weights.push_back(x);
  }
  return out;
}

// Renames both systems onto the union of their node tables.
inline std::pair<PathSystem, PathSystem> align(const PathSystem& a, const PathSystem& b) {
  std::vector<std::string> names = a.names;
  names.insert(names.end(), b.names.begin(), b.names.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto remap = [&](const PathSystem& s) {
    PathSystem t{names, {}};
    for (const auto& p : s.paths) {
      Path q;
      for (NodeId v : p) q.push_back(t.id(s.names[v]));
      t.paths.push_back(std::move(q));
    }
    sort_unique_paths(t.paths);
    return t;
  };
  return {remap(a), remap(b)};
}

// ---------------------------------------------------------------------------
// Path predicates

inline bool is_simple_path(const Path& p) {
  std::vector<NodeId> q = p;
  std::sort(q.begin(), q.end());
  return std::adjacent_find(q.begin(), q.end()) == q.end();
}

inline bool is_cycle(const Path& p) { return p.size() > 1 && p.front() == p.back(); }

inline bool is_simple_cycle(const Path& p) {
  if (!is_cycle(p)) return false;
  return is_simple_path(Path(p.begin(), p.end() - 1));
}

inline bool is_semisimple_path(const Path& p) { return is_simple_path(p) || is_simple_cycle(p); }

inline Path reversed(const Path& p) { return Path(p.rbegin(), p.rend()); }

// Consecutive pairs with their multiplicities, diagonal pairs included.
inline std::vector<Edge> consecutive_pairs(const Path& p) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) out.emplace_back(p[i], p[i + 1]);
  return out;
}

inline bool contains_pair(const Path& p, NodeId u, NodeId v) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i] == u && p[i + 1] == v) return true;
  return false;
}

// Not-necessarily-contiguous subsequence test.
inline bool is_subsequence(const Path& small, const Path& big) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < big.size() && j < small.size(); ++i)
    if (big[i] == small[j]) ++j;
  return j == small.size();
}

// ---------------------------------------------------------------------------
// Boundary vectors

template <class Key>
class SparseVec {
 public:
  using map_type = std::map<Key, Rational>;

  void add(const Key& k, const Rational& x) {
    if (x == 0) return;
    auto [it, inserted] = entries_.try_emplace(k, x);
    if (!inserted) {
      it->second += x;
      if (it->second == 0) entries_.erase(it);
    }
  }
  void add_scaled(const SparseVec& other, const Rational& c) {
    if (c == 0) return;
    for (const auto& [k, x] : other.entries_) add(k, c * x);
  }
  Rational at(const Key& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? Rational(0) : it->second;
  }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const map_type& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  map_type entries_;
};

using BoundaryVec = SparseVec<Edge>;
using NodeVec = SparseVec<NodeId>;

inline BoundaryVec boundary_path(const Path& p) {
  BoundaryVec b;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i] != p[i + 1]) b.add({p[i], p[i + 1]}, Rational(1));
  if (p.front() != p.back()) b.add({p.front(), p.back()}, Rational(-1));
  return b;
}

inline BoundaryVec boundary_system(const WeightedPathSystem& s) {
  BoundaryVec b;
  for (std::size_t i = 0; i < s.size(); ++i) b.add_scaled(boundary_path(s.paths()[i]), s.weights[i]);
  return b;
}

inline BoundaryVec boundary_system(const PathSystem& s) {
  return boundary_system(WeightedPathSystem::unit(s));
}

inline NodeVec boundary_edges(const BoundaryVec& b) {
  NodeVec out;
  for (const auto& [e, x] : b) {
    out.add(e.first, -x);
    out.add(e.second, x);
  }
  return out;
}

inline bool is_trivial(const Path& p) { return boundary_path(p).empty(); }

// ---------------------------------------------------------------------------
// System predicates

inline bool is_consistent(const PathSystem& s) {
  for (const auto& p : s.paths)
    if (!is_simple_path(p)) return false;
  std::vector<int> pos(s.node_count(), -1);
  for (std::size_t a = 0; a < s.size(); ++a) {
    const Path& pa = s.paths[a];
    for (std::size_t i = 0; i < pa.size(); ++i) pos[pa[i]] = static_cast<int>(i);
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      const Path& pb = s.paths[b];
      // For u before v in both paths the two u~>v segments must coincide.
      for (std::size_t i = 0; i < pb.size(); ++i) {
        int ia = pos[pb[i]];
        if (ia < 0) continue;
        for (std::size_t j = i + 1; j < pb.size(); ++j) {
          int ja = pos[pb[j]];
          if (ja < ia) continue;
          if (static_cast<std::size_t>(ja - ia) != j - i ||
              !std::equal(pb.begin() + i, pb.begin() + j + 1, pa.begin() + ia)) {
            for (NodeId v : pa) pos[v] = -1;
            return false;
          }
        }
      }
    }
    for (NodeId v : pa) pos[v] = -1;
  }
  return true;
}

inline bool is_skip_free(const PathSystem& s) {
  std::set<Edge> pairs;
  for (const auto& p : s.paths)
    for (const auto& e : consecutive_pairs(p)) pairs.insert(e);
  for (const auto& p : s.paths)
    if (pairs.count({p.front(), p.back()})) return false;
  return true;
}

// Cycle detection on the arcs u->v for consecutive pairs; their transitive
// closure is exactly the "u before v in some path" relation.
inline bool is_acyclic(const PathSystem& s) {
  const int n = s.node_count();
  std::vector<std::set<NodeId>> out(n);
  for (const auto& p : s.paths)
    for (const auto& [u, v] : consecutive_pairs(p)) {
      if (u == v) return false;
      out[u].insert(v);
    }
  std::vector<int> state(n, 0);
  for (NodeId r = 0; r < n; ++r) {
    if (state[r]) continue;
    std::vector<std::pair<NodeId, std::set<NodeId>::const_iterator>> stack;
    stack.emplace_back(r, out[r].begin());
    state[r] = 1;
    while (!stack.empty()) {
      auto& [u, it] = stack.back();
      if (it == out[u].end()) {
        state[u] = 2;
        stack.pop_back();
        continue;
      }
      NodeId v = *it++;
      if (state[v] == 1) return false;
      if (state[v] == 0) {
        state[v] = 1;
        stack.emplace_back(v, out[v].begin());
      }
    }
  }
  return true;
}

struct Flags {
  bool consistent = false;
  bool simple = false;
  bool semisimple = false;
  bool nontrivial = false;
  bool skip_free = false;
  bool acyclic = false;
  friend bool operator==(const Flags&, const Flags&) = default;
};

inline Flags classify(const PathSystem& s) {
  Flags f;
  f.simple = std::all_of(s.paths.begin(), s.paths.end(), is_simple_path);
  f.semisimple = std::all_of(s.paths.begin(), s.paths.end(), is_semisimple_path);
  f.nontrivial = std::none_of(s.paths.begin(), s.paths.end(), is_trivial);
  f.consistent = is_consistent(s);
  f.skip_free = is_skip_free(s);
  f.acyclic = is_acyclic(s);
  return f;
}

// ---------------------------------------------------------------------------
// Constructions

inline PathSystem reversal_closure(const PathSystem& s) {
  std::vector<Path> paths = s.paths;
  for (const auto& p : s.paths) paths.push_back(reversed(p));
  return PathSystem::over(s.names, std::move(paths));
}

// Rotates left by j positions: (a,c,e), 1 -> (c,e,a).
inline Path circular_shift(const Path& p, std::size_t j) {
  if (!is_simple_path(p)) throw std::invalid_argument("circular_shift requires a simple path");
  Path q = p;
  std::rotate(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(j % q.size()), q.end());
  return q;
}

struct Deletion {
  std::set<NodeId> nodes;
  std::set<Path> paths;
};

// Paths in `d.paths` are removed, then nodes in `d.nodes` are removed from
// every remaining path. The result is pruned of isolated nodes.
inline PathSystem subsystem(const PathSystem& s, const Deletion& d) {
  std::vector<Path> paths;
  for (const auto& p : s.paths) {
    if (d.paths.count(p)) continue;
    Path q;
    for (NodeId v : p)
      if (!d.nodes.count(v)) q.push_back(v);
    if (q.empty()) throw std::invalid_argument("subsystem would leave an empty path");
    paths.push_back(std::move(q));
  }
  return PathSystem::over(s.names, std::move(paths)).pruned();
}

inline Path project_path(const Path& p, const std::set<NodeId>& dropped) {
  Path q;
  for (NodeId v : p)
    if (!dropped.count(v)) q.push_back(v);
  return q;
}

inline PathSystem strip_trivial(const PathSystem& s) {
  std::vector<Path> paths;
  for (const auto& p : s.paths)
    if (!is_trivial(p)) paths.push_back(p);
  return PathSystem{s.names, std::move(paths)};
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string path_to_string(const std::vector<std::string>& names, const Path& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ',';
    out += names.at(p[i]);
  }
  return out + ")";
}

// Key used for weights and homomorphism JSON: plain concatenation when every
// name is one character ("ace"), otherwise comma separated ("n1,n2").
inline std::string path_key(const std::vector<std::string>& names, const Path& p) {
  bool short_names = std::all_of(p.begin(), p.end(), [&](NodeId v) { return names.at(v).size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i && !short_names) out += ',';
    out += names.at(p[i]);
  }
  return out;
}

inline std::string system_to_string(const PathSystem& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += path_to_string(s.names, s.paths[i]);
  }
  return out + "}";
}

enum class Setting { Directed, Undirected, Dag };

inline std::string to_string(Setting s) {
  switch (s) {
    case Setting::Directed: return "directed";
    case Setting::Undirected: return "undirected";
    case Setting::Dag: return "dag";
  }
  return "directed";
}

inline Setting parse_setting(std::string_view text) {
  if (text == "directed") return Setting::Directed;
  if (text == "undirected") return Setting::Undirected;
  if (text == "dag") return Setting::Dag;
  throw std::invalid_argument("unknown setting '" + std::string(text) + "'");
}

}  // namespace usp

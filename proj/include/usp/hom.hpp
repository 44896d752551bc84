#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "usp/core.hpp"
#include "usp/graphalg.hpp"
#include "usp/witness.hpp"

namespace usp {

// phi maps node ids of the source table to node ids of the target table;
// rho maps source path indices to target path indices. Unused source nodes
// may stay at -1.
struct Homomorphism {
  std::vector<NodeId> phi;
  std::vector<int> rho;
  std::size_t target_nodes = 0;
  std::size_t target_paths = 0;
  friend bool operator==(const Homomorphism&, const Homomorphism&) = default;
};

inline Homomorphism identity_hom(const PathSystem& s) {
  Homomorphism h;
  h.phi.resize(s.node_count());
  for (int v = 0; v < s.node_count(); ++v) h.phi[v] = v;
  h.rho.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) h.rho[i] = static_cast<int>(i);
  h.target_nodes = s.names.size();
  h.target_paths = s.size();
  return h;
}

inline Path map_path(const Homomorphism& h, const Path& p) {
  Path q;
  for (NodeId v : p) q.push_back(h.phi.at(v));
  return q;
}

namespace detail {

// Leftmost embedding of `small` into `big`; empty if not a subsequence.
inline std::vector<std::size_t> embedding(const Path& small, const Path& big) {
  std::vector<std::size_t> pos;
  std::size_t j = 0;
  for (NodeId v : small) {
    while (j < big.size() && big[j] != v) ++j;
    if (j == big.size()) return {};
    pos.push_back(j++);
  }
  return pos;
}

// Branching condition for one ordered pair of source paths, given their
// images and embeddings. A merge of p1, p2 on v (distinct predecessors) must
// show up as a merge of r1, r2 on some x' between phi(u_i) (exclusive) and
// phi(v) (inclusive) in each image; splits mirror this after v.
inline bool branching_ok(const Path& p1, const Path& p2, const Path& r1, const Path& r2,
                         const std::vector<std::size_t>& e1, const std::vector<std::size_t>& e2) {
  for (std::size_t a = 0; a < p1.size(); ++a)
    for (std::size_t b = 0; b < p2.size(); ++b) {
      if (p1[a] != p2[b]) continue;
      if (a > 0 && b > 0 && p1[a - 1] != p2[b - 1]) {
        bool hit = false;
        for (std::size_t x = e1[a - 1] + 1; x <= e1[a] && !hit; ++x)
          for (std::size_t y = e2[b - 1] + 1; y <= e2[b] && !hit; ++y)
            hit = r1[x] == r2[y] && r1[x - 1] != r2[y - 1];
        if (!hit) return false;
      }
      if (a + 1 < p1.size() && b + 1 < p2.size() && p1[a + 1] != p2[b + 1]) {
        bool hit = false;
        for (std::size_t x = e1[a]; x < e1[a + 1] && !hit; ++x)
          for (std::size_t y = e2[b]; y < e2[b + 1] && !hit; ++y)
            hit = r1[x] == r2[y] && r1[x + 1] != r2[y + 1];
        if (!hit) return false;
      }
    }
  return true;
}

inline void check_total(const PathSystem& s1, const PathSystem& s2, const Homomorphism& h) {
  if (h.phi.size() != s1.names.size() || h.rho.size() != s1.size())
    throw std::invalid_argument("homomorphism maps do not match the source system");
  for (NodeId v : s1.used_nodes())
    if (h.phi[v] < 0 || h.phi[v] >= s2.node_count()) throw std::invalid_argument("node map is partial");
  for (int j : h.rho)
    if (j < 0 || j >= static_cast<int>(s2.size())) throw std::invalid_argument("path map is partial");
}

}  // namespace detail

inline bool verify_hom(const PathSystem& s1, const PathSystem& s2, const Homomorphism& h) {
  detail::check_total(s1, s2, h);
  const std::size_t k = s1.size();
  std::vector<std::vector<std::size_t>> emb(k);
  for (std::size_t i = 0; i < k; ++i) {
    emb[i] = detail::embedding(map_path(h, s1.paths[i]), s2.paths[h.rho[i]]);
    if (emb[i].empty()) return false;
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      if (!detail::branching_ok(s1.paths[i], s1.paths[j], s2.paths[h.rho[i]], s2.paths[h.rho[j]], emb[i], emb[j]))
        return false;
    }
  return true;
}

// Backtracking over phi in first-appearance order, pruning any assignment
// whose partial image of some path fits in no target path; then rho is
// searched among the target paths containing each full image.
inline std::optional<Homomorphism> search_hom(const PathSystem& s1, const PathSystem& s2, std::size_t budget = 10) {
  const auto used1 = s1.used_nodes();
  const auto used2 = s2.used_nodes();
  if (used1.size() > budget || used2.size() > budget)
    throw std::invalid_argument("search_hom: systems exceed the node budget of " + std::to_string(budget));

  std::vector<NodeId> order;
  std::vector<bool> seen(s1.names.size(), false);
  for (const auto& p : s1.paths)
    for (NodeId v : p)
      if (!seen[v]) {
        seen[v] = true;
        order.push_back(v);
      }
  std::vector<std::size_t> rank(s1.names.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  Homomorphism h;
  h.phi.assign(s1.names.size(), -1);
  h.rho.assign(s1.size(), -1);
  h.target_nodes = s2.names.size();
  h.target_paths = s2.size();

  std::vector<std::vector<std::size_t>> touching(order.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    std::set<std::size_t> ranks;
    for (NodeId v : s1.paths[i]) ranks.insert(rank[v]);
    for (auto r : ranks) touching[r].push_back(i);
  }
  auto partial_fits = [&](std::size_t i) {
    Path img;
    for (NodeId v : s1.paths[i])
      if (h.phi[v] >= 0) img.push_back(h.phi[v]);
    for (const auto& q : s2.paths)
      if (is_subsequence(img, q)) return true;
    return false;
  };

  std::vector<std::vector<int>> cands(s1.size());
  std::vector<std::vector<std::size_t>> emb(s1.size());
  auto pick_rho = [&](auto&& self, std::size_t i) -> bool {
    if (i == s1.size()) return true;
    for (int j : cands[i]) {
      h.rho[i] = j;
      emb[i] = detail::embedding(map_path(h, s1.paths[i]), s2.paths[j]);
      bool ok = true;
      for (std::size_t a = 0; a < i && ok; ++a)
        ok = detail::branching_ok(s1.paths[a], s1.paths[i], s2.paths[h.rho[a]], s2.paths[j], emb[a], emb[i]) &&
             detail::branching_ok(s1.paths[i], s1.paths[a], s2.paths[j], s2.paths[h.rho[a]], emb[i], emb[a]);
      if (ok && self(self, i + 1)) return true;
    }
    h.rho[i] = -1;
    return false;
  };
  auto assign = [&](auto&& self, std::size_t r) -> bool {
    if (r == order.size()) {
      for (std::size_t i = 0; i < s1.size(); ++i) {
        cands[i].clear();
        Path img = map_path(h, s1.paths[i]);
        for (std::size_t j = 0; j < s2.size(); ++j)
          if (is_subsequence(img, s2.paths[j])) cands[i].push_back(static_cast<int>(j));
        if (cands[i].empty()) return false;
      }
      return pick_rho(pick_rho, 0);
    }
    for (NodeId x : used2) {
      h.phi[order[r]] = x;
      bool ok = true;
      for (auto i : touching[r])
        if (!partial_fits(i)) {
          ok = false;
          break;
        }
      if (ok && self(self, r + 1)) return true;
    }
    h.phi[order[r]] = -1;
    return false;
  };
  if (s1.size() > 0 && s2.size() == 0) return std::nullopt;
  if (assign(assign, 0)) return h;
  return std::nullopt;
}

inline Homomorphism compose(const Homomorphism& h12, const Homomorphism& h23) {
  if (h12.target_nodes != h23.phi.size() || h12.target_paths != h23.rho.size())
    throw std::invalid_argument("compose: codomain of the first map is not the domain of the second");
  Homomorphism h;
  h.target_nodes = h23.target_nodes;
  h.target_paths = h23.target_paths;
  for (NodeId v : h12.phi) h.phi.push_back(v < 0 ? -1 : h23.phi.at(v));
  for (int j : h12.rho) h.rho.push_back(j < 0 ? -1 : h23.rho.at(j));
  return h;
}

// Identity on node names, each remaining path mapped to the first surviving
// superpath it was projected from.
inline Homomorphism subsystem_hom(const PathSystem& sub, const PathSystem& sup, const Deletion& d) {
  auto rebuilt = subsystem(sup, d);
  if (rebuilt.names != sub.names || rebuilt.paths != sub.paths)
    throw std::invalid_argument("subsystem_hom: deletion record does not produce the given subsystem");
  Homomorphism h;
  h.target_nodes = sup.names.size();
  h.target_paths = sup.size();
  for (const auto& n : sub.names) h.phi.push_back(sup.id(n));
  for (const auto& p : sub.paths) {
    Path lifted = map_path(h, p);
    int hit = -1;
    for (std::size_t j = 0; j < sup.size() && hit < 0; ++j)
      if (!d.paths.count(sup.paths[j]) && project_path(sup.paths[j], d.nodes) == lifted) hit = static_cast<int>(j);
    if (hit < 0) throw std::logic_error("subsystem_hom: no superpath for a remaining path");
    h.rho.push_back(hit);
  }
  return h;
}

// w1(u,v) = dist_G2(phi(u), phi(v)) on the consecutive pairs of s1.
inline WeightedDigraph transfer_weights(const PathSystem& s1, const PathSystem& s2, const Homomorphism& h,
                                       const WeightedDigraph& g2) {
  std::string why;
  if (!verify_witness(s2, g2, &why)) throw std::invalid_argument("transfer_weights: g2 is not a witness: " + why);
  if (!verify_hom(s1, s2, h)) throw std::invalid_argument("transfer_weights: map is not a homomorphism");
  WeightedDigraph g1(s1.node_count(), s1.names);
  for (const auto& [u, v] : system_edges(s1)) {
    auto sp = shortest_path(g2, h.phi[u], h.phi[v]);
    if (!sp.distance || *sp.distance <= 0)
      throw std::logic_error("transfer_weights: image pair has no positive distance");
    g1.set_weight(u, v, *sp.distance);
  }
  return g1;
}

}  // namespace usp

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "usp/core.hpp"

namespace usp {

struct NormalizeStats {
  std::size_t skipfree_merges = 0;
  std::size_t semisimple_splits = 0;
  std::size_t trivial_removed = 0;
  std::size_t rounds = 0;
  bool empty_output = false;
};

namespace detail {

using WeightMap = std::map<Path, Rational>;

inline void add_weight(WeightMap& w, const Path& p, const Rational& x) {
  auto [it, inserted] = w.try_emplace(p, x);
  if (!inserted) {
    it->second += x;
    if (it->second == 0) w.erase(it);
  }
}

inline std::optional<std::size_t> find_pair(const Path& p, NodeId s, NodeId t) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i] == s && p[i + 1] == t) return i;
  return std::nullopt;
}

constexpr std::size_t kMergeCap = 1000000;

inline void skipfree_in_place(WeightMap& w, NormalizeStats& st) {
  for (;;) {
    std::set<Edge> pending;
    {
      std::set<Edge> ends, inner;
      for (const auto& [p, x] : w) {
        ends.insert({p.front(), p.back()});
        for (const auto& e : consecutive_pairs(p)) inner.insert(e);
      }
      for (const auto& e : ends)
        if (inner.count(e)) pending.insert(e);
    }
    bool merged_any = false;
    for (const auto& [s, t] : pending) {
      for (;;) {
        const Path* p1 = nullptr;
        const Path* p2 = nullptr;
        for (const auto& [a, xa] : w) {
          if (a.front() != s || a.back() != t) continue;
          for (const auto& [b, xb] : w)
            if (b != a && find_pair(b, s, t)) {
              p2 = &b;
              break;
            }
          if (p2) {
            p1 = &a;
            break;
          }
        }
        if (!p1) break;
        Path pi1 = *p1, pi2 = *p2;
        std::size_t at = *find_pair(pi2, s, t);
        Path merged(pi2.begin(), pi2.begin() + static_cast<std::ptrdiff_t>(at));
        merged.insert(merged.end(), pi1.begin(), pi1.end());
        merged.insert(merged.end(), pi2.begin() + static_cast<std::ptrdiff_t>(at) + 2, pi2.end());
        Rational wmin = std::min(w.at(pi1), w.at(pi2));
        add_weight(w, pi1, -wmin);
        add_weight(w, pi2, -wmin);
        add_weight(w, merged, wmin);
        merged_any = true;
        if (++st.skipfree_merges > kMergeCap) throw std::logic_error("skip-free modification did not terminate");
      }
    }
    if (!merged_any) return;
  }
}

inline void semisimple_in_place(WeightMap& w, NormalizeStats& st) {
  for (;;) {
    auto it = w.begin();
    while (it != w.end() && is_semisimple_path(it->first)) ++it;
    if (it == w.end()) return;
    Path p = it->first;
    Rational x = it->second;
    const std::size_t k = p.size();
    // Earliest closing repeat j, with the nearest opening i, skipping the
    // pair (first,last) that makes p a cycle.
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t j = 1; j < k && !found; ++j)
      for (std::size_t i = j; i-- > 0;)
        if (p[i] == p[j] && (i != 0 || j != k - 1)) {
          bi = i;
          bj = j;
          found = true;
          break;
        }
    if (!found) throw std::logic_error("non-semisimple path without a split point");
    Path outer(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(bi) + 1);
    outer.insert(outer.end(), p.begin() + static_cast<std::ptrdiff_t>(bj) + 1, p.end());
    Path loop(p.begin() + static_cast<std::ptrdiff_t>(bi), p.begin() + static_cast<std::ptrdiff_t>(bj) + 1);
    w.erase(it);
    add_weight(w, outer, x);
    add_weight(w, loop, x);
    ++st.semisimple_splits;
  }
}

inline void nontrivial_in_place(WeightMap& w, NormalizeStats& st) {
  for (auto it = w.begin(); it != w.end();) {
    if (is_trivial(it->first)) {
      it = w.erase(it);
      ++st.trivial_removed;
    } else {
      ++it;
    }
  }
}

}  // namespace detail

inline WeightedPathSystem nontrivial_mod(const WeightedPathSystem& s, NormalizeStats* stats = nullptr) {
  NormalizeStats local;
  auto w = s.as_map();
  detail::nontrivial_in_place(w, stats ? *stats : local);
  return WeightedPathSystem::from_map(s.names(), w);
}

inline WeightedPathSystem semisimple_mod(const WeightedPathSystem& s, NormalizeStats* stats = nullptr) {
  NormalizeStats local;
  auto w = s.as_map();
  detail::semisimple_in_place(w, stats ? *stats : local);
  return WeightedPathSystem::from_map(s.names(), w);
}

inline WeightedPathSystem skipfree_mod(const WeightedPathSystem& s, NormalizeStats* stats = nullptr) {
  NormalizeStats local;
  auto w = s.as_map();
  detail::skipfree_in_place(w, stats ? *stats : local);
  return WeightedPathSystem::from_map(s.names(), w);
}

// Skip-free, then semisimple, then nontrivial. A self-skipping non-simple
// path can survive the first step and only split apart in the second, so the
// sequence repeats until the skip-free flag holds.
inline WeightedPathSystem normalize(const WeightedPathSystem& s, NormalizeStats* stats = nullptr) {
  NormalizeStats local;
  NormalizeStats& st = stats ? *stats : local;
  auto w = s.as_map();
  for (;;) {
    ++st.rounds;
    detail::skipfree_in_place(w, st);
    detail::semisimple_in_place(w, st);
    detail::nontrivial_in_place(w, st);
    auto out = WeightedPathSystem::from_map(s.names(), w);
    if (is_skip_free(out.system)) {
      st.empty_output = out.empty();
      return out;
    }
    if (st.rounds > 64) throw std::logic_error("normalize did not reach a skip-free system");
  }
}

}  // namespace usp

#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "usp/core.hpp"
#include "usp/graphalg.hpp"
#include "usp/normalize.hpp"
#include "usp/rigidity.hpp"
#include "usp/topology.hpp"
#include "usp/witness.hpp"

namespace usp {

// Rigidity and the cutting-plane witness search disagreed.
struct CrossValidationError : std::logic_error {
  using std::logic_error::logic_error;
};

enum class DecisionTag { Inconsistent, StronglyMetrizable, NotStronglyMetrizable };

inline std::string to_string(DecisionTag t) {
  switch (t) {
    case DecisionTag::Inconsistent: return "Inconsistent";
    case DecisionTag::StronglyMetrizable: return "StronglyMetrizable";
    case DecisionTag::NotStronglyMetrizable: return "NotStronglyMetrizable";
  }
  return "Inconsistent";
}

struct DecisionStats {
  std::size_t lp_pivots = 0;
  std::size_t oracle_calls = 0;
  std::size_t witness_rounds = 0;
  double wall_ms = 0;
};

// Best-effort topological evidence for a refutation.
struct Evidence {
  bool searched = false;
  bool budget_hit = false;
  std::optional<PathSystem> gray_partner;
  std::optional<ManifoldReport> manifold;
};

struct Decision {
  DecisionTag tag = DecisionTag::Inconsistent;
  Setting setting = Setting::Directed;
  PathSystem decided;                            // reversal closure when undirected
  std::optional<WeightedDigraph> witness;        // SM
  std::optional<WeightedPathSystem> certificate;  // NotSM, except a cyclic system in the dag setting
  Evidence evidence;
  std::string note;
  DecisionStats stats;
  bool sm() const { return tag == DecisionTag::StronglyMetrizable; }
};

struct DecideOptions {
  bool evidence = true;
  std::size_t evidence_max_len = 6;
  // Evidence search budget, converted to a fixed number of search steps so
  // the outcome does not depend on machine speed.
  long budget_ms = 2000;
  std::size_t steps_per_ms = 1000;
};

namespace detail {

// Lowest positive margin any system path currently has over its best
// competing simple path, together with the least edge weight.
inline std::optional<Rational> slack(const PathSystem& s, const WeightedDigraph& g) {
  std::optional<Rational> m;
  auto take = [&](const Rational& x) {
    if (!m || x < *m) m = x;
  };
  for (const auto& [e, w] : g.edges()) take(w);
  for (const auto& p : s.paths) {
    if (p.size() < 2) continue;
    auto q = second_shortest_simple(g, p.front(), p.back(), p);
    if (!q) continue;
    take(q->first - *path_length(g, p));
  }
  return m;
}

// Adds an edge for every two-node path whose edge is missing. Below the
// current slack, the new edge is uniquely shortest and cannot shortcut any
// other path; with no alternative route, a weight above the total suffices.
inline void readd_two_node_paths(const PathSystem& full, WeightedDigraph& g) {
  std::vector<Path> kept;
  for (const auto& p : full.paths)
    if (p.size() >= 2 && !is_trivial(p)) kept.push_back(p);
  for (const auto& p : full.paths) {
    if (p.size() != 2) continue;
    kept.push_back(p);
    const NodeId u = p[0], v = p[1];
    if (g.has_edge(u, v)) continue;
    auto current = PathSystem{full.names, kept};
    auto d = shortest_path(g, u, v).distance;
    Rational base;
    if (!d) {
      base = 1;
      for (const auto& [e, w] : g.edges()) base += w;
      g.set_weight(u, v, base);
      if (!verify_witness(current, g)) throw std::logic_error("two-node path re-insertion failed");
      continue;
    }
    auto sl = slack(PathSystem{full.names, std::vector<Path>(kept.begin(), kept.end() - 1)}, g);
    Rational eps = *d;
    if (sl && *sl < eps) eps = *sl;
    eps /= 2;
    for (int attempt = 0;; ++attempt) {
      g.set_weight(u, v, *d - eps);
      if (verify_witness(current, g)) break;
      if (attempt > 64) throw std::logic_error("two-node path re-insertion failed");
      eps /= 2;
    }
  }
}

}  // namespace detail

inline Decision decide(const PathSystem& s, Setting setting = Setting::Directed, const DecideOptions& opt = {});

namespace detail {

inline Decision decide_directed(const PathSystem& s, const DecideOptions& opt) {
  Decision d;
  d.decided = s;
  if (!is_consistent(s)) {
    d.tag = DecisionTag::Inconsistent;
    return d;
  }
  PathSystem core = strip_trivial(s);
  WeightedDigraph g(s.node_count(), s.names);
  if (core.size() <= 1) {
    for (const auto& p : core.paths)
      for (const auto& [u, v] : consecutive_pairs(p)) g.set_weight(u, v, Rational(1));
  } else {
    auto rig = rigidity_test(core);
    auto wit = witness_weights(core);
    d.stats.lp_pivots += rig.pivots + wit.lp_pivots;
    d.stats.oracle_calls += wit.oracle_calls;
    d.stats.witness_rounds += wit.rounds;
    if (rig.rigid != wit.found)
      throw CrossValidationError(std::string("rigidity test says ") + (rig.rigid ? "rigid" : "non-rigid") +
                                 " but the witness search " + (wit.found ? "found weights" : "was refuted"));
    if (!rig.rigid) {
      d.tag = DecisionTag::NotStronglyMetrizable;
      d.certificate = certificate(core, rig);
      if (opt.evidence) {
        d.evidence.searched = true;
        const auto& cs = d.certificate->system;
        bool unit = std::all_of(d.certificate->weights.begin(), d.certificate->weights.end(),
                                [](const Rational& x) { return x == 1; });
        if (unit && is_polyhedral_pair(core, cs)) {
          d.evidence.gray_partner = cs;
        } else {
          auto f = classify(core);
          if (f.nontrivial && f.semisimple && f.skip_free) {
            GrayPartnerStats gs;
            std::size_t steps = static_cast<std::size_t>(std::max(0L, opt.budget_ms)) * opt.steps_per_ms;
            d.evidence.gray_partner = find_gray_partner(core, opt.evidence_max_len, Setting::Directed, &gs, steps);
            d.evidence.budget_hit = !gs.exhausted;
          }
        }
        if (d.evidence.gray_partner)
          d.evidence.manifold = manifold_report(build_complex(core, *d.evidence.gray_partner));
      }
      return d;
    }
    g = std::move(wit.graph);
  }
  readd_two_node_paths(s, g);
  std::string why;
  if (!verify_witness(s, g, &why)) throw std::logic_error("final witness failed verification: " + why);
  d.tag = DecisionTag::StronglyMetrizable;
  d.witness = std::move(g);
  return d;
}

}  // namespace detail

// Directed: consistency screen, trivial paths stripped, rigidity cross-checked
// against the witness search. Undirected: the directed decision on the
// reversal closure with a symmetrized witness. Dag: the directed decision on
// systems whose path orders admit a topological order.
inline Decision decide(const PathSystem& s, Setting setting, const DecideOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  Decision d;
  if (setting == Setting::Undirected) {
    auto closure = reversal_closure(s);
    d = detail::decide_directed(closure, opt);
    if (d.witness) {
      auto sym = symmetrize(*d.witness);
      std::string why;
      if (!verify_witness(closure, sym, &why))
        throw std::logic_error("symmetrized witness failed verification: " + why);
      d.witness = std::move(sym);
    }
  } else if (setting == Setting::Dag && is_consistent(s) && !is_acyclic(s)) {
    d.decided = s;
    d.tag = DecisionTag::NotStronglyMetrizable;
    d.note = "path orders admit no topological order";
  } else {
    d = detail::decide_directed(s, opt);
  }
  d.setting = setting;
  d.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return d;
}

// Every ordered pair s != t whose shortest path is unique.
inline PathSystem extract_usp_system(const WeightedDigraph& g) {
  for (const auto& [e, w] : g.edges())
    if (w <= 0) throw std::invalid_argument("extract_usp_system requires positive weights");
  std::vector<Path> paths;
  for (NodeId s = 0; s < g.node_count(); ++s)
    for (NodeId t = 0; t < g.node_count(); ++t) {
      if (s == t) continue;
      auto sp = shortest_path(g, s, t);
      if (sp.reachable() && sp.unique) paths.push_back(sp.path);
    }
  return PathSystem::over(g.names(), std::move(paths));
}

struct RotationResult {
  PathSystem shifted;
  bool consistent = false;
  Decision decision;
};

inline RotationResult rotate_and_decide(const PathSystem& s, const std::vector<std::size_t>& shifts,
                                        const DecideOptions& opt = {}) {
  if (shifts.size() != s.size()) throw std::invalid_argument("one shift count per path is required");
  if (!is_acyclic(s)) throw std::invalid_argument("rotate_and_decide requires an acyclic system");
  if (!decide(s, Setting::Directed, opt).sm()) throw std::invalid_argument("rotate_and_decide requires an s.m. system");
  std::vector<Path> paths;
  for (std::size_t i = 0; i < s.size(); ++i) paths.push_back(circular_shift(s.paths[i], shifts[i]));
  RotationResult r;
  r.shifted = PathSystem::over(s.names, std::move(paths));
  r.consistent = is_consistent(r.shifted);
  r.decision = decide(r.shifted, Setting::Directed, opt);
  return r;
}

}  // namespace usp

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "usp/core.hpp"
#include "usp/exactlp.hpp"
#include "usp/graphalg.hpp"

namespace usp {

// len(pi) + margin <= len(alternative), for the path at `path_index`.
struct WitnessConstraint {
  std::size_t path_index = 0;
  Path alternative;
  friend auto operator<=>(const WitnessConstraint&, const WitnessConstraint&) = default;
};

struct WitnessResult {
  bool found = false;
  WeightedDigraph graph;                      // when found
  std::vector<WitnessConstraint> constraints;  // the pool; infeasible when !found
  std::size_t rounds = 0;
  std::size_t lp_pivots = 0;
  std::size_t oracle_calls = 0;
};

// Every consecutive pair u != v of the system, in sorted order.
inline std::vector<Edge> system_edges(const PathSystem& s) {
  std::set<Edge> e;
  for (const auto& p : s.paths)
    for (const auto& [u, v] : consecutive_pairs(p))
      if (u != v) e.insert({u, v});
  return {e.begin(), e.end()};
}

inline bool verify_witness(const PathSystem& s, const WeightedDigraph& g, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (g.node_count() != s.node_count()) return fail("graph and system have different node tables");
  for (const auto& [e, w] : g.edges())
    if (w <= 0) return fail("non-positive weight on (" + s.names[e.first] + "," + s.names[e.second] + ")");
  for (const auto& p : s.paths) {
    for (const auto& [u, v] : consecutive_pairs(p))
      if (u == v || !g.has_edge(u, v))
        return fail("path " + path_to_string(s.names, p) + " uses missing edge (" + s.names[u] + "," +
                    s.names[v] + ")");
    if (p.size() == 1) continue;
    auto sp = shortest_path(g, p.front(), p.back());
    if (!sp.unique || sp.path != p)
      return fail("path " + path_to_string(s.names, p) + " is not the unique shortest path");
  }
  return true;
}

// Cutting-plane search for positive edge weights. Variables are the path
// edges with w_e >= 1; each round minimizes the total weight subject to the
// pool, then asks the separation oracle for a competing simple path.
inline WitnessResult witness_weights(const PathSystem& s, const Rational& margin = Rational(1)) {
  if (!is_consistent(s)) throw std::invalid_argument("witness_weights requires a consistent system");
  if (margin <= 0) throw std::invalid_argument("margin must be positive");
  const auto E = system_edges(s);
  std::map<Edge, int> var;
  for (std::size_t j = 0; j < E.size(); ++j) var[E[j]] = static_cast<int>(j);

  WitnessResult res;
  std::set<WitnessConstraint> pool;
  for (;;) {
    ++res.rounds;
    LinearProgram lp(static_cast<int>(E.size()));
    lp.sense = Sense::Minimize;
    for (std::size_t j = 0; j < E.size(); ++j) {
      lp.set_bounds(static_cast<int>(j), Rational(1), std::nullopt);
      lp.objective.emplace_back(static_cast<int>(j), Rational(1));
    }
    for (const auto& c : pool) {
      std::map<int, Rational> coef;
      for (const auto& [u, v] : consecutive_pairs(c.alternative)) coef[var.at({u, v})] += 1;
      for (const auto& [u, v] : consecutive_pairs(s.paths[c.path_index])) coef[var.at({u, v})] -= 1;
      SparseRow row;
      for (const auto& [j, x] : coef)
        if (x != 0) row.emplace_back(j, x);
      lp.add_row(std::move(row), Relation::GreaterEq, margin);
    }
    auto sol = solve(lp);
    res.lp_pivots += sol.pivots;
    res.constraints.assign(pool.begin(), pool.end());
    if (!sol.optimal()) return res;

    WeightedDigraph g(s.node_count(), s.names);
    for (std::size_t j = 0; j < E.size(); ++j) g.set_weight(E[j].first, E[j].second, sol.point[j]);

    std::vector<WitnessConstraint> found;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Path& p = s.paths[i];
      if (p.size() == 1) continue;
      ++res.oracle_calls;
      auto sp = shortest_path(g, p.front(), p.back());
      if (sp.unique && sp.path == p) continue;
      auto q = second_shortest_simple(g, p.front(), p.back(), p);
      if (!q) throw std::logic_error("oracle found no competing path for a violated system path");
      WitnessConstraint c{i, q->second};
      if (pool.count(c)) throw std::logic_error("oracle returned a constraint already satisfied by the LP");
      found.push_back(std::move(c));
    }
    if (found.empty()) {
      std::string why;
      if (!verify_witness(s, g, &why)) throw std::logic_error("witness failed verification: " + why);
      res.found = true;
      res.graph = std::move(g);
      return res;
    }
    pool.insert(found.begin(), found.end());
  }
}

}  // namespace usp

#pragma once

#include <random>
#include <string>
#include <vector>

#include "usp/core.hpp"
#include "usp/graphalg.hpp"

namespace usp {

inline std::vector<std::string> letter_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    std::string s;
    for (int k = i;; k = k / 26 - 1) {
      s.insert(s.begin(), static_cast<char>('a' + k % 26));
      if (k < 26) break;
    }
    names.push_back(s);
  }
  return names;
}

// Random digraph with weights p/q, 1 <= p <= max_num, 1 <= q <= max_den.
// When dag is set only edges u -> v with u < v are drawn.
inline WeightedDigraph random_positive_graph(std::mt19937_64& rng, int n, double density, bool dag = false,
                                             int max_num = 9, int max_den = 4) {
  WeightedDigraph g(n, letter_names(n));
  std::bernoulli_distribution take(density);
  std::uniform_int_distribution<int> num(1, max_num), den(1, max_den);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v || (dag && u > v) || !take(rng)) continue;
      Rational w(num(rng), den(rng));
      w.canonicalize();
      g.set_weight(u, v, w);
    }
  return g;
}

// Random system of k paths over n nodes; paths are random node walks of
// length 1..max_len, so they need not be simple or consistent.
inline PathSystem random_system(std::mt19937_64& rng, int n, int k, int max_len) {
  std::uniform_int_distribution<int> node(0, n - 1), len(1, max_len);
  std::vector<Path> paths;
  for (int i = 0; i < k; ++i) {
    Path p;
    int L = len(rng);
    for (int j = 0; j < L; ++j) p.push_back(node(rng));
    paths.push_back(std::move(p));
  }
  return PathSystem::over(letter_names(n), std::move(paths));
}

}  // namespace usp

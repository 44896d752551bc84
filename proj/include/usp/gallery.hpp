#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usp/core.hpp"
#include "usp/metrizability.hpp"
#include "usp/topology.hpp"
#include "usp/witness.hpp"

namespace usp {

struct GalleryEntry {
  std::string name;
  PathSystem system;
  DecisionTag expected = DecisionTag::StronglyMetrizable;
  std::optional<DecisionTag> expected_undirected;
  std::optional<PathSystem> partner;
  std::string note;
};

namespace detail {

inline PathSystem words(std::initializer_list<const char*> ps) {
  std::vector<std::vector<std::string>> named;
  for (const char* w : ps) {
    std::vector<std::string> p;
    for (const char* c = w; *c; ++c) p.emplace_back(1, *c);
    named.push_back(std::move(p));
  }
  return PathSystem::from_named(named);
}

// Partner over the same node table as `base`.
inline PathSystem words_over(const PathSystem& base, std::initializer_list<const char*> ps) {
  auto t = words(ps);
  return align(base, t).second;
}

}  // namespace detail

inline std::vector<GalleryEntry> gallery() {
  using detail::words;
  using detail::words_over;
  std::vector<GalleryEntry> g;
  auto oct1 = words({"ace", "adf", "bde", "bcf"});
  g.push_back({"OCT1", oct1, DecisionTag::NotStronglyMetrizable, std::nullopt,
               words_over(oct1, {"acf", "ade", "bce", "bdf"}), "two-colored octahedron, consistent and acyclic"});
  auto oct2 = words({"cea", "dfa", "bde", "bcf"});
  g.push_back({"OCT2", oct2, DecisionTag::NotStronglyMetrizable, std::nullopt,
               words_over(oct2, {"bce", "bdf", "cfa", "dea"}), "OCT1 with node a rotated to the end of every path"});
  auto hbp = words({"adf", "bef", "bdg", "ceg", "cdh", "aeh"});
  g.push_back({"HBP1", hbp, DecisionTag::NotStronglyMetrizable, std::nullopt,
               words_over(hbp, {"aef", "bdf", "beg", "cdg", "ceh", "adh"}), "two-colored hexagonal bipyramid"});
  auto esb = words({"bdgi", "cehj", "abe", "acd", "fgj", "fhi"});
  g.push_back({"ESB1", esb, DecisionTag::NotStronglyMetrizable, std::nullopt,
               words_over(esb, {"ace", "abd", "behi", "cdgj", "fhj", "fgi"}),
               "two-colored elongated square bipyramid"});
  g.push_back({"DIRECTED_ONLY", words({"abc", "ca"}), DecisionTag::StronglyMetrizable, DecisionTag::Inconsistent,
               std::nullopt, "s.m. as a directed system, reversal closure inconsistent"});
  g.push_back({"INCONSISTENT", words({"abc", "ac"}), DecisionTag::Inconsistent, DecisionTag::Inconsistent,
               std::nullopt, "smallest inconsistent system"});
  return g;
}

inline std::optional<GalleryEntry> gallery_entry(const std::string& name) {
  for (auto& e : gallery())
    if (e.name == name) return e;
  return std::nullopt;
}

struct GalleryCheck {
  bool pass = true;
  std::vector<std::string> lines;
  void expect(bool ok, const std::string& what) {
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    pass = pass && ok;
  }
};

// Re-verifies every expectation of an entry; nothing is taken on trust.
inline GalleryCheck check_gallery_entry(const GalleryEntry& e, const DecideOptions& opt = {}) {
  GalleryCheck c;
  auto d = decide(e.system, Setting::Directed, opt);
  c.expect(d.tag == e.expected, "directed decision " + to_string(d.tag) + " (expected " + to_string(e.expected) + ")");
  if (d.witness) c.expect(verify_witness(e.system, *d.witness), "witness verifies");
  if (d.certificate) {
    const auto& cert = *d.certificate;
    auto input = WeightedPathSystem::unit(strip_trivial(e.system));
    auto f = classify(cert.system);
    c.expect(boundary_system(cert) == boundary_system(input), "certificate boundary equals input boundary");
    c.expect(cert.system.paths != input.system.paths, "certificate differs from input");
    c.expect(f.semisimple && f.nontrivial && f.skip_free, "certificate is semisimple, nontrivial, skip-free");
  }
  if (e.expected_undirected) {
    auto u = decide(e.system, Setting::Undirected, opt);
    c.expect(u.tag == *e.expected_undirected, "undirected decision " + to_string(u.tag) + " (expected " +
                                                  to_string(*e.expected_undirected) + ")");
  }
  if (e.partner) {
    c.expect(is_polyhedral_pair(e.system, *e.partner), "polyhedral pair with the recorded partner");
    auto r = manifold_report(build_complex(e.system, *e.partner));
    c.expect(r.is_manifold && r.boundaryless && r.orientable && r.locally_balanced,
             "complex is a closed orientable locally balanced surface");
    c.expect(r.euler_characteristic == 2 && r.genus == 0, "Euler characteristic 2, genus 0");
  }
  return c;
}

}  // namespace usp

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "usp/gallery.hpp"
#include "usp/usp.hpp"

using namespace usp;
using detail::words;
using detail::words_over;

namespace {

GalleryEntry entry(const char* name) { return *gallery_entry(name); }

NodeId id(const PathSystem& s, const char* n) { return s.id(n); }

// The two single-pinwheel systems a pinwheel induces.
std::pair<PathSystem, PathSystem> induced(const PathSystem& a, const PathSystem& b, const Pinwheel& p) {
  std::vector<Path> x, y;
  for (const auto& c : p.colorful) x.push_back(a.paths[c.path]);
  for (const auto& c : p.gray) y.push_back(b.paths[c.path]);
  return {PathSystem::over(a.names, x), PathSystem::over(b.names, y)};
}

std::size_t incidences(const PathSystem& s, NodeId v) {
  std::size_t n = 0;
  for (const auto& p : s.paths) n += std::count(p.begin(), p.end(), v) ? 1 : 0;
  return n;
}

}  // namespace

TEST(Topology, CancelAtExamples) {
  auto e = entry("OCT1");
  for (NodeId v : e.system.used_nodes()) {
    EXPECT_TRUE(cancel_at(e.system, e.system, v));
    EXPECT_TRUE(cancel_at(e.system, *e.partner, v));
  }
  auto minus_b = words_over(e.system, {"ace", "adf", "bde"});
  EXPECT_FALSE(cancel_at(e.system, minus_b, id(e.system, "b")));
}

TEST(Topology, FindPinwheelExamples) {
  auto e = entry("OCT1");
  NodeId d = id(e.system, "d");
  auto p = find_pinwheel(e.system, *e.partner, d);
  ASSERT_TRUE(p);
  EXPECT_TRUE(valid_pinwheel(*p));
  EXPECT_GE(p->size(), 2u);
  std::set<Path> colorful;
  for (const auto& c : p->colorful) colorful.insert(e.system.paths[c.path]);
  EXPECT_TRUE(colorful.count(words_over(e.system, {"adf"}).paths[0]));
  EXPECT_TRUE(colorful.count(words_over(e.system, {"bde"}).paths[0]));
  auto [x, y] = induced(e.system, *e.partner, *p);
  EXPECT_TRUE(cancel_at(x, y, d));

  auto one = words({"avb"});
  auto q = find_pinwheel(one, one, id(one, "v"));
  ASSERT_TRUE(q);
  EXPECT_EQ(q->size(), 1u);

  auto minus_b = words_over(e.system, {"ace", "adf", "bde"});
  EXPECT_THROW(find_pinwheel(e.system, minus_b, id(e.system, "b")), std::invalid_argument);
}

TEST(Topology, PinwheelsCancelOnEveryGalleryNode) {
  for (const char* name : {"OCT1", "OCT2", "HBP1", "ESB1"}) {
    auto e = entry(name);
    for (NodeId v : e.system.used_nodes()) {
      auto p = find_pinwheel(e.system, *e.partner, v);
      ASSERT_TRUE(p) << name;
      ASSERT_TRUE(valid_pinwheel(*p));
      auto [x, y] = induced(e.system, *e.partner, *p);
      ASSERT_TRUE(cancel_at(x, y, v)) << name;
    }
  }
}

TEST(Topology, PinwheelDecompositionCounts) {
  auto e = entry("OCT1");
  auto a = WeightedPathSystem::unit(e.system), b = WeightedPathSystem::unit(*e.partner);
  for (NodeId v : e.system.used_nodes()) {
    auto pws = pinwheel_decomposition(a, b, v);
    std::map<std::size_t, int> seen;
    std::size_t total = 0;
    for (const auto& p : pws) {
      ASSERT_TRUE(valid_pinwheel(p));
      for (const auto& c : p.colorful) ++seen[c.path];
      total += p.size();
    }
    EXPECT_EQ(total, incidences(e.system, v));
    for (const auto& [i, k] : seen) EXPECT_EQ(k, 1);
  }
  // Weights 1/2 scale by beta = 2; weights 3/2 put each path in three pinwheels.
  for (auto [w, want] : {std::pair<Rational, int>{Rational(1, 2), 1}, {Rational(3, 2), 3}}) {
    auto ah = a, bh = b;
    for (auto& x : ah.weights) x = w;
    for (auto& x : bh.weights) x = w;
    auto pws = pinwheel_decomposition(ah, bh, id(e.system, "c"));
    std::map<std::size_t, int> seen, gseen;
    for (const auto& p : pws) {
      for (const auto& c : p.colorful) ++seen[c.path];
      for (const auto& g : p.gray) ++gseen[g.path];
    }
    EXPECT_EQ(seen.size(), incidences(e.system, id(e.system, "c")));
    for (const auto& [i, k] : seen) EXPECT_EQ(k, want);
    for (const auto& [i, k] : gseen) EXPECT_EQ(k, want);
  }
}

TEST(Topology, IsFlatExamples) {
  auto e = entry("OCT1");
  for (NodeId v : e.system.used_nodes()) EXPECT_TRUE(is_flat(e.system, *e.partner, v));
  auto two = words({"avb", "cvd"});
  EXPECT_FALSE(is_flat(two, two, id(two, "v")));
  auto one = words({"avb"});
  EXPECT_TRUE(is_flat(one, one, id(one, "v")));
}

// A size-3 pinwheel whose in-nodes meet its out-nodes: flat in the directed
// sense, but the undirected variant requires the two sets to be disjoint.
TEST(Topology, DirectedPinwheelMayReuseNodes) {
  auto t1 = words({"cxd", "axe", "bxa"});
  auto t2 = words_over(t1, {"axd", "bxe", "cxa"});
  NodeId x = id(t1, "x");
  ASSERT_TRUE(cancel_at(t1, t2, x));
  EXPECT_TRUE(is_flat(t1, t2, x, Setting::Directed));
  EXPECT_FALSE(is_flat(t1, t2, x, Setting::Undirected));
}

TEST(Topology, PolyhedralPairExamples) {
  auto e = entry("OCT1");
  EXPECT_TRUE(is_polyhedral_pair(e.system, *e.partner));
  EXPECT_FALSE(is_polyhedral_pair(e.system, e.system));
  auto bad = check_polyhedral_pair(e.system, *entry("HBP1").partner);
  EXPECT_FALSE(bad.ok);
  EXPECT_FALSE(bad.reason.empty());
  auto h = entry("HBP1");
  auto found = find_gray_partner(h.system);
  ASSERT_TRUE(found);
  EXPECT_TRUE(is_polyhedral_pair(h.system, *found));
}

TEST(Topology, PolyhedralImpliesNonRigid) {
  for (const char* name : {"OCT1", "OCT2", "HBP1", "ESB1"}) {
    auto e = entry(name);
    ASSERT_TRUE(is_polyhedral_pair(e.system, *e.partner)) << name;
    EXPECT_FALSE(rigidity_test(e.system).rigid) << name;
    EXPECT_FALSE(rigidity_test(*e.partner).rigid) << name;
  }
}

TEST(Topology, FindGrayPartnerExamples) {
  auto e = entry("OCT1");
  GrayPartnerStats st;
  auto t = find_gray_partner(e.system, 3, Setting::Directed, &st);
  ASSERT_TRUE(t);
  EXPECT_TRUE(st.exhausted);
  EXPECT_TRUE(is_polyhedral_pair(e.system, *t));
  EXPECT_EQ(*t, *e.partner);

  EXPECT_FALSE(find_gray_partner(words({"abc"})));

  auto esb = entry("ESB1");
  auto u = find_gray_partner(esb.system, 4);
  ASSERT_TRUE(u);
  EXPECT_EQ(u->size(), 6u);
  EXPECT_TRUE(is_polyhedral_pair(esb.system, *u));
  auto r = manifold_report(build_complex(esb.system, *u));
  EXPECT_EQ(r.euler_characteristic, 2);
}

TEST(Topology, FindGrayPartnerRespectsStepBudget) {
  GrayPartnerStats st;
  auto t = find_gray_partner(entry("ESB1").system, 6, Setting::Directed, &st, 5);
  EXPECT_FALSE(t);
  EXPECT_FALSE(st.exhausted);
}

TEST(Topology, BuildComplexCounts) {
  struct Want {
    const char* name;
    std::size_t cells, glued, vertices;
  };
  for (auto w : {Want{"OCT1", 8, 12, 6}, Want{"HBP1", 12, 18, 8}, Want{"ESB1", 12, 20, 10}}) {
    auto e = entry(w.name);
    auto cx = build_complex(e.system, *e.partner);
    EXPECT_EQ(cx.cells.size(), w.cells) << w.name;
    EXPECT_EQ(cx.gluing.size(), w.glued) << w.name;
    auto r = manifold_report(cx);
    EXPECT_EQ(r.V, w.vertices) << w.name;
    EXPECT_EQ(r.E, w.glued) << w.name;
    for (const auto& [a, b] : cx.gluing) {
      EXPECT_FALSE(cx.cells[a.cell].gray);
      EXPECT_TRUE(cx.cells[b.cell].gray);
      EXPECT_EQ(cx.arc(a), cx.arc(b));
    }
    for (const auto& c : cx.cells) EXPECT_EQ(std::count(c.marked.begin(), c.marked.end(), true), 1);
  }
  auto e = entry("OCT1");
  try {
    build_complex(e.system, words_over(e.system, {"acf", "ade", "bce"}));
    FAIL() << "expected a multiplicity error";
  } catch (const std::invalid_argument& ex) {
    EXPECT_NE(std::string(ex.what()).find("(b,"), std::string::npos) << ex.what();
  }
}

TEST(Topology, ManifoldReportsOnGallery) {
  for (const char* name : {"OCT1", "OCT2", "HBP1", "ESB1"}) {
    auto e = entry(name);
    auto r = manifold_report(build_complex(e.system, *e.partner));
    EXPECT_TRUE(r.is_manifold) << name;
    EXPECT_TRUE(r.boundaryless) << name;
    EXPECT_TRUE(r.orientable) << name;
    EXPECT_TRUE(r.locally_balanced) << name;
    EXPECT_EQ(r.euler_characteristic, 2) << name;
    EXPECT_EQ(r.genus, 0) << name;
    EXPECT_EQ(r.components, 1u) << name;
    EXPECT_EQ(r.euler_characteristic, static_cast<long>(r.V) - static_cast<long>(r.E) + static_cast<long>(r.F));
    EXPECT_EQ(r.euler_characteristic % 2, 0);
    if (classify(e.system).acyclic) EXPECT_EQ(r.locally_balanced, r.globally_balanced) << name;
  }
  auto esb = manifold_report(build_complex(entry("ESB1").system, *entry("ESB1").partner));
  EXPECT_TRUE(esb.globally_balanced);
  EXPECT_EQ(esb.colorful_cells, 6u);
  EXPECT_EQ(esb.gray_cells, 6u);
}

TEST(Topology, CorruptedGluingIsNotAManifold) {
  auto e = entry("OCT1");
  auto cx = build_complex(e.system, *e.partner);
  std::swap(cx.gluing[0].second, cx.gluing[1].second);
  auto r = manifold_report(cx);
  EXPECT_FALSE(r.is_manifold);
  EXPECT_FALSE(r.offending_vertices.empty());
  EXPECT_FALSE(r.problems.empty());
}

TEST(Topology, DisconnectedAndNonOrientableReports) {
  // Two disjoint octahedra: two sphere components.
  auto e = entry("OCT1");
  std::vector<std::vector<std::string>> a, b;
  for (const char* suffix : {"1", "2"})
    for (const auto* sys : {&e.system, &*e.partner})
      for (const auto& p : sys->paths) {
        std::vector<std::string> q;
        for (NodeId v : p) q.push_back(sys->names[v] + suffix);
        (sys == &e.system ? a : b).push_back(q);
      }
  auto t1 = PathSystem::from_named(a), t2 = PathSystem::from_named(b);
  auto r = manifold_report(build_complex(t1, t2));
  EXPECT_TRUE(r.is_manifold);
  EXPECT_EQ(r.components, 2u);
  EXPECT_EQ(r.euler_characteristic, 4);
  ASSERT_EQ(r.component_genus.size(), 2u);
  EXPECT_EQ(r.component_genus[0], 0);
  EXPECT_EQ(r.genus, 0);
}

TEST(Topology, OffExport) {
  auto e = entry("OCT1");
  auto off = to_off(build_complex(e.system, *e.partner));
  EXPECT_EQ(off.rfind("OFF\n", 0), 0u);
  EXPECT_NE(off.find("\n6 8 0\n"), std::string::npos);
  EXPECT_NE(off.find("# face 4 gray (a,c,f)"), std::string::npos);
  EXPECT_NE(off.find("3 0 2 4 "), std::string::npos);
}

TEST(Topology, UndirectedPolyhedralOnGallery) {
  for (const char* name : {"OCT1", "HBP1", "ESB1"}) {
    auto e = entry(name);
    EXPECT_TRUE(is_polyhedral_pair(e.system, *e.partner, Setting::Undirected)) << name;
    auto r = manifold_report(build_complex(e.system, *e.partner, Setting::Undirected));
    EXPECT_TRUE(r.is_manifold && r.boundaryless && r.locally_balanced) << name;
  }
}

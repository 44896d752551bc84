#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "usp/fuzz.hpp"
#include "usp/usp.hpp"

namespace fs = std::filesystem;
using namespace usp;

namespace {

enum Exit { kSM = 0, kUsage = 1, kCrossValidation = 2, kNotSM = 3, kInconsistent = 4 };

int exit_code(DecisionTag t) {
  switch (t) {
    case DecisionTag::StronglyMetrizable: return kSM;
    case DecisionTag::NotStronglyMetrizable: return kNotSM;
    case DecisionTag::Inconsistent: return kInconsistent;
  }
  return kUsage;
}

const char* kExitCodes =
    "Exit codes:\n"
    "  0  strongly metrizable\n"
    "  1  usage or input error\n"
    "  2  internal cross-validation failure\n"
    "  3  not strongly metrizable\n"
    "  4  inconsistent\n";

std::string weighted_lines(const WeightedPathSystem& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i)
    os << "  " << path_to_string(s.names(), s.paths()[i]) << " x " << to_string(s.weights[i]) << "\n";
  return os.str();
}

std::string manifold_summary(const ManifoldReport& r) {
  std::ostringstream os;
  os << "  manifold " << (r.is_manifold ? "yes" : "no") << ", boundaryless " << (r.boundaryless ? "yes" : "no")
     << ", orientable " << (r.orientable ? "yes" : "no") << "\n"
     << "  V=" << r.V << " E=" << r.E << " F=" << r.F << " chi=" << r.euler_characteristic
     << " genus=" << to_string(r.genus) << " components=" << r.components << "\n"
     << "  cells " << r.colorful_cells << " colorful + " << r.gray_cells << " gray, locally balanced "
     << (r.locally_balanced ? "yes" : "no") << ", globally balanced " << (r.globally_balanced ? "yes" : "no") << "\n";
  for (const auto& p : r.problems) os << "  problem: " << p << "\n";
  return os.str();
}

std::string decision_text(const Decision& d, bool timing) {
  std::ostringstream os;
  os << "decision: " << to_string(d.tag) << "\n";
  os << "setting: " << to_string(d.setting) << "\n";
  os << "system: " << system_to_string(d.decided) << "\n";
  if (!d.note.empty()) os << "note: " << d.note << "\n";
  if (d.witness) {
    os << "witness:\n";
    for (const auto& [e, w] : d.witness->edges())
      os << "  " << d.witness->names()[e.first] << " -> " << d.witness->names()[e.second] << " : " << to_string(w)
         << "\n";
  }
  if (d.certificate) {
    auto input = WeightedPathSystem::unit(strip_trivial(d.decided));
    bool same = boundary_system(*d.certificate) == boundary_system(input);
    os << "certificate (boundary check " << (same ? "passed" : "FAILED") << "):\n" << weighted_lines(*d.certificate);
  }
  if (d.evidence.searched) {
    if (d.evidence.gray_partner) {
      os << "gray partner: " << system_to_string(*d.evidence.gray_partner) << "\n";
      if (d.evidence.manifold) os << manifold_summary(*d.evidence.manifold);
    } else {
      os << "gray partner: none found" << (d.evidence.budget_hit ? " (budget exhausted)" : "") << "\n";
    }
  }
  os << "stats: lp_pivots=" << d.stats.lp_pivots << " oracle_calls=" << d.stats.oracle_calls
     << " witness_rounds=" << d.stats.witness_rounds;
  if (timing) os << " wall_ms=" << d.stats.wall_ms;
  os << "\n";
  return os.str();
}

struct Outcome {
  int code = kUsage;
  std::string out;  // stdout
  std::string err;  // stderr
};

Outcome run_check(const std::string& file, Setting setting, bool as_json, bool timing, const DecideOptions& opt,
                  const std::string& dot_path) {
  Outcome o;
  try {
    bool weighted = false;
    auto ws = load_system_file(file, &weighted);
    if (weighted) o.err += "note: weights are ignored by check\n";
    auto d = decide(ws.system, setting, opt);
    o.out = as_json ? decision_to_json(d, timing).dump(2) + "\n" : decision_text(d, timing);
    if (!dot_path.empty() && d.witness) {
      std::ofstream(dot_path) << to_dot(*d.witness);
    }
    o.code = exit_code(d.tag);
  } catch (const ParseError& e) {
    o.err = std::string("error: ") + e.what() + "\n";
    o.code = kUsage;
  } catch (const CrossValidationError& e) {
    o.err = std::string("cross-validation failure: ") + e.what() + "\n";
    o.code = kCrossValidation;
  } catch (const std::invalid_argument& e) {
    o.err = std::string("error: ") + e.what() + "\n";
    o.code = kUsage;
  }
  return o;
}

int run_batch(const std::string& dir, const std::string& out_dir, Setting setting, bool timing, unsigned jobs,
              const DecideOptions& opt) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) {
    std::cerr << "error: " << dir << " is not a directory\n";
    return kUsage;
  }
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json" &&
        e.path().filename().string().find(".decision.") == std::string::npos)
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  fs::path out = out_dir.empty() ? fs::path(dir) : fs::path(out_dir);
  fs::create_directories(out);

  std::vector<Outcome> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < files.size();)
      results[i] = run_check(files[i].string(), setting, true, timing, opt, "");
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Decisions never fail a batch; input errors give 1, cross-validation 2.
  int worst = kSM;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& r = results[i];
    std::string name = files[i].stem().string() + ".decision.json";
    if (r.code == kUsage || r.code == kCrossValidation) {
      std::cout << files[i].filename().string() << ": error\n";
      std::cerr << r.err;
      worst = std::max(worst, r.code);
      continue;
    }
    std::ofstream(out / name) << r.out;
    std::string tag = r.code == kSM ? "StronglyMetrizable" : r.code == kNotSM ? "NotStronglyMetrizable" : "Inconsistent";
    std::cout << files[i].filename().string() << ": " << tag << " -> " << name << "\n";
  }
  return worst;
}

int run_manifold(const std::string& f1, const std::string& f2, Setting setting, const std::string& off, bool as_json) {
  try {
    auto a = load_system_file(f1).system;
    auto b = load_system_file(f2).system;
    auto check = check_polyhedral_pair(a, b, setting);
    if (!check.ok) {
      std::cerr << "not a polyhedral pair: " << check.reason;
      if (check.node) std::cerr << " (first failing node: " << *check.node << ")";
      std::cerr << "\n";
      return kUsage;
    }
    auto cx = build_complex(a, b, setting);
    auto r = manifold_report(cx);
    if (as_json)
      std::cout << manifold_to_json(cx.names, r).dump(2) << "\n";
    else
      std::cout << "polyhedral pair: yes\n" << manifold_summary(r);
    if (!off.empty()) std::ofstream(off) << to_off(cx);
    return r.is_manifold ? kSM : kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}

int run_gallery(const std::string& name, bool all, bool as_json, const DecideOptions& opt) {
  std::vector<GalleryEntry> picked;
  if (all) {
    picked = gallery();
  } else if (auto e = gallery_entry(name)) {
    picked.push_back(*e);
  } else {
    std::cerr << "unknown gallery entry '" << name << "'; known:";
    for (const auto& e : gallery()) std::cerr << " " << e.name;
    std::cerr << "\n";
    return kUsage;
  }
  bool pass = true;
  json arr = json::array();
  for (const auto& e : picked) {
    GalleryCheck c;
    try {
      c = check_gallery_entry(e, opt);
    } catch (const CrossValidationError& ex) {
      c.expect(false, std::string("cross-validation failure: ") + ex.what());
    }
    pass = pass && c.pass;
    if (as_json) {
      json j;
      j["name"] = e.name;
      j["note"] = e.note;
      j["system"] = system_to_json(e.system);
      j["expected"] = to_string(e.expected);
      if (e.partner) j["partner"] = system_to_json(*e.partner);
      j["checks"] = c.lines;
      j["pass"] = c.pass;
      arr.push_back(j);
      continue;
    }
    std::cout << e.name << ": " << system_to_string(e.system) << "\n  " << e.note << "\n";
    if (e.partner) std::cout << "  partner: " << system_to_string(*e.partner) << "\n";
    for (const auto& l : c.lines) std::cout << "  " << l << "\n";
    std::cout << (c.pass ? "PASS " : "FAIL ") << e.name << "\n";
  }
  if (as_json) std::cout << arr.dump(2) << "\n";
  return pass ? kSM : kUsage;
}

int run_fuzz(std::uint64_t seed, int count, int nodes, double density, bool as_json, const DecideOptions& opt) {
  std::mt19937_64 rng(seed);
  int failures = 0;
  json arr = json::array();
  for (int i = 0; i < count; ++i) {
    auto g = random_positive_graph(rng, nodes, density);
    auto s = extract_usp_system(g);
    Decision d;
    std::string status;
    try {
      d = decide(s, Setting::Directed, opt);
      status = d.sm() && verify_witness(s, *d.witness) ? "ok" : "FAIL";
    } catch (const CrossValidationError& e) {
      status = std::string("FAIL cross-validation: ") + e.what();
    }
    if (status != "ok") ++failures;
    if (as_json)
      arr.push_back({{"index", i}, {"paths", s.size()}, {"status", status}, {"decision", to_string(d.tag)}});
    else
      std::cout << "#" << i << " paths=" << s.size() << " " << to_string(d.tag) << " " << status << "\n";
  }
  if (as_json) std::cout << json{{"seed", seed}, {"count", count}, {"failures", failures}, {"runs", arr}}.dump(2) << "\n";
  else std::cout << "seed " << seed << ": " << (count - failures) << "/" << count << " ok\n";
  return failures ? kCrossValidation : kSM;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong metrizability of path systems, decided with exact rational arithmetic."};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("usp ") + kSchemaVersion);

  std::uint64_t seed = 1;
  long budget_ms = 2000;
  app.add_option("--seed", seed, "Seed for randomized subcommands")->capture_default_str();
  app.add_option("--budget-ms", budget_ms, "Budget for the gray-partner evidence search")->capture_default_str();

  std::map<std::string, Setting> settings{
      {"directed", Setting::Directed}, {"undirected", Setting::Undirected}, {"dag", Setting::Dag}};

  auto* check = app.add_subcommand("check", "Decide strong metrizability of a path system");
  std::string file, batch, out_dir, dot;
  Setting setting = Setting::Directed;
  bool as_json = false, timing = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  check->add_option("file", file, "Path-system JSON file");
  check->add_option("--setting", setting, "directed, undirected or dag")
      ->transform(CLI::CheckedTransformer(settings, CLI::ignore_case));
  check->add_flag("--json", as_json, "Emit the decision as JSON");
  check->add_flag("--timing", timing, "Include wall-clock time (output no longer byte-deterministic)");
  check->add_option("--dot", dot, "Write the witness graph in DOT format");
  auto* batch_opt = check->add_option("--batch", batch, "Decide every *.json file in a directory");
  check->add_option("--out", out_dir, "Output directory for --batch (default: the input directory)")->needs(batch_opt);
  check->add_option("--jobs", jobs, "Worker threads for --batch")->needs(batch_opt);
  check->footer(kExitCodes);

  auto* manifold = app.add_subcommand("manifold", "Build and report the cell complex of a polyhedral pair");
  std::string t1, t2, off;
  Setting msetting = Setting::Directed;
  bool mjson = false;
  manifold->add_option("t", t1, "Colorful system JSON")->required();
  manifold->add_option("t_prime", t2, "Gray system JSON")->required();
  manifold->add_option("--setting", msetting, "directed or undirected")
      ->transform(CLI::CheckedTransformer(settings, CLI::ignore_case));
  manifold->add_option("--off", off, "Write the complex in OFF format");
  manifold->add_flag("--json", mjson, "Emit the report as JSON");

  auto* gal = app.add_subcommand("gallery", "Print built-in systems and re-verify their expected outcomes");
  std::string gname;
  bool gall = false, gjson = false;
  gal->add_option("name", gname, "Entry name");
  gal->add_flag("--all", gall, "Run every entry");
  gal->add_flag("--json", gjson, "Emit JSON");

  auto* fz = app.add_subcommand("fuzz", "Decide systems extracted from random positive graphs");
  int count = 20, nodes = 6;
  double density = 0.4;
  bool fjson = false;
  fz->add_option("--count", count, "Number of graphs")->capture_default_str();
  fz->add_option("--nodes", nodes, "Nodes per graph")->check(CLI::Range(1, 26))->capture_default_str();
  fz->add_option("--density", density, "Edge probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  fz->add_flag("--json", fjson, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  DecideOptions opt;
  opt.budget_ms = budget_ms;

  if (*check) {
    if (!batch.empty()) return run_batch(batch, out_dir, setting, timing, jobs, opt);
    if (file.empty()) {
      std::cerr << "check: a file or --batch directory is required\n";
      return kUsage;
    }
    auto o = run_check(file, setting, as_json, timing, opt, dot);
    std::cout << o.out;
    std::cerr << o.err;
    return o.code;
  }
  if (*manifold) return run_manifold(t1, t2, msetting, off, mjson);
  if (*gal) {
    if (!gall && gname.empty()) {
      std::cerr << "gallery: give an entry name or --all\n";
      return kUsage;
    }
    return run_gallery(gname, gall, gjson, opt);
  }
  if (*fz) return run_fuzz(seed, count, nodes, density, fjson, opt);
  return kUsage;
}

// sadim: command-line front end for the self-affine dimension toolkit.
//
// Every subcommand prints a short text summary (or the JSON report with
// --json) and can write the JSON report, a CSV table or an SVG figure to
// --out / --csv.  Exit codes: 0 pass, 2 a check failed, 1 error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sadim/sadim.hpp"

using namespace sadim;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

struct RunConfig {
  std::string preset;
  std::string system_path;
  int n = 28;
  int depth = -1;  // subcommand-specific default when negative
  std::vector<double> scales;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string csv;
  double tol = 1e-12;
  bool json = false;
  bool timing = false;
  bool mass = false, obnc = false, proj = false, ssc = false;
  int samples = 8;
};

struct Loaded {
  std::string name;
  IfsSystem system;
  std::optional<CarpetData> carpet;
  std::optional<Preset> preset;
};

Loaded load(const RunConfig& cfg) {
  if (cfg.preset.empty() == cfg.system_path.empty())
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --preset or --system");
  if (!cfg.preset.empty()) {
    Preset p = make_preset(cfg.preset, cfg.n);
    Loaded l{p.name, p.system, p.carpet, p};
    return l;
  }
  return {cfg.system_path, load_system(cfg.system_path), std::nullopt, std::nullopt};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// Emits the report: JSON on stdout with --json, text otherwise; JSON to --out.
void emit(const RunConfig& cfg, const json& report, const std::string& text) {
  if (cfg.json)
    std::cout << report.dump(2) << '\n';
  else
    std::cout << text;
  if (!cfg.out.empty()) write_file(cfg.out, report.dump(2) + "\n");
}

/// Largest level n <= 8 with N^n <= 2e6 products.
int default_level(const IfsSystem& sys) {
  int n = 1;
  while (n < 8 && std::pow(static_cast<double>(sys.size()), n + 1) <= 2e6) ++n;
  return n;
}

struct S0 {
  double value = 0.0;
  std::string method;
};

S0 resolve_s0(const IfsSystem& sys, double tol) {
  try {
    return {affinity_closed_form(sys, std::max(tol, 1e-15)), "closed form"};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::WrongStructure && e.kind() != ErrorKind::NoRootInRange) throw;
  }
  const int n = default_level(sys);
  return {affinity_upper_bound(sys, n, tol).s, "s_" + std::to_string(n)};
}

/// --scales, or |X| * 3^{-2..-4}.
std::vector<double> default_scales(const RunConfig& cfg, const IfsSystem& sys) {
  if (!cfg.scales.empty()) return cfg.scales;
  return {sys.diameter() / 9, sys.diameter() / 27, sys.diameter() / 81};
}

// ---------------------------------------------------------------------------

int cmd_render(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  const int n = cfg.depth < 0 ? 1 : cfg.depth;
  const std::string svg = render_svg(l.system, n);
  if (cfg.out.empty())
    std::cout << svg;
  else {
    write_file(cfg.out, svg);
    std::cout << "wrote " << level_bodies(l.system, n).size() << " cylinder bodies to " << cfg.out << '\n';
  }
  return kExitPass;
}

int cmd_dim(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  json rep{{"system", l.name}, {"check", "dimension"}};
  std::ostringstream text;
  bool closed = false;
  try {
    const double s0 = affinity_closed_form(l.system, std::max(cfg.tol, 1e-15));
    rep["s0"] = s0;
    rep["method"] = "closed form";
    text << "s0 = " << fmt("%.10f", s0) << " (closed form)\n";
    closed = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::WrongStructure && e.kind() != ErrorKind::NoRootInRange) throw;
  }
  const int max_level = cfg.depth < 0 ? (closed ? 0 : default_level(l.system)) : cfg.depth;
  std::vector<PressureEstimate> rows;
  for (int n = 1; n <= max_level; n *= 2) {
    const auto t0 = std::chrono::steady_clock::now();
    PressureEstimate est = affinity_upper_bound(l.system, n, cfg.tol);
    est.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(est);
    text << "s_" << n << " = " << fmt("%.10f", est.s) << '\n';
  }
  if (!rows.empty()) {
    json seq = json::array();
    for (const auto& r : rows) seq.push_back({{"n", r.n}, {"s_n", r.s}, {"evaluations", r.evaluations}});
    rep["upper_bounds"] = seq;
    if (!rep.contains("s0")) {
      rep["s0"] = rows.back().s;
      rep["method"] = "s_" + std::to_string(rows.back().n);
    }
  }
  if (l.carpet && !rows.empty()) {
    const SliceCriterion c = slice_dimension_criterion(l.system, *l.carpet, rows.back().n);
    rep["slice_dimension"] = c.slice_dimension;
    rep["vanishing"] = c.vanishing;
    rep["verdict"] = c.verdict;
    text << "slice dimension = " << fmt("%.7f", c.slice_dimension) << '\n' << c.verdict << '\n';
  }
  if (!cfg.csv.empty()) write_file(cfg.csv, pressure_csv(rows, cfg.timing));
  emit(cfg, rep, text.str());
  return kExitPass;
}

int cmd_domination(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  MulticoneOptions opt;
  opt.seed = cfg.seed;
  const DominationCertificate cert = find_multicone(l.system, opt);
  const int depth = cfg.depth < 0 ? 6 : cfg.depth;
  const DominReport d = domin_constants(l.system.linear_parts(), cert, depth);
  json rep{{"system", l.name},   {"check", "domination"}, {"certificate", certificate_to_json(cert)},
           {"c_emp", d.c_emp},   {"depth", depth},        {"words", d.words},
           {"witness", d.witness}};
  std::ostringstream text;
  text << "multicone with " << cert.cone.arcs().size() << " arc(s), margin " << fmt("%.3e", cert.margin) << '\n'
       << "tau = " << fmt("%.6f", cert.tau) << ", C_dom = " << fmt("%.6f", cert.c_dom) << '\n'
       << "C_emp(depth " << depth << ") = " << fmt("%.6f", d.c_emp) << '\n';
  emit(cfg, rep, text.str());
  return kExitPass;
}

int cmd_kaenmaki(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  const S0 s0 = resolve_s0(l.system, cfg.tol);
  KaenmakiOptions opt;
  opt.depth = cfg.depth < 0 ? 6 : cfg.depth;
  opt.tol = cfg.tol;
  const KaenmakiModel model(l.system, find_multicone(l.system), s0.value, opt);
  const MeasureApprox lnu = model.dual_apply(model.nu());
  double tv = 0.0;
  for (std::size_t u = 0; u < lnu.masses.size(); ++u) tv += std::abs(lnu.masses[u] - model.nu().masses[u]);
  json first = json::array();
  for (std::size_t k = 0; k < l.system.size(); ++k) first.push_back(model.mu_K({static_cast<int>(k)}));
  json rep{{"system", l.name},       {"check", "kaenmaki"},          {"s0", s0.value},
           {"s0_method", s0.method}, {"depth", opt.depth},           {"lambda", model.lambda()},
           {"p_residual", model.p_residual()}, {"nu_tv_residual", tv}, {"mu_K_first_level", first}};
  std::ostringstream text;
  text << "s0 = " << fmt("%.10f", s0.value) << " (" << s0.method << ")\n"
       << "lambda = " << fmt("%.12f", model.lambda()) << '\n'
       << "||Lp - p|| = " << fmt("%.3e", model.p_residual()) << ", TV(L*nu - nu) = " << fmt("%.3e", tv) << '\n';
  if (!cfg.csv.empty()) write_file(cfg.csv, model.csv());
  emit(cfg, rep, text.str());
  return kExitPass;
}

int cmd_slices(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  const S0 s0 = resolve_s0(l.system, cfg.tol);
  const DominationCertificate cert = find_multicone(l.system);
  std::mt19937_64 rng(cfg.seed);
  const double r_min = cfg.scales.empty() ? 5e-3 : cfg.scales.front();
  json rows = json::array();
  std::ostringstream text;
  text << "s0 = " << fmt("%.10f", s0.value) << " (" << s0.method << ")\n";
  bool ok = true;
  std::optional<SliceIntegral> first;
  for (int j = 0; j < cfg.samples; ++j) {
    const InfiniteWord w = InfiniteWord::periodic(detail::random_word(rng, l.system.size(), 5));
    const SubinvarianceSample s = slice_subinvariance(l.system, cert, w, s0.value, 128, r_min);
    if (!first) first = slice_integral_h(l.system, cert, w, s0.value, 128, r_min);
    const bool holds = s.h <= 1.05 * s.lh + 1e-15;
    ok = ok && holds;
    rows.push_back({{"word", w.period}, {"h", s.h}, {"Lh", s.lh}, {"holds", holds}});
    text << "word " << word_to_string(w.period) << ": h = " << fmt("%.6f", s.h) << ", Lh = " << fmt("%.6f", s.lh)
         << (holds ? "" : "  VIOLATED") << '\n';
  }
  if (!cfg.csv.empty() && first) write_file(cfg.csv, slice_profile_csv(*first));
  json rep{{"system", l.name}, {"check", "slices"}, {"s0", s0.value}, {"r_min", r_min}, {"samples", rows},
           {"passed", ok}};
  emit(cfg, rep, text.str());
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_check(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  const IfsSystem& sys = l.system;
  const bool any = cfg.mass || cfg.obnc || cfg.proj || cfg.ssc;
  const auto scales = default_scales(cfg, sys);
  std::vector<DiagnosticsReport> reports;
  std::unique_ptr<KaenmakiModel> model;
  std::optional<MuK> mu;
  auto measure = [&]() -> const MuK& {
    if (!mu) {
      const S0 s0 = resolve_s0(sys, cfg.tol);
      try {
        mu = MuK::closed_form(sys, s0.value);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::WrongStructure) throw;
        model = std::make_unique<KaenmakiModel>(sys, find_multicone(sys), s0.value);
        mu = MuK::from_model(*model);
      }
    }
    return *mu;
  };
  MassOptions mopt;
  mopt.seed = cfg.seed;
  if (cfg.ssc || !any) reports.push_back(ssc_check(sys, cfg.depth < 0 ? 3 : cfg.depth));
  if (cfg.obnc) reports.push_back(obnc_check(sys, sys.body(), scales, 256, cfg.seed));
  if (cfg.mass) reports.push_back(mass_distribution_check(sys, measure(), scales, mopt));
  if (cfg.proj) {
    std::vector<double> ps = cfg.scales;
    if (ps.empty())
      for (double f : {1.0 / 3, 1.0 / 9, 1.0 / 27}) ps.push_back(sys.diameter() * f);
    const auto dirs = sample_furstenberg_directions(sys, find_multicone(sys), 4, cfg.seed);
    reports.push_back(projection_density_check(sys, measure(), dirs, ps, mopt));
  }
  json arr = json::array();
  std::ostringstream text;
  bool passed = true;
  for (const auto& r : reports) {
    arr.push_back(report_to_json(r));
    passed = passed && r.passed;
    text << r.check << ": " << r.verdict;
    if (!r.max_ratio.empty()) {
      text << " [";
      for (std::size_t i = 0; i < r.max_ratio.size(); ++i) text << (i ? ", " : "") << fmt("%.4f", r.max_ratio[i]);
      text << ']';
    }
    text << '\n';
  }
  emit(cfg, {{"system", l.name}, {"reports", arr}, {"passed", passed}}, text.str());
  return passed ? kExitPass : kExitCheckFailed;
}

int cmd_verify_example(const RunConfig& cfg) {
  const Loaded l = load(cfg);
  if (!l.preset) throw Error(ErrorKind::WrongPreset, "verify-example needs --preset ex1-diag or ex2-triangular");
  const HypothesisReport r = verify_example_hypotheses(*l.preset);
  std::ostringstream text;
  text << "s0 = " << fmt("%.10f", r.s0) << '\n';
  for (const auto& v : r.values)
    text << (v.holds ? "[ok]   " : "[fail] ") << v.name << " = " << fmt("%.7f", v.value) << ' ' << v.relation << ' '
         << fmt("%g", v.threshold) << '\n';
  text << r.verdict << '\n';
  emit(cfg, hypotheses_to_json(r), text.str());
  return r.all_hold ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension and measure diagnostics for planar self-affine sets"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--preset", cfg.preset, "built-in system")
        ->check(CLI::IsMember(preset_names()));
    sub->add_option("--system", cfg.system_path, "system definition (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--n", cfg.n, "family parameter (ex2-triangular)")->check(CLI::Range(2, 1000));
    sub->add_option("--depth", cfg.depth, "level / model depth")->check(CLI::Range(0, 64));
    sub->add_option("--scales", cfg.scales, "comma-separated scales")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "output file (JSON report, SVG for render)");
    sub->add_option("--csv", cfg.csv, "CSV table output");
    sub->add_option("--tol", cfg.tol, "numerical tolerance")->check(CLI::Range(1e-15, 1e-2));
    sub->add_flag("--json", cfg.json, "print the JSON report instead of text");
    sub->add_flag("--timing", cfg.timing, "include wall-clock timings in CSV output");
  };

  std::vector<std::pair<CLI::App*, int (*)(const RunConfig&)>> commands;
  auto add = [&](const char* name, const char* help, int (*fn)(const RunConfig&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    commands.push_back({sub, fn});
    return sub;
  };
  add("render", "SVG of the level-n cylinder bodies", cmd_render);
  add("dim", "affinity dimension and upper bounds", cmd_dim);
  add("domination", "multicone certificate and comparability constants", cmd_domination);
  add("kaenmaki", "transfer operator eigendata and the Kaenmaki measure", cmd_kaenmaki);
  auto* slices = add("slices", "slice integrals and the subinvariance check", cmd_slices);
  slices->add_option("--samples", cfg.samples, "number of sampled words")->check(CLI::Range(1, 1000));
  auto* check = add("check", "separation and mass diagnostics", cmd_check);
  check->add_flag("--mass", cfg.mass, "mass distribution ratios");
  check->add_flag("--obnc", cfg.obnc, "open bounded neighbourhood counts");
  check->add_flag("--proj", cfg.proj, "projected density ratios");
  check->add_flag("--ssc", cfg.ssc, "strong separation");
  add("verify-example", "hypothesis values of the worked examples", cmd_verify_example);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }
  try {
    for (const auto& [sub, fn] : commands)
      if (sub->parsed()) return fn(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

#include "blowup/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/report.hpp"
#include "blowup/shooting.hpp"

namespace blowup {

namespace {

struct RunConfig {
  std::string command;
  Parameters params;
  std::optional<double> xi0;
  std::optional<std::pair<double, double>> bracket;
  bool auto_bracket = false;
  std::vector<double> grid;
  bool refine = false;
  double tol_rel = 1e-9, tol_abs = 1e-12, tol_good = 1e-6;
  std::filesystem::path out = ".";
  bool out_given = false;
  long seed = 0;
  int workers = 0;
  int fan = 8;
  int launches = 10;
};

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidParameters, "bad value for " + key + ": '" + s + "'");
  }
}

bool to_bool(const std::string& s) { return s == "1" || s == "true" || s == "yes" || s == "on"; }

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = s.find(':', start);
    parts.push_back(to_double("grid", s.substr(start, colon - start)));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) fail(ErrorCode::InvalidParameters, "grid must be lo:hi:step");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || !(hi >= lo)) fail(ErrorCode::InvalidParameters, "grid needs lo <= hi and step > 0");
  std::vector<double> g;
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

std::pair<double, double> parse_pair(const std::string& key, const std::string& s) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos) fail(ErrorCode::InvalidParameters, key + " must be lo:hi");
  return {to_double(key, s.substr(0, colon)), to_double(key, s.substr(colon + 1))};
}

/// Writes every output file of one command; the only place files are written.
class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void put(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir_);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) fail(ErrorCode::InvalidParameters, "cannot write " + (dir_ / name).string());
    f << content;
  }

 private:
  std::filesystem::path dir_;
};

std::string gfmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json run_meta(const RunConfig& c) {
  return {{"command", c.command},
          {"seed", c.seed},
          {"tol_rel", c.tol_rel},
          {"tol_abs", c.tol_abs}};
}

int cmd_analyze(const RunConfig& c, std::ostream& out) {
  Json j = analyze_report(c.params);
  j["run"] = run_meta(c);
  const std::string text = dump_json(j);
  out << text;
  if (c.out_given) Writer(c.out).put("analyze.json", text);
  return kExitOk;
}

int cmd_shoot(const RunConfig& c, std::ostream& out) {
  derive_exponents(c.params);
  require_analyzable(c.params);
  if (classify_regime(c.params) != Regime::Supercritical)
    fail(ErrorCode::RegimeMismatch, "backward shooting needs m+p>2; use probe-nonexistence for m+p<2");
  ShootOptions opt;
  opt.ode.rtol = c.tol_rel;
  opt.ode.atol = c.tol_abs;
  opt.tol_good = c.tol_good;
  Json j;
  j["run"] = run_meta(c);
  j["params"] = to_json(c.params);
  j["barriers"] = to_json(barrier_constants(c.params));
  ShootResult r;
  if (c.xi0) {
    j["mode"] = "single";
    r = shoot_backward(*c.xi0, c.params, opt);
  } else {
    j["mode"] = "bisection";
    GoodType1 g;
    try {
      g = find_good_type1(c.params, c.bracket, 1e-8, opt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BracketInvalid && !c.bracket) throw Error(ErrorCode::Undecided, e.what());
      throw;
    }
    j["xi0_star"] = g.xi0_star;
    j["bracket"] = Json::array({g.bracket.first, g.bracket.second});
    j["iterations"] = g.iterations;
    r = g.result;
  }
  j["result"] = to_json(r);
  if (r.profile.interface && r.profile.interface->type != InterfaceType::Ambiguous) {
    try {
      const InterfaceCheck ic = verify_interface_equation(r.profile);
      j["interface_check"] = {{"lhs", ic.lhs}, {"rhs", ic.rhs}, {"rel_error", ic.rel_error}, {"probe_time", ic.probe_time}};
    } catch (const Error& e) {
      j["interface_check"] = {{"error", e.what()}};
    }
  }
  Writer w(c.out);
  w.put("profile.csv", profile_csv(r.profile));
  w.put("shoot.json", dump_json(j));
  out << "outcome " << to_string(r.outcome) << " at xi0=" << gfmt(r.xi0) << " (v0=" << gfmt(r.v0) << ")\n";
  if (r.outcome == ShootOutcome::BackwardSignChange)
    out << "backward sign change at xi1=" << gfmt(r.xi1) << "\n";
  else
    out << "f(0)=" << gfmt(r.f0) << " f'(0)=" << gfmt(r.df0) << "\n";
  if (r.profile.interface)
    out << "interface " << to_string(r.profile.interface->type) << " exponent " << gfmt(r.profile.interface->exponent)
        << "\n";
  out << "wrote " << (c.out / "profile.csv").string() << " and " << (c.out / "shoot.json").string() << "\n";
  return kExitOk;
}

struct Figure {
  double sigma = 0.0;
  std::vector<std::pair<std::string, Orbit>> orbits;
  std::vector<FanEntry> fan;
  std::optional<Profile> p2_profile;
  std::string error;
};

Figure build_figure(const Parameters& base, double sigma, int fan) {
  Figure f;
  f.sigma = sigma;
  try {
    const Parameters par = make_parameters(base.m, base.p, sigma);
    P2Classification p2 = classify_p2_orbit(par);
    if (p2.endpoint == Endpoint::P0 || p2.endpoint == Endpoint::P1) {
      try {
        f.p2_profile = reconstruct_profile(p2.orbit, par);
      } catch (const Error&) {
      }
    }
    f.orbits.emplace_back("P2", std::move(p2.orbit));
    if (fan > 0) {
      const std::vector<double> Ks = fan_constants(fan);
      f.fan = p0_fan(par, Ks, 1);
      for (double K : Ks)
        f.orbits.emplace_back("P0 K=" + gfmt(K),
                              integrate_from_p0(local_expansion(ExpansionKind::Beh02, par, {K}), par,
                                                s1_stop_conditions(par)));
    }
  } catch (const Error& e) {
    f.error = e.what();
  }
  return f;
}

std::string orbits_csv(const std::vector<std::pair<std::string, Orbit>>& orbits) {
  std::string s = "orbit,eta,X,Y,Z\n";
  for (const auto& [label, o] : orbits) {
    const std::string body = orbit_csv(o);
    std::size_t pos = body.find('\n') + 1;
    while (pos < body.size()) {
      const std::size_t nl = body.find('\n', pos);
      s += label + "," + body.substr(pos, nl - pos + 1);
      pos = nl + 1;
    }
  }
  return s;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (c.grid.empty()) fail(ErrorCode::InvalidParameters, "sweep needs --grid lo:hi:step");
  const Parameters base = c.params;
  if (base.m + base.p < 2.0)
    fail(ErrorCode::RegimeMismatch, "sweep needs m+p>2; for m+p<2 run probe-nonexistence instead");
  for (double s : c.grid) derive_exponents(make_parameters(base.m, base.p, s));
  RegimeReport rep = sweep_sigma(base, c.grid, c.refine, 1e-3, c.workers);

  std::vector<double> fig_sigmas = c.grid;
  if (rep.sigma_star_bracket) fig_sigmas.push_back(rep.sigma_star_bracket->first);
  std::vector<Figure> figs(fig_sigmas.size());
  parallel_for(static_cast<int>(fig_sigmas.size()), c.workers,
               [&](int i) { figs[i] = build_figure(base, fig_sigmas[i], c.fan); });

  Json j = to_json(rep);
  j["run"] = run_meta(c);
  Json figures = Json::array();
  Writer w(c.out);
  for (const Figure& f : figs) {
    const std::string tag = gfmt(f.sigma);
    Json fj{{"sigma", f.sigma}, {"svg", "portrait_" + tag + ".svg"}, {"data", "portrait_" + tag + ".csv"}};
    if (!f.error.empty()) {
      fj["error"] = f.error;
      figures.push_back(fj);
      continue;
    }
    Json fan = Json::array();
    for (const auto& e : f.fan) fan.push_back(to_json(e));
    fj["p0_fan"] = fan;
    fj["p2_profile"] = f.p2_profile ? profile_summary(*f.p2_profile) : Json(nullptr);
    const Parameters par = make_parameters(base.m, base.p, f.sigma);
    w.put("portrait_" + tag + ".svg", phase_portrait_svg(par, f.orbits));
    w.put("portrait_" + tag + ".csv", orbits_csv(f.orbits));
    if (f.p2_profile) {
      w.put("profile_" + tag + ".csv", profile_csv(*f.p2_profile));
      fj["profile_data"] = "profile_" + tag + ".csv";
    }
    figures.push_back(fj);
  }
  j["figures"] = figures;
  w.put("sweep.json", dump_json(j));
  w.put("sweep.csv", sweep_csv(rep));

  out << "sigma      endpoint   Uv_crossing\n";
  for (const auto& e : rep.entries) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10.6g %-10s %s%s\n", e.sigma, to_string(e.endpoint),
                  e.uv_crossing ? gfmt(*e.uv_crossing).c_str() : "-",
                  e.error.empty() ? "" : ("  error: " + e.error).c_str());
    out << line;
  }
  if (rep.sigma_star_bracket)
    out << "sigma* in [" << gfmt(rep.sigma_star_bracket->first) << ", " << gfmt(rep.sigma_star_bracket->second)
        << "]\n";
  else
    out << "no P0 -> Q3 transition on the grid\n";
  if (rep.multiple_transitions) out << "warning: multiple endpoint transitions\n";
  out << "wrote sweep.json, sweep.csv and " << figs.size() << " portraits to " << c.out.string() << "\n";
  return 2 * rep.undecided > static_cast<int>(rep.entries.size()) ? kExitNumerical : kExitOk;
}

int cmd_probe(const RunConfig& c, std::ostream& out) {
  derive_exponents(c.params);
  const NonexistenceReport r = probe_nonexistence(c.params, c.launches);
  Json j = to_json(r);
  j["run"] = run_meta(c);
  j["params"] = to_json(c.params);
  Writer(c.out).put("nonexistence.json", dump_json(j));
  out << r.points.size() << " points at infinity\n";
  for (const auto& p : r.points) {
    out << "  " << p.label << "  lambda=(";
    for (int k = 0; k < 3; ++k) out << (k ? ", " : "") << gfmt(p.eigenvalues[k].real());
    out << ")  " << to_string(p.interpretation) << "\n";
  }
  out << "candidate " << r.candidate_label << " eigenvalues (" << gfmt(r.candidate_eigenvalues[0]) << ", "
      << gfmt(r.candidate_eigenvalues[1]) << ", " << gfmt(r.candidate_eigenvalues[2]) << ")"
      << (r.candidate_unstable_in_x0 ? ", unstable manifold inside {x=0}" : "") << "\n";
  out << "kind     xi0        outcome\n";
  for (const auto& l : r.launches) {
    char line[128];
    std::snprintf(line, sizeof line, "%-8s %-10.4g %s\n", l.kind.c_str(), l.xi0, l.outcome.c_str());
    out << line;
  }
  out << r.failures << "/" << r.launches.size() << " launches fail to give a good profile\n";
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameters:
    case ErrorCode::SigmaOutOfRange:
    case ErrorCode::CriticalRegime:
    case ErrorCode::RegimeMismatch:
    case ErrorCode::BracketInvalid: return kExitUsage;
    default: return kExitNumerical;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-similar blow-up profile analysis", "blowup"};
  std::string command;
  app.add_option("command", command, "analyze | shoot | sweep | probe-nonexistence")->required();

  const std::vector<std::pair<std::string, std::string>> valued = {
      {"m", "diffusion exponent, > 1 (default 3)"},
      {"p", "reaction exponent, in (0, 1) (default 0.5)"},
      {"sigma", "weight exponent (default 1)"},
      {"xi0", "interface position for a single backward shot"},
      {"bracket", "xi0 bracket lo:hi for the good-profile search"},
      {"grid", "sigma grid lo:hi:step for sweep"},
      {"tol-rel", "ODE relative tolerance (default 1e-9)"},
      {"tol-abs", "ODE absolute tolerance (default 1e-12)"},
      {"tol-good", "good-profile bound on |f'(0)|/max(1, f(0)) (default 1e-6)"},
      {"out", "output directory"},
      {"seed", "recorded in run metadata"},
      {"workers", "worker threads (default: hardware concurrency)"},
      {"fan", "P0 fan size per portrait (default 8)"},
      {"launches", "launches for probe-nonexistence (default 10)"}};
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [k, help] : valued) opts[k] = app.add_option("--" + k, raw[k], help);
  bool refine = false, auto_bracket = false;
  opts["refine"] = app.add_flag("--refine", refine, "refine the sigma* bracket by bisection");
  opts["auto-bracket"] = app.add_flag("--auto-bracket", auto_bracket, "bracket xi0 automatically");
  std::string config;
  app.add_option("--config", config, "key=value file; flags override it");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    RunConfig c;
    c.command = command;
    std::map<std::string, std::string> kv;
    if (!config.empty()) kv = load_key_values(config);
    for (const auto& [k, o] : opts)
      if (o->count() == 0 && kv.count(k)) raw[k] = kv[k];
    if (opts["refine"]->count() == 0 && kv.count("refine")) refine = to_bool(kv["refine"]);
    if (opts["auto-bracket"]->count() == 0 && kv.count("auto-bracket")) auto_bracket = to_bool(kv["auto-bracket"]);

    auto has = [&](const char* k) { return !raw[k].empty(); };
    if (has("m")) c.params.m = to_double("m", raw["m"]);
    if (has("p")) c.params.p = to_double("p", raw["p"]);
    if (has("sigma")) c.params.sigma = to_double("sigma", raw["sigma"]);
    c.params = make_parameters(c.params.m, c.params.p, c.params.sigma);
    if (has("xi0")) c.xi0 = to_double("xi0", raw["xi0"]);
    if (has("bracket")) c.bracket = parse_pair("bracket", raw["bracket"]);
    if (has("grid")) c.grid = parse_grid(raw["grid"]);
    if (has("tol-rel")) c.tol_rel = to_double("tol-rel", raw["tol-rel"]);
    if (has("tol-abs")) c.tol_abs = to_double("tol-abs", raw["tol-abs"]);
    if (has("tol-good")) c.tol_good = to_double("tol-good", raw["tol-good"]);
    if (!(c.tol_rel > 0 && c.tol_abs > 0 && c.tol_good > 0))
      fail(ErrorCode::InvalidParameters, "tolerances must be positive");
    if (has("out")) {
      c.out = raw["out"];
      c.out_given = true;
    }
    if (has("seed")) c.seed = std::lround(to_double("seed", raw["seed"]));
    if (has("workers")) c.workers = static_cast<int>(std::lround(to_double("workers", raw["workers"])));
    if (has("fan")) c.fan = static_cast<int>(std::lround(to_double("fan", raw["fan"])));
    if (has("launches")) c.launches = static_cast<int>(std::lround(to_double("launches", raw["launches"])));
    c.refine = refine;
    c.auto_bracket = auto_bracket;

    if (command == "analyze") return cmd_analyze(c, out);
    if (command == "shoot") {
      if (!c.xi0 && !c.bracket && !c.auto_bracket)
        fail(ErrorCode::InvalidParameters, "shoot needs --xi0, --bracket lo:hi or --auto-bracket");
      return cmd_shoot(c, out);
    }
    if (command == "sweep") return cmd_sweep(c, out);
    if (command == "probe-nonexistence") return cmd_probe(c, out);
    err << "error: unknown command '" << command << "' (analyze, shoot, sweep, probe-nonexistence)\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    if (e.code() == ErrorCode::RegimeMismatch && command == "sweep")
      err << "hint: run probe-nonexistence for m+p<2\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace blowup

#include "blowup/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt(v);
}

void dump_rec(const Json& j, int indent, std::string& out) {
  const std::string pad(2 * (indent + 1), ' ');
  const std::string close(2 * indent, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_rec(it.value(), indent + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_rec(j[i], indent + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_rec(j[i], indent + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: out += fmt(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

Json complex_pair(const cplx& z) { return Json::array({z.real(), z.imag()}); }

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json matrix(const Eigen::Matrix3d& m) {
  Json a = Json::array();
  for (int i = 0; i < 3; ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string portrait_name(PortraitTag t) {
  switch (t) {
    case PortraitTag::Portrait8_EllipticSector: return "portrait 8 (elliptic sector)";
    case PortraitTag::Portrait3_NoReentry: return "portrait 3 (no re-entry)";
    default: return "unclassified";
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_rec(j, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Parameters& par) { return {{"m", par.m}, {"p", par.p}, {"sigma", par.sigma}}; }

Json to_json(const Exponents& ex) { return {{"alpha", ex.alpha}, {"beta", ex.beta}, {"T", ex.T}}; }

Json to_json(const CriticalPointReport& pt) {
  Json j;
  j["system"] = to_string(pt.system);
  j["label"] = pt.label;
  j["at_infinity"] = pt.at_infinity;
  j["location"] = vec(pt.location);
  if (pt.at_infinity) {
    j["chart"] = {{"base", to_string(pt.chart.base)}, {"pivot", pt.chart.pivot}, {"sign", pt.chart.sign}};
    j["chart_coords"] = vec(pt.chart_coords);
    if (pt.native_chart) j["native_chart"] = to_string(*pt.native_chart);
  }
  j["linearized"] = pt.linearized;
  if (pt.linearized) {
    j["matrix"] = matrix(pt.matrix);
    Json ev = Json::array(), vecs = Json::array();
    for (int k = 0; k < 3; ++k) {
      ev.push_back(complex_pair(pt.eigenvalues[k]));
      Json col = Json::array();
      for (int i = 0; i < 3; ++i) col.push_back(complex_pair(pt.eigenvectors(i, k)));
      vecs.push_back(col);
    }
    j["eigenvalues"] = ev;
    j["eigenvectors"] = vecs;
    j["manifolds"] = {{"stable", pt.dims.stable}, {"unstable", pt.dims.unstable}, {"center", pt.dims.center}};
  }
  j["interpretation"] = to_string(pt.interpretation);
  j["residual"] = pt.residual;
  return j;
}

Json to_json(const DateInvariants& inv, const Classification& cl) {
  Json j;
  j["p"] = vec(inv.p);
  Json q = Json::array();
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) q.push_back(inv.Q[k][a][b]);
  j["Q"] = q;
  j["h"] = Json::array({Json::array({inv.h(0, 0), inv.h(0, 1)}), Json::array({inv.h(1, 0), inv.h(1, 1)})});
  j["H"] = inv.H;
  j["D"] = inv.D;
  j["F"] = inv.F;
  j["K1"] = inv.K[0];
  j["K2"] = inv.K[1];
  j["K3"] = inv.K[2];
  j["signs"] = cl.signs;
  j["portrait_tag"] = to_string(cl.tag);
  j["portrait"] = portrait_name(cl.tag);
  return j;
}

Json to_json(const InterfaceFit& fit) {
  return {{"xi0", fit.xi0}, {"exponent", fit.exponent}, {"r2", fit.r2}, {"type", to_string(fit.type)}};
}

Json to_json(const Termination& t) {
  Json j{{"kind", to_string(t.kind)}, {"label", t.label}, {"describe", t.describe()}};
  if (t.kind == TerminationKind::EnteredPoint) j["distance"] = t.distance;
  if (t.coord >= 0) j["coord"] = t.coord;
  return j;
}

Json profile_summary(const Profile& pr) {
  Json j;
  j["params"] = to_json(pr.params);
  j["exponents"] = to_json(pr.exponents);
  j["origin_kind"] = to_string(pr.origin_kind);
  j["samples"] = pr.samples.size();
  j["good"] = pr.good();
  j["interface"] = pr.interface ? to_json(*pr.interface) : Json(nullptr);
  if (!pr.samples.empty()) {
    j["xi_min"] = pr.samples.front().xi;
    j["xi_max"] = pr.samples.back().xi;
    j["f_at_min"] = pr.samples.front().f;
    j["df_at_min"] = pr.samples.front().df;
  }
  return j;
}

Json to_json(const ShootResult& r) {
  Json j{{"xi0", r.xi0}, {"v0", r.v0}, {"outcome", to_string(r.outcome)}};
  switch (r.outcome) {
    case ShootOutcome::BackwardSignChange:
      j["xi1"] = r.xi1;
      j["dfm_at_xi1"] = r.dfm1;
      break;
    default:
      j["f0"] = r.f0;
      j["df0"] = r.df0;
      break;
  }
  j["profile"] = profile_summary(r.profile);
  return j;
}

Json to_json(const BarrierConstants& b) {
  return {{"k", b.k},
          {"k1", b.k1},
          {"U_P2", b.u_p2},
          {"U_P2_over_k", b.u_p2_over_k},
          {"U_P2_over_k_closed", b.u_p2_over_k_closed},
          {"U0", b.u0},
          {"v0bar", b.v0bar},
          {"plane1", {{"D", b.plane1_d}, {"E", b.plane1_e}}},
          {"plane2", {{"B", b.plane2_b}, {"C", b.plane2_c}}},
          {"Ybar0", b.y0bar}};
}

Json to_json(const RegimeReport& r) {
  Json j;
  j["base"] = {{"m", r.base.m}, {"p", r.base.p}};
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json x{{"sigma", e.sigma}, {"endpoint", to_string(e.endpoint)}, {"uv_crossing", opt(e.uv_crossing)},
           {"barriers", to_json(e.barriers)}};
    x["interface"] = e.interface ? to_json(*e.interface) : Json(nullptr);
    if (!e.error.empty()) x["error"] = e.error;
    entries.push_back(x);
  }
  j["entries"] = entries;
  if (r.sigma_star_bracket)
    j["sigma_star_bracket"] = Json::array({r.sigma_star_bracket->first, r.sigma_star_bracket->second});
  else
    j["sigma_star_bracket"] = nullptr;
  j["transitions"] = r.transitions;
  j["multiple_transitions"] = r.multiple_transitions;
  j["undecided"] = r.undecided;
  return j;
}

Json to_json(const FanEntry& f) {
  Json j{{"K", f.K}, {"endpoint", to_string(f.endpoint)}, {"termination", to_json(f.termination)},
         {"origin_exponent", opt(f.origin_exponent)}};
  j["interface"] = f.interface ? to_json(*f.interface) : Json(nullptr);
  if (!f.error.empty()) j["error"] = f.error;
  return j;
}

Json to_json(const NonexistenceReport& r) {
  Json j;
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back(to_json(p));
  j["points"] = pts;
  j["point_count"] = r.points.size();
  j["candidate"] = {{"label", r.candidate_label},
                    {"eigenvalues", Json::array({r.candidate_eigenvalues[0], r.candidate_eigenvalues[1],
                                                 r.candidate_eigenvalues[2]})},
                    {"unstable_in_x0", r.candidate_unstable_in_x0}};
  j["any_profile_point"] = r.any_profile_point;
  Json launches = Json::array();
  for (const auto& l : r.launches)
    launches.push_back({{"kind", l.kind}, {"xi0", l.xi0}, {"outcome", l.outcome}, {"good", l.good}});
  j["launches"] = launches;
  j["failures"] = r.failures;
  j["conclusion"] = (!r.any_profile_point && r.failures == static_cast<int>(r.launches.size())) ? "NoProfile"
                                                                                                 : "Inconclusive";
  return j;
}

Json analyze_report(const Parameters& par) {
  const Exponents ex = derive_exponents(par);
  require_analyzable(par);
  const Regime regime = classify_regime(par);
  const SystemId sys = regime == Regime::Supercritical ? SystemId::S1 : SystemId::S5;
  Json j;
  j["params"] = to_json(par);
  j["exponents"] = to_json(ex);
  j["regime"] = to_string(regime);
  j["sigma_lower_bound"] = sigma_lower_bound(par);
  j["phase_system"] = to_string(sys);
  Json fin = Json::array(), inf = Json::array();
  for (auto& pt : enumerate_finite(sys, par)) fin.push_back(to_json(pt.linearized ? pt : linearize(pt, par)));
  for (auto& pt : enumerate_infinity(sys, par)) inf.push_back(to_json(pt.linearized ? pt : linearize(pt, par)));
  j["finite_points"] = fin;
  j["infinity_points"] = inf;
  j["infinity_point_count"] = inf.size();
  const DateInvariants inv = invariants(p0_center_system(par));
  j["date_invariants"] = to_json(inv, classify(inv));
  if (regime == Regime::Supercritical) j["barriers"] = to_json(barrier_constants(par));
  return j;
}

std::string profile_csv(const Profile& pr) {
  std::string out = "xi,f,df\n";
  for (const auto& s : pr.samples) out += csv_num(s.xi) + "," + csv_num(s.f) + "," + csv_num(s.df) + "\n";
  return out;
}

std::string orbit_csv(const Orbit& o) {
  std::string out = "eta,X,Y,Z\n";
  for (const auto& s : o.samples)
    out += csv_num(s.eta) + "," + csv_num(s.coords[0]) + "," + csv_num(s.coords[1]) + "," + csv_num(s.coords[2]) +
           "\n";
  return out;
}

std::string sweep_csv(const RegimeReport& r) {
  std::string out = "sigma,endpoint,xi0_star_if_any,k1,Uv_crossing\n";
  for (const auto& e : r.entries) {
    out += csv_num(e.sigma) + "," + to_string(e.endpoint) + ",";
    if (e.interface) out += csv_num(e.interface->xi0);
    out += "," + csv_num(e.barriers.k1) + ",";
    if (e.uv_crossing) out += csv_num(*e.uv_crossing);
    out += "\n";
  }
  return out;
}

namespace {

constexpr double kWidth = 800.0, kHeight = 600.0;

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(lo < hi)) {
    const double c = std::isfinite(lo) ? lo : 0.0;
    return {c - 1.0, c + 1.0};
  }
  const double d = 0.05 * (hi - lo);
  return {lo - d, hi + d};
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, const std::string& title) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
       "viewBox=\"0 0 800 600\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
    << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << esc(title)
    << "</text>\n";
  const int n = std::max<int>(1, static_cast<int>(panels.size()));
  const double cell = kWidth / n;
  for (int k = 0; k < static_cast<int>(panels.size()); ++k) {
    const Panel& pn = panels[k];
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    auto grow = [&](double x, double y) {
      if (!std::isfinite(x) || !std::isfinite(y)) return;
      xlo = std::min(xlo, x), xhi = std::max(xhi, x), ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    };
    for (const auto& s : pn.series)
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) grow(s.x[i], s.y[i]);
    for (const auto& m : pn.markers) grow(m.x, m.y);
    auto [x0, x1] = pn.xrange.first < pn.xrange.second ? pn.xrange : padded(xlo, xhi);
    auto [y0, y1] = pn.yrange.first < pn.yrange.second ? pn.yrange : padded(ylo, yhi);
    const double left = k * cell + 75.0, right = (k + 1) * cell - 20.0, top = 50.0, bottom = kHeight - 60.0;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
    auto sy = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };
    auto clampx = [&](double v) { return std::clamp(v, left - 5.0, right + 5.0); };
    auto clampy = [&](double v) { return std::clamp(v, top - 5.0, bottom + 5.0); };
    o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(right - left) << "\" height=\""
      << px(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(0.5 * (left + right)) << "\" y=\"" << px(top - 8) << "\" text-anchor=\"middle\">"
      << esc(pn.title) << "</text>\n";
    o << "<text x=\"" << px(left) << "\" y=\"" << px(bottom + 15) << "\" text-anchor=\"start\">" << tick(x0)
      << "</text>\n";
    o << "<text x=\"" << px(right) << "\" y=\"" << px(bottom + 15) << "\" text-anchor=\"end\">" << tick(x1)
      << "</text>\n";
    o << "<text x=\"" << px(0.5 * (left + right)) << "\" y=\"" << px(bottom + 35) << "\" text-anchor=\"middle\">"
      << esc(pn.xlabel) << "</text>\n";
    o << "<text x=\"" << px(left - 4) << "\" y=\"" << px(bottom) << "\" text-anchor=\"end\">" << tick(y0)
      << "</text>\n";
    o << "<text x=\"" << px(left - 4) << "\" y=\"" << px(top + 10) << "\" text-anchor=\"end\">" << tick(y1)
      << "</text>\n";
    o << "<text x=\"" << px(left - 30) << "\" y=\"" << px(0.5 * (top + bottom)) << "\" text-anchor=\"middle\">"
      << esc(pn.ylabel) << "</text>\n";
    if (x0 < 0 && x1 > 0)
      o << "<line x1=\"" << px(sx(0)) << "\" y1=\"" << px(top) << "\" x2=\"" << px(sx(0)) << "\" y2=\""
        << px(bottom) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4,3\"/>\n";
    if (y0 < 0 && y1 > 0)
      o << "<line x1=\"" << px(left) << "\" y1=\"" << px(sy(0)) << "\" x2=\"" << px(right) << "\" y2=\""
        << px(sy(0)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4,3\"/>\n";
    for (const auto& s : pn.series) {
      std::string d;
      bool pen = false;
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          pen = false;
          continue;
        }
        d += (pen ? " L" : " M") + px(clampx(sx(s.x[i]))) + "," + px(clampy(sy(s.y[i])));
        pen = true;
      }
      if (d.empty()) continue;
      o << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\">";
      if (!s.label.empty()) o << "<title>" << esc(s.label) << "</title>";
      o << "</path>\n";
    }
    for (const auto& m : pn.markers) {
      if (m.x < x0 || m.x > x1 || m.y < y0 || m.y > y1) continue;
      o << "<circle cx=\"" << px(sx(m.x)) << "\" cy=\"" << px(sy(m.y)) << "\" r=\"3.5\" fill=\"black\"/>\n";
      o << "<text x=\"" << px(sx(m.x) + 5) << "\" y=\"" << px(sy(m.y) - 5) << "\">" << esc(m.label) << "</text>\n";
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string phase_portrait_svg(const Parameters& par, const std::vector<std::pair<std::string, Orbit>>& orbits) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
                                  "#17becf"};
  Panel yx{"(Y, X)", "Y", "X", {}, {}, {0, 0}, {0, 0}};
  Panel yz{"(Y, Z)", "Y", "Z", {}, {}, {0, 0}, {0, 0}};
  std::size_t c = 0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& [label, orbit] : orbits) {
    Series a, b;
    a.color = b.color = palette[c++ % 8];
    a.label = b.label = label;
    for (const auto& s : orbit.samples) {
      a.x.push_back(s.coords[1]);
      a.y.push_back(s.coords[0]);
      b.x.push_back(s.coords[1]);
      b.y.push_back(s.coords[2]);
      ymin = std::min(ymin, s.coords[1]);
      ymax = std::max(ymax, s.coords[1]);
    }
    yx.series.push_back(std::move(a));
    yz.series.push_back(std::move(b));
  }
  // Escaping orbits reach |Y| = 1e3; the window keeps the finite points readable.
  const Coefficients co = coefficients(par);
  const Exponents ex = derive_exponents(par);
  const Eigen::Vector3d p1(0.0, -ex.beta / ex.alpha, 0.0);
  const Eigen::Vector3d p2 = p2_location(co);
  const double lo = std::max(std::min(ymin, p1[1]), p1[1] - 5.0), hi = std::min(std::max(ymax, p2[1]), 5.0);
  yx.xrange = yz.xrange = padded(lo, hi);
  for (Panel* pn : {&yx, &yz}) {
    const int k = pn == &yx ? 0 : 2;
    pn->markers.push_back({0.0, 0.0, "P0"});
    pn->markers.push_back({p1[1], p1[k], "P1"});
    pn->markers.push_back({p2[1], p2[k], "P2"});
  }
  double xmax = 0.0, zmax = 0.0;
  for (const auto& [label, orbit] : orbits)
    for (const auto& s : orbit.samples)
      if (s.coords[1] >= lo && s.coords[1] <= hi) {
        xmax = std::max(xmax, s.coords[0]);
        zmax = std::max(zmax, s.coords[2]);
      }
  yx.yrange = padded(0.0, std::max(xmax, p2[0]));
  yz.yrange = padded(0.0, std::max(zmax, 1e-3));
  char title[128];
  std::snprintf(title, sizeof title, "Phase portrait m=%g p=%g sigma=%g", par.m, par.p, par.sigma);
  return render_svg({yx, yz}, title);
}

}  // namespace blowup

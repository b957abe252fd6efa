// Acceptance run: one PASS/FAIL line per criterion, non-zero exit when any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/cli.hpp"
#include "blowup/critical_points.hpp"
#include "blowup/date_classifier.hpp"
#include "blowup/errors.hpp"
#include "blowup/integrator.hpp"
#include "blowup/shooting.hpp"
#include "support.hpp"

using namespace blowup;

namespace {

const Parameters ref{3, 0.5, 1};

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> real_sorted(const std::array<cplx, 3>& v) {
  std::vector<double> r{v[0].real(), v[1].real(), v[2].real()};
  std::sort(r.begin(), r.end());
  return r;
}

const CriticalPointReport& find(const std::vector<CriticalPointReport>& v, const std::string& label) {
  const auto it = std::find_if(v.begin(), v.end(), [&](const auto& r) { return r.label == label; });
  if (it == v.end()) fail(ErrorCode::NotACriticalPoint, "missing point " + label);
  return *it;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Verdict eigenvalue_oracle() {
  Verdict v;
  double worst = 0.0;
  for (const Parameters& par : testing::supercritical_grid()) {
    const Coefficients c = coefficients(par);
    const double m = par.m, p = par.p, s = par.sigma, a = c.alpha, b = c.beta;
    const auto pts = enumerate_finite(SystemId::S1, par);
    std::vector<double> want{-b * (m - 1) / a, b / a, -(m + p - 2) * b / a};
    std::sort(want.begin(), want.end());
    auto got = real_sorted(linearize(find(pts, "P1"), par).eigenvalues);
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    // P2: trace and determinant of the planar block and the transverse eigenvalue.
    const double S = -((3 * m + 1) + 2 * (m + 1) * b) / (2 * (m + 1) * a);
    const double P = (m - 1) / (2 * (m + 1) * a * a);
    const double disc = std::sqrt(S * S - 4 * P);
    want = {(S - disc) / 2, (S + disc) / 2, (s * (m - 1) + 2 * (p - 1)) / (2 * (m + 1) * a)};
    std::sort(want.begin(), want.end());
    got = real_sorted(linearize(find(pts, "P2"), par).eigenvalues);
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  v.require(worst < 1e-10, "grid deviation " + fmt("%.3g", worst));
  const auto spot = real_sorted(linearize(find(enumerate_finite(SystemId::S1, ref), "P1"), ref).eigenvalues);
  const std::vector<double> closed{-5.0 / 3, -5.0 / 4, 5.0 / 6};
  std::vector<double> ps = closed;
  std::sort(ps.begin(), ps.end());
  double sd = 0.0;
  for (int i = 0; i < 3; ++i) sd = std::max(sd, std::abs(spot[i] - ps[i]));
  v.require(sd < 1e-10, "P1 spot values");
  v.note("125 parameter sets, worst deviation " + fmt("%.2e", worst) + "; P1(3,0.5,1) = (-5/3, 5/6, -5/4) to " +
         fmt("%.1e", sd));
  return v;
}

Verdict date_oracle() {
  Verdict v;
  double worst = 0.0;
  bool super_ok = true, sub_ok = true;
  for (const Parameters& par : testing::supercritical_grid()) {
    const auto inv = invariants(p0_center_system(par));
    const auto cf = p0_closed_forms(par);
    for (auto [a, b] : {std::pair{inv.h(0, 0), cf.h11}, {inv.h(0, 1), cf.h12}, {inv.h(1, 1), cf.h22},
                        {inv.H, cf.H}, {inv.D, cf.D}, {inv.F, cf.F}, {inv.K[1], cf.K2}, {inv.K[2], cf.K3}})
      worst = std::max(worst, rel(a, b));
    super_ok = super_ok && inv.D < 0 && inv.K[1] < 0 && inv.K[2] < 0 &&
               classify(inv).tag == PortraitTag::Portrait8_EllipticSector;
  }
  for (const Parameters& par : testing::subcritical_grid()) {
    const auto inv = invariants(p0_center_system(par));
    worst = std::max(worst, rel(inv.K[1], p0_closed_forms(par).K2));
    sub_ok = sub_ok && inv.K[1] > 0 && classify(inv).tag == PortraitTag::Portrait3_NoReentry;
  }
  const auto inv = invariants(p0_center_system(ref));
  v.require(worst < 1e-12, "closed forms " + fmt("%.3g", worst));
  v.require(rel(inv.D, -1.0 / 12) < 1e-12 && rel(inv.K[1], -113.90625) < 1e-12 && rel(inv.K[2], -243) < 1e-12,
            "spot values");
  v.require(super_ok, "supercritical sign pattern");
  v.require(sub_ok, "subcritical sign pattern");
  v.note("worst closed-form deviation " + fmt("%.2e", worst) + "; D=" + fmt("%.6g", inv.D) + " K2=" +
         fmt("%.8g", inv.K[1]) + " K3=" + fmt("%.6g", inv.K[2]) + "; portrait 8 on 125 supercritical, 3 on 125 subcritical");
  return v;
}

std::vector<Profile> fan_profiles(const Parameters& par, std::vector<FanEntry>& fan) {
  std::vector<Profile> out;
  for (const auto& f : fan) {
    const Orbit o = integrate_from_p0(local_expansion(ExpansionKind::Beh02, par, {f.K}), par, s1_stop_conditions(par));
    if (endpoint_of(o) == Endpoint::P0) out.push_back(reconstruct_profile(o, par));
  }
  return out;
}

Verdict fan_sigma1() {
  Verdict v;
  std::vector<FanEntry> fan = p0_fan(ref, fan_constants(8), 0);
  int returned = 0, origin_ok = 0, type2 = 0;
  double worst_origin = 0.0, worst_iface = 0.0;
  for (const auto& f : fan) {
    const Orbit o = integrate_from_p0(local_expansion(ExpansionKind::Beh02, ref, {f.K}), ref, s1_stop_conditions(ref));
    const auto& t = o.termination;
    // Final approach: after the last {Y=0} crossing the orbit stays in Y<0.
    const double eta_last = o.y0_crossings.empty() ? INFINITY : o.y0_crossings.back().eta;
    bool below = !o.y0_crossings.empty();
    for (const auto& s : o.samples)
      if (s.eta > eta_last + 1e-12) below = below && s.coords[1] < 0;
    if (t.kind == TerminationKind::EnteredPoint && t.label == "P0" && t.distance < 1e-3 && below) ++returned;
    if (f.origin_exponent) {
      const double e = std::abs(*f.origin_exponent - 1.2) / 1.2;
      worst_origin = std::max(worst_origin, e);
      if (e < 0.02) ++origin_ok;
    }
    if (f.interface && f.interface->type == InterfaceType::TypeII) {
      ++type2;
      worst_iface = std::max(worst_iface, std::abs(f.interface->exponent - 2.0) / 2.0);
    }
  }
  v.require(returned == 8, std::to_string(returned) + "/8 returned to P0 through Y<0");
  v.require(origin_ok == 8, std::to_string(origin_ok) + "/8 origin exponents within 2%");
  v.require(type2 == 8 && worst_iface < 0.05, std::to_string(type2) + "/8 Type II interfaces");
  v.note(std::to_string(returned) + "/8 K in [1e-2,1e2] re-enter P0 from Y<0; origin exponent error <= " + fmt("%.2e", worst_origin) +
         " (target 1.2); interface exponent error <= " + fmt("%.2e", worst_iface) + " (target 2)");
  return v;
}

Verdict p2_orbit_sigma3() {
  Verdict v;
  const Parameters par{3, 0.5, 3};
  const P2Classification c = classify_p2_orbit(par);
  v.require(c.endpoint == Endpoint::P0, std::string("endpoint ") + to_string(c.endpoint));
  const Profile pr = reconstruct_profile(c.orbit, par);
  v.require(pr.good(), "good profile");
  v.require(pr.origin_kind == OriginKind::P2Property, "P2 property at the origin");
  v.require(pr.interface && pr.interface->type == InterfaceType::TypeII, "Type II interface");
  if (pr.interface)
    v.note("P2 orbit enters P0; profile P2property, interface TypeII at xi0=" + fmt("%.6g", pr.interface->xi0) +
           " exponent " + fmt("%.5g", pr.interface->exponent));
  return v;
}

Verdict sigma_star() {
  Verdict v;
  const RegimeReport r = sweep_sigma({3, 0.5, 1}, {1, 2, 3, 3.5, 4}, true, 1e-3, 0);
  const std::vector<Endpoint> expect{Endpoint::P0, Endpoint::P0, Endpoint::P0, Endpoint::Q3, Endpoint::Q3};
  bool same = r.entries.size() == expect.size();
  for (std::size_t i = 0; same && i < expect.size(); ++i) same = r.entries[i].endpoint == expect[i];
  v.require(same, "grid endpoints");
  v.require(r.sigma_star_bracket.has_value(), "sigma* bracket");
  if (r.sigma_star_bracket) {
    const auto [lo, hi] = *r.sigma_star_bracket;
    v.require(lo >= 3.2 && hi <= 3.3, "bracket inside [3.2, 3.3]");
    v.require(std::abs(0.5 * (lo + hi) - 3.233) <= 0.05, "estimate within 0.05 of 3.233");
    v.note("endpoints P0,P0,P0,Q3,Q3; sigma* in [" + fmt("%.6g", lo) + ", " + fmt("%.6g", hi) + "]");
  }
  const Parameters par{3, 0.5, 3.5};
  v.require(classify_p2_orbit(par).endpoint == Endpoint::Q3, "P2 orbit at sigma=3.5 reaches Q3");
  const auto fan = p0_fan(par, fan_constants(8), 0);
  int q3 = 0;
  std::optional<double> k_p0, k_q3;
  for (const auto& f : fan) {
    if (f.endpoint == Endpoint::Q3) {
      ++q3;
      if (!k_q3) k_q3 = f.K;
    } else if (f.endpoint == Endpoint::P0 && !k_q3) {
      k_p0 = f.K;
    }
  }
  v.require(q3 > 0, "P0 fan members reaching Q3");
  if (k_p0 && k_q3) {
    const FanTransition t = bisect_fan(par, *k_p0, *k_q3);
    v.require(t.boundary == Endpoint::P1 && t.interface && t.interface->type == InterfaceType::TypeI,
              "fan boundary orbit with Type I interface");
    if (t.interface)
      v.note("sigma=3.5: P2 orbit to Q3, " + std::to_string(q3) + "/8 fan members to Q3, boundary K~" +
             fmt("%.5g", t.k_lo) + " enters P1 with Type I exponent " + fmt("%.4g", t.interface->exponent));
  }
  return v;
}

GoodType1 good_type1() {
  ShootOptions opt;
  opt.tol_good = 1e-8;
  return find_good_type1(ref, std::nullopt, 1e-8, opt);
}

Verdict shooting(const GoodType1& g) {
  Verdict v;
  const Profile& pr = g.result.profile;
  const double df0 = pr.samples.front().df;
  v.require(g.result.outcome == ShootOutcome::GoodProfile || pr.origin_kind == OriginKind::P1Property, "good outcome");
  v.require(std::abs(df0) < 1e-6, "|f'(0)| = " + fmt("%.3g", std::abs(df0)));
  v.require(pr.interface && std::abs(pr.interface->exponent - 0.5) / 0.5 < 0.05, "interface exponent 0.5 +- 5%");
  const double v0bar = barrier_v0bar(ref);
  const double xi_small = xi0_from_v0(0.5 * v0bar, ref);
  const ShootResult small = shoot_backward(xi_small, ref);
  v.require(small.outcome == ShootOutcome::DecreasingToAxis && small.df0 < 0, "small xi0 decreasing");
  const ShootResult large = shoot_backward(1e6, ref);
  v.require(large.outcome == ShootOutcome::BackwardSignChange, "large xi0 sign change");
  v.note("xi0*=" + fmt("%.10g", g.xi0_star) + " f(0)=" + fmt("%.6g", pr.samples.front().f) + " |f'(0)|=" +
         fmt("%.2e", std::abs(df0)) + " exponent " + fmt("%.5g", pr.interface ? pr.interface->exponent : NAN) +
         "; v0=v0bar/2 (xi0=" + fmt("%.4g", xi_small) + ") -> " + to_string(small.outcome) + "; xi0=1e6 -> " +
         to_string(large.outcome) + " at xi1=" + fmt("%.6g", large.xi1));
  return v;
}

Verdict interface_equations(const GoodType1& g) {
  Verdict v;
  const InterfaceCheck t1 = verify_interface_equation(g.result.profile);
  v.require(t1.rel_error < 2e-2, "Type I rel error " + fmt("%.3g", t1.rel_error));
  double worst2 = 0.0;
  int n2 = 0;
  std::vector<FanEntry> fan = p0_fan(ref, fan_constants(8), 0);
  std::vector<Profile> profiles = fan_profiles(ref, fan);
  for (double s : {1.0, 2.0, 3.0}) {
    const Parameters par{3, 0.5, s};
    profiles.push_back(reconstruct_profile(classify_p2_orbit(par).orbit, par));
  }
  for (const Profile& pr : profiles) {
    if (!pr.interface || pr.interface->type != InterfaceType::TypeII) {
      v.require(false, "Type II profile without a Type II fit");
      continue;
    }
    worst2 = std::max(worst2, verify_interface_equation(pr).rel_error);
    ++n2;
  }
  v.require(worst2 < 2e-2, "Type II worst rel error " + fmt("%.3g", worst2));
  bool wrong = false;
  try {
    verify_interface_equation(g.result.profile, InterfaceType::TypeII);
  } catch (const Error& e) {
    wrong = e.code() == ErrorCode::WrongInterfaceType;
  }
  v.require(wrong, "Type I profile against the Type II equation raises WrongInterfaceType");
  v.note("Type I rel error " + fmt("%.2e", t1.rel_error) + "; " + std::to_string(n2) +
         " Type II profiles, worst rel error " + fmt("%.2e", worst2) + "; cross-check raises WrongInterfaceType");
  return v;
}

Verdict barriers() {
  Verdict v;
  double worst = 0.0;
  for (const Parameters& par : testing::supercritical_grid()) {
    const BarrierConstants b = barrier_constants(par);
    worst = std::max(worst, rel(b.u_p2_over_k, b.u_p2_over_k_closed));
  }
  v.require(worst < 1e-12, "U(P2)/k identity " + fmt("%.3g", worst));
  int below = 0, total = 0;
  for (double m : {2.0, 3.0, 4.0})
    for (double p : {0.3, 0.5, 0.7}) {
      const Parameters par{m, p, sigma_lower_bound({m, p, 1}) + 0.1};
      const P2Classification c = classify_p2_orbit(par);
      ++total;
      if (!c.orbit.y0_crossings.empty() && c.orbit.y0_crossings.front().coords[2] < barrier_constants(par).k1) ++below;
    }
  v.require(below == total, std::to_string(below) + "/" + std::to_string(total) + " UV < k1 near the lower bound");
  const BarrierConstants b = barrier_constants(ref);
  v.require(std::abs(b.plane1_d - 48) < 1e-12 && std::abs(b.plane1_e - 4) < 1e-12, "plane1 constants");
  v.require(std::abs(b.plane2_b - 3.0 / 17) < 1e-14 && std::abs(b.plane2_c - 7.0 / 102) < 1e-14, "plane2 constants");
  int mono = 0, mono_total = 0;
  for (double s : {2.0, 2.5, 3.0, 3.5, 4.0, 5.0}) {
    const Orbit o = classify_p2_orbit({3, 0.5, s}).orbit;
    bool ok = true;
    for (std::size_t i = 1; i < o.samples.size(); ++i) {
      const auto& a = o.samples[i - 1].coords;
      const auto& c = o.samples[i].coords;
      if (c[0] > a[0] + 1e-9 || (a[1] >= 0 && c[1] > a[1] + 1e-9)) ok = false;
    }
    ++mono_total;
    if (ok) ++mono;
  }
  v.require(mono == mono_total, "monotone X and Y on sigma>=2 orbits");
  const P2Classification c3 = classify_p2_orbit({3, 0.5, 3});
  const double uv3 = c3.orbit.y0_crossings.empty() ? NAN : c3.orbit.y0_crossings.front().coords[2];
  const double bound3 = barrier_constants({3, 0.5, 3}).u_p2_over_k;
  v.require(uv3 <= bound3 && std::abs(bound3 - 0.875) < 1e-12, "UV <= U(P2)/k = 0.875 at sigma=3");
  v.note("identity worst " + fmt("%.2e", worst) + "; UV<k1 on " + std::to_string(below) + "/" +
         std::to_string(total) + " near-bound cases; planes (48,4),(3/17,7/102); monotone X,Y on " +
         std::to_string(mono) + "/" + std::to_string(mono_total) + " sigma>=2 orbits; sigma=3 UV=" + fmt("%.4g", uv3) +
         " <= 0.875");
  return v;
}

Verdict nonexistence() {
  Verdict v;
  const NonexistenceReport r = probe_nonexistence({1.3, 0.5, 4}, 10);
  v.require(r.points.size() == 7, std::to_string(r.points.size()) + " points");
  std::vector<double> ev(r.candidate_eigenvalues.begin(), r.candidate_eigenvalues.end());
  std::sort(ev.begin(), ev.end());
  v.require(std::abs(ev[0] + 0.3) < 1e-10 && std::abs(ev[1] - 0.1) < 1e-10 && std::abs(ev[2] - 1) < 1e-10,
            "candidate eigenvalues");
  v.require(r.candidate_unstable_in_x0 && !r.any_profile_point, "no profile-carrying manifold");
  v.require(r.failures == 10 && r.launches.size() == 10, std::to_string(r.failures) + "/10 failures");
  v.note("7 points; " + r.candidate_label + " eigenvalues (-0.3, 0.1, 1) with unstable manifold in {x=0}; " +
         std::to_string(r.failures) + "/" + std::to_string(r.launches.size()) + " launches fail");
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Verdict hygiene(const GoodType1& g) {
  Verdict v;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> pos(0.05, 2.0), any(-2.0, 2.0);
  double worst_j = 0.0;
  for (int t = 0; t < 40; ++t) {
    const Parameters par = testing::random_supercritical(rng);
    const Coefficients c = coefficients(par);
    for (SystemId id : {SystemId::S1, SystemId::S2, SystemId::S3, SystemId::S4, SystemId::S1Center}) {
      const Eigen::Vector3d u(pos(rng), any(rng), pos(rng));
      const Eigen::Matrix3d F = testing::fd_jacobian(id, u, c);
      worst_j = std::max(worst_j, (field_jacobian<double>(id, u, c) - F).norm() / std::max(1.0, F.norm()));
    }
  }
  v.require(worst_j < 1e-6, "Jacobians " + fmt("%.3g", worst_j));
  double worst_t = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Parameters par = testing::random_supercritical(rng);
    const Coefficients c = coefficients(par);
    const ProfilePoint pt{std::exp(any(rng)), std::exp(any(rng)), any(rng)};
    for (SystemId id : {SystemId::S1, SystemId::S2, SystemId::S3, SystemId::S4}) {
      const ProfilePoint q = to_profile(to_phase(pt, id, c), id, c);
      worst_t = std::max({worst_t, std::abs(q.xi - pt.xi) / pt.xi, std::abs(q.f - pt.f) / pt.f,
                          std::abs(q.df - pt.df) / std::max(1e-3, std::abs(pt.df))});
    }
  }
  v.require(worst_t < 1e-12, "transform round trips " + fmt("%.3g", worst_t));
  // Event locations under halved tolerances.
  ShootOptions tight;
  tight.ode.rtol *= 0.5;
  tight.ode.atol *= 0.5;
  tight.tol_good = 1e-8;
  const GoodType1 g2 = find_good_type1(ref, std::nullopt, 1e-8, tight);
  const double d_star = std::abs(g2.xi0_star - g.xi0_star) / g.xi0_star;
  const ShootResult a = shoot_backward(100.0, ref), b = shoot_backward(100.0, ref, tight);
  const double d_xi1 = std::abs(a.xi1 - b.xi1) / a.xi1;
  StopConditions sa = s1_stop_conditions(ref), sb = sa;
  sb.ode = tight.ode;
  const Orbit oa = integrate_from_p2(ref, sa), ob = integrate_from_p2(ref, sb);
  const double d_eta = std::abs(oa.y0_crossings.at(0).eta - ob.y0_crossings.at(0).eta) / oa.y0_crossings.at(0).eta;
  // xi0* is a bisection root with its own 1e-8 tolerance, so it is reported but not gated.
  v.require(std::max(d_xi1, d_eta) < 1e-8, "event stability");
  // Golden JSON.
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "blowup_acceptance_golden";
  fs::remove_all(base);
  std::ostringstream sink;
  bool same = true;
  for (const std::vector<std::string>& cmd :
       {std::vector<std::string>{"analyze", "--m", "3", "--p", "0.5", "--sigma", "1", "--seed", "42"},
        std::vector<std::string>{"shoot", "--m", "3", "--p", "0.5", "--sigma", "1", "--auto-bracket", "--seed", "42"},
        std::vector<std::string>{"sweep", "--m", "3", "--p", "0.5", "--grid", "3:3.5:0.5", "--fan", "2", "--seed",
                                 "42"}}) {
    std::vector<std::string> ra = cmd, rb = cmd;
    ra.insert(ra.end(), {"--out", (base / "a").string()});
    rb.insert(rb.end(), {"--out", (base / "b").string(), "--workers", "1"});
    same = same && run_cli(ra, sink, sink) == 0 && run_cli(rb, sink, sink) == 0;
  }
  for (const char* f : {"analyze.json", "shoot.json", "sweep.json"})
    same = same && fs::exists(base / "a" / f) && slurp(base / "a" / f) == slurp(base / "b" / f);
  v.require(same, "golden JSON byte-stable");
  fs::remove_all(base);
  v.note("Jacobian FD " + fmt("%.2e", worst_j) + "; round trip " + fmt("%.2e", worst_t) +
         "; halved tolerances move xi1 by " + fmt("%.1e", d_xi1) + ", Y=0 crossing by " + fmt("%.1e", d_eta) + " (bisection root xi0* by " + fmt("%.1e", d_star) + "); analyze/shoot/sweep JSON byte-identical on rerun");
  return v;
}

}  // namespace

int main() {
  int failed = 0;
  std::optional<GoodType1> g;
  const auto run = [&](int n, const char* name, const std::function<Verdict()>& fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", n, name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  };
  const auto good = [&]() -> const GoodType1& {
    if (!g) g = good_type1();
    return *g;
  };
  run(1, "closed-form eigenvalues", eigenvalue_oracle);
  run(2, "Date invariants", date_oracle);
  run(3, "P0 elliptic fan, sigma=1", fan_sigma1);
  run(4, "P2 orbit, sigma=3", p2_orbit_sigma3);
  run(5, "sigma* and sigma=3.5", sigma_star);
  run(6, "backward shooting", [&] { return shooting(good()); });
  run(7, "interface equations", [&] { return interface_equations(good()); });
  run(8, "barriers", barriers);
  run(9, "non-existence probe", nonexistence);
  run(10, "numerical hygiene", [&] { return hygiene(good()); });
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}

#include "blowup/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(TerminationKind k) {
  switch (k) {
    case TerminationKind::EnteredPoint: return "EnteredPoint";
    case TerminationKind::LeftDomain: return "LeftDomain";
    case TerminationKind::SignChange: return "SignChange";
    case TerminationKind::StepLimit: return "StepLimit";
    case TerminationKind::Escaped: return "Escaped";
    case TerminationKind::Completed: return "Completed";
  }
  return "?";
}

std::string Termination::describe() const {
  char buf[160];
  switch (kind) {
    case TerminationKind::EnteredPoint:
      std::snprintf(buf, sizeof buf, "EnteredPoint(%s, %.3g)", label.c_str(), distance);
      return buf;
    case TerminationKind::SignChange: std::snprintf(buf, sizeof buf, "SignChange(%d)", coord); return buf;
    case TerminationKind::Escaped: return "Escaped(" + label + ")";
    default: return to_string(kind);
  }
}

const char* to_string(OriginKind k) {
  switch (k) {
    case OriginKind::Unknown: return "Unknown";
    case OriginKind::P1Property: return "P1property";
    case OriginKind::P2Property: return "P2property";
    case OriginKind::NegativeSlope: return "NegativeSlope";
    case OriginKind::PositiveSlope: return "PositiveSlope";
    case OriginKind::SignChangeAtZero: return "SignChangeAtZero";
  }
  return "?";
}

const char* to_string(InterfaceType t) {
  switch (t) {
    case InterfaceType::TypeI: return "TypeI";
    case InterfaceType::TypeII: return "TypeII";
    case InterfaceType::Ambiguous: return "Ambiguous";
  }
  return "?";
}

StopConditions s1_stop_conditions(const Parameters& par, double r_stop) {
  const Coefficients c = coefficients(par);
  StopConditions s;
  s.targets.push_back({"P1", Eigen::Vector3d(0.0, -c.ba(), 0.0), r_stop});
  s.targets.push_back({"P2", p2_location(c), r_stop});
  s.p0_radius = r_stop;
  s.p0_completion_radius = 1e-12;
  return s;
}

namespace {

using Step3 = DenseStep<3>;

/// First sign change of g from `from_sign` across the step, checked on four sub-intervals.
template <class G>
std::optional<double> first_crossing(const Step3& st, G&& g, double tol, int from_sign) {
  constexpr int n = 4;
  double ta = st.t0;
  double ga = g(ta, st.y0);
  for (int i = 1; i <= n; ++i) {
    const double tb = i == n ? st.t1() : st.t0 + st.h * i / n;
    const Eigen::Vector3d yb = i == n ? st.y1 : st.eval(tb);
    const double gb = g(tb, yb);
    const bool crossed = from_sign > 0 ? (ga > 0 && gb <= 0) : (ga < 0 && gb >= 0);
    if (crossed) {
      double a = ta, b = tb, fa = ga;
      for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = g(c, st.eval(c));
        if ((fc > 0) == (fa > 0)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
      }
      return 0.5 * (a + b);
    }
    ta = tb;
    ga = gb;
  }
  return std::nullopt;
}

Eigen::Vector3d center_to_s1(const Eigen::Vector3d& u, const Coefficients& c) {
  return {u[0], center_manifold_y(u[0], u[2], c), u[2]};
}

struct Runner {
  const Parameters& par;
  const Coefficients c;
  const StopConditions& stop;
  Orbit& orbit;

  bool s1_like(SystemId id) const { return id == SystemId::S1 || id == SystemId::S1Center; }

  void push(double eta, const Eigen::Vector3d& u, SystemId id) {
    orbit.samples.push_back({eta, id == SystemId::S1Center ? center_to_s1(u, c) : u});
  }

  /// {Y=0} crossings of a center-manifold step, in S1 coordinates.
  void record_center_y0(const Step3& st, double t_cut = INFINITY) {
    if (!stop.record_y0_crossings) return;
    const double tol = stop.ode.event_tol * std::max(1.0, std::abs(st.t1()));
    for (int sgn : {+1, -1}) {
      const auto g = [&](double, const Eigen::Vector3d& v) { return sgn * center_to_s1(v, c)[1]; };
      if (auto t = first_crossing(st, g, tol, +1); t && *t <= t_cut) orbit.y0_crossings.push_back({*t, center_to_s1(st.eval(*t), c), -sgn});
    }
  }

  /// Center-manifold stretch moving away from P0 until the handoff radius.
  bool peaked = false;

  std::pair<double, Eigen::Vector3d> launch_stretch(double eta0, const Eigen::Vector3d& u0) {
    OdeOptions opt = stop.ode;
    opt.atol = std::min(opt.atol, 1e-6 * std::max(u0.norm(), 1e-300) * opt.rtol);
    const auto rhs = [&](double, const Eigen::Vector3d& u) { return field<double>(SystemId::S1Center, u, c); };
    double eta = eta0;
    Eigen::Vector3d u = u0;
    bool done = false;
    const auto g = [&](double, const Eigen::Vector3d& v) { return stop.handoff_radius - center_to_s1(v, c).norm(); };
    orbit.steps += dopri5<3>(rhs, eta0, u0, eta0 + stop.eta_max, opt, [&](const Step3& st) {
      if (!st.y1.allFinite()) fail(ErrorCode::IntegrationFailure, "non-finite state on the center manifold");
      if (auto t = first_crossing(st, g, stop.ode.event_tol, +1)) {
        record_center_y0(st, *t);
        eta = *t;
        u = st.eval(*t);
        push(eta, u, SystemId::S1Center);
        done = true;
        return false;
      }
      // Arcs that turn back before the handoff radius are handed over at their peak.
      const auto dr = [&](double, const Eigen::Vector3d& v) {
        const Eigen::Vector3d w = center_to_s1(v, c);
        const Eigen::Vector3d d = field<double>(SystemId::S1, w, c);
        return w.dot(d);
      };
      if (auto t = first_crossing(st, dr, stop.ode.event_tol, +1)) {
        record_center_y0(st, *t);
        eta = *t;
        u = st.eval(*t);
        push(eta, u, SystemId::S1Center);
        done = true;
        peaked = true;
        return false;
      }
      record_center_y0(st);
      push(st.t1(), st.y1, SystemId::S1Center);
      eta = st.t1();
      u = st.y1;
      return true;
    });
    if (!done) fail(ErrorCode::IntegrationFailure, "center-manifold launch did not reach the handoff radius");
    return {eta, center_to_s1(u, c)};
  }

  /// Center-manifold stretch into P0 after landing.
  void completion_stretch(double eta0, const Eigen::Vector3d& s1) {
    const Eigen::Vector3d u0(s1[0], 0.0, s1[2]);
    double peak = 0.0;
    for (const auto& q : orbit.samples) peak = std::max(peak, q.coords.norm());
    const double radius = std::min(stop.p0_completion_radius, 1e-12 * peak);
    OdeOptions opt = stop.ode;
    opt.atol = std::min(opt.atol, 1e-3 * radius * opt.rtol);
    opt.hmin = 0.0;
    const auto rhs = [&](double, const Eigen::Vector3d& u) { return field<double>(SystemId::S1Center, u, c); };
    const auto g = [&](double, const Eigen::Vector3d& v) {
      return center_to_s1(v, c).norm() - radius;
    };
    try {
      orbit.steps += dopri5<3>(rhs, eta0, u0, std::numeric_limits<double>::max() / 4, opt, [&](const Step3& st) {
        if (!st.y1.allFinite()) return false;
        if (auto t = first_crossing(st, g, stop.ode.event_tol * std::max(1.0, std::abs(st.t1())), +1)) {
          record_center_y0(st, *t);
          push(*t, st.eval(*t), SystemId::S1Center);
          return false;
        }
        record_center_y0(st);
        push(st.t1(), st.y1, SystemId::S1Center);
        return true;
      });
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StepLimitExceeded && e.code() != ErrorCode::IntegrationFailure) throw;
    }
    orbit.termination.distance = orbit.samples.back().coords.norm();
  }

  void main_stretch(double eta0, const Eigen::Vector3d& u0, SystemId id) {
    const bool s1 = s1_like(id);
    const auto rhs = [&](double, const Eigen::Vector3d& u) { return field<double>(id, u, c); };
    const double tol = stop.ode.event_tol;
    bool finished = false;
    const auto finish = [&](TerminationKind k, std::string label, double t, const Eigen::Vector3d& u) {
      orbit.termination.kind = k;
      orbit.termination.label = std::move(label);
      push(t, u, id);
      finished = true;
    };
    const auto p0_ok = [&](const Eigen::Vector3d& u) {
      const Eigen::Vector3d d = field<double>(SystemId::S1, u, c);
      return u[1] < 0 && d[0] <= 0 && d[2] <= 0;
    };
    try {
      orbit.steps += dopri5<3>(rhs, eta0, u0, eta0 + stop.eta_max, stop.ode, [&](const Step3& st) {
        if (!st.y1.allFinite()) fail(ErrorCode::IntegrationFailure, "non-finite state");
        // Earliest terminal event inside the step.
        double t_best = std::numeric_limits<double>::infinity();
        std::function<void()> act;
        const auto consider = [&](std::optional<double> t, std::function<void(double)> a) {
          if (t && *t < t_best) {
            t_best = *t;
            act = [a, tt = *t] { a(tt); };
          }
        };
        if (s1 || id == SystemId::S3) {
          consider(first_crossing(st, [&](double, const Eigen::Vector3d& u) { return u[1] + stop.y_escape; }, tol, +1),
                   [&](double t) { finish(TerminationKind::Escaped, "Y->-inf", t, st.eval(t)); });
          consider(first_crossing(st, [&](double, const Eigen::Vector3d& u) { return stop.y_escape - u[1]; }, tol, +1),
                   [&](double t) { finish(TerminationKind::Escaped, "Y->+inf", t, st.eval(t)); });
        }
        if (s1) {
          if (stop.p0_radius > 0) {
            const auto g = [&](double, const Eigen::Vector3d& u) { return u.norm() - stop.p0_radius; };
            if (auto t = first_crossing(st, g, tol, +1); t && p0_ok(st.eval(*t))) {
              consider(t, [&](double tt) {
                const Eigen::Vector3d u = st.eval(tt);
                finish(TerminationKind::EnteredPoint, "P0", tt, u);
                orbit.termination.distance = u.norm();
              });
            } else if (st.y1.norm() < stop.p0_radius && p0_ok(st.y1)) {
              consider(st.t1(), [&](double tt) {
                finish(TerminationKind::EnteredPoint, "P0", tt, st.y1);
                orbit.termination.distance = st.y1.norm();
              });
            }
          }
        }
        for (const auto& tg : stop.targets) {
          const auto g = [&](double, const Eigen::Vector3d& u) { return (u - tg.location).norm() - tg.radius; };
          consider(first_crossing(st, g, tol, +1), [&](double t) {
            const Eigen::Vector3d u = st.eval(t);
            finish(TerminationKind::EnteredPoint, tg.label, t, u);
            orbit.termination.distance = (u - tg.location).norm();
          });
        }
        for (int k : stop.sign_watch) {
          const int sgn = st.y0[k] > 0 ? 1 : -1;
          const auto g = [&](double, const Eigen::Vector3d& u) { return sgn * u[k]; };
          consider(first_crossing(st, g, tol, +1), [&, k](double t) {
            finish(TerminationKind::SignChange, "", t, st.eval(t));
            orbit.termination.coord = k;
          });
        }
        if (s1 && stop.record_y0_crossings) {
          for (int sgn : {+1, -1}) {
            const auto g = [&](double, const Eigen::Vector3d& u) { return sgn * u[1]; };
            if (auto t = first_crossing(st, g, tol, +1); t && *t < t_best) {
              const Eigen::Vector3d u = st.eval(*t);
              orbit.y0_crossings.push_back({*t, u, -sgn});
            }
          }
        }
        if (act) {
          act();
          return false;
        }
        if (st.y1.norm() > stop.norm_escape)
          fail(ErrorCode::BlowupInPhaseVariables, "phase variables exceeded the escape threshold without a Q3 exit");
        push(st.t1(), st.y1, id);
        return true;
      });
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StepLimitExceeded) throw;
    }
    if (!finished) orbit.termination.kind = TerminationKind::StepLimit;
    std::sort(orbit.y0_crossings.begin(), orbit.y0_crossings.end(),
              [](const PlaneCrossing& a, const PlaneCrossing& b) { return a.eta < b.eta; });
  }
};

}  // namespace

Orbit integrate(const PhaseState& start, SystemId system, const Parameters& par, const StopConditions& stop) {
  if (!start.coords.allFinite()) fail(ErrorCode::DegenerateInput, "launch state is not finite");
  Orbit orbit;
  orbit.system = system == SystemId::S1Center ? SystemId::S1 : system;
  Runner run{par, coefficients(par), stop, orbit};
  check_regime(system, run.c);
  double eta = start.eta;
  Eigen::Vector3d u = start.coords;
  if (start.system == SystemId::S1Center && system == SystemId::S1) {
    run.push(eta, u, SystemId::S1Center);
    std::tie(eta, u) = run.launch_stretch(eta, u);
    if (run.peaked && stop.p0_radius > 0 && u.norm() < stop.handoff_radius) {
      // The whole arc stays where the reduced flow is accurate: finish it on the center manifold.
      orbit.termination = {TerminationKind::EnteredPoint, "P0", u.norm(), -1};
      run.completion_stretch(eta, u);
      return orbit;
    }
  } else if (start.system != system) {
    fail(ErrorCode::Unsupported, "launch state system does not match the integration system");
  } else {
    run.push(eta, u, system);
  }
  run.main_stretch(eta, u, system);
  if (system == SystemId::S1 && orbit.termination.kind == TerminationKind::EnteredPoint &&
      orbit.termination.label == "P0" && stop.p0_completion_radius > 0 &&
      stop.p0_completion_radius < orbit.termination.distance)
    run.completion_stretch(orbit.samples.back().eta, orbit.samples.back().coords);
  return orbit;
}

PhaseState p0_launch_state(const LocalExpansion& e, const Parameters& par, double delta) {
  if (e.kind != ExpansionKind::Beh02) fail(ErrorCode::Unsupported, "P0 launches use the Beh02 expansion");
  const Coefficients c = coefficients(par);
  const auto radius = [&](double lx) {
    const ProfilePoint q = e.evaluate(std::exp(lx));
    if (q.f == 0.0) return 0.0;
    if (!(q.f > 0)) return std::numeric_limits<double>::infinity();
    const Eigen::Vector3d u = to_phase(q, SystemId::S1, c);
    return std::hypot(u[0], u[2]);
  };
  // Scan toward the expansion's own interface for the first radius above the target; small K
  // keeps the whole Beh02 arc close to P0, so the target is capped by the arc's peak radius.
  const double lx_end = e.anchor_xi > 0 ? std::log(e.anchor_xi) : 50.0;
  double rmax = 0.0;
  for (double lx = -300.0; lx < lx_end; lx += 0.25) rmax = std::max(rmax, radius(lx));
  if (!(rmax > 0) || !std::isfinite(rmax)) fail(ErrorCode::DegenerateInput, "Beh02 expansion has no launch point");
  const double target = std::min(delta, 1e-6 * rmax);
  double lo = -300.0, hi = -300.0;
  while (radius(hi) < target) {
    lo = hi;
    hi += 0.25;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (radius(mid) < target ? lo : hi) = mid;
  }
  const Eigen::Vector3d u = to_phase(e.evaluate(std::exp(lo)), SystemId::S1, c);
  return {SystemId::S1Center, Eigen::Vector3d(u[0], 0.0, u[2]), 0.0};
}

Orbit integrate_from_p0(const LocalExpansion& beh02, const Parameters& par, const StopConditions& stop,
                        double delta) {
  Orbit o = integrate(p0_launch_state(beh02, par, delta), SystemId::S1, par, stop);
  o.origin = "P0";
  o.launch = beh02;
  return o;
}

Eigen::Vector3d p2_unstable_direction(const Parameters& par) {
  const Coefficients c = coefficients(par);
  const Eigen::Matrix3d J = field_jacobian<double>(SystemId::S1, p2_location(c), c);
  Eigen::EigenSolver<Eigen::Matrix3d> es(J);
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  if (!(es.eigenvalues()[best].real() > 0))
    fail(ErrorCode::DegenerateInput, "P2 has no unstable direction for these parameters");
  Eigen::Vector3d v = es.eigenvectors().col(best).real().normalized();
  if (v[2] < 0) v = -v;
  return v;
}

Orbit integrate_from_p2(const Parameters& par, const StopConditions& stop, double delta) {
  const Coefficients c = coefficients(par);
  const PhaseState s{SystemId::S1, p2_location(c) + delta * p2_unstable_direction(par), 0.0};
  Orbit o = integrate(s, SystemId::S1, par, stop);
  o.origin = "P2";
  o.launch = local_expansion(ExpansionKind::BehP2, par, {});
  return o;
}

ProfilePoint Profile::at(double xi) const {
  if (samples.empty()) fail(ErrorCode::DegenerateInput, "empty profile");
  if (xi < samples.front().xi || xi > samples.back().xi) fail(ErrorCode::DegenerateInput, "xi outside the profile");
  auto it = std::lower_bound(samples.begin(), samples.end(), xi,
                             [](const ProfilePoint& a, double x) { return a.xi < x; });
  if (it == samples.begin()) return *it;
  const ProfilePoint& b = *it;
  const ProfilePoint& a = *(it - 1);
  const double h = b.xi - a.xi;
  if (h <= 0) return b;
  const double t = (xi - a.xi) / h, t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double f = h00 * a.f + h10 * h * a.df + h01 * b.f + h11 * h * b.df;
  const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1, d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
  return {xi, f, d00 * a.f + d10 * a.df + d01 * b.f + d11 * b.df};
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b[i] = y[i];
  }
  const Eigen::Vector2d s = A.colPivHouseholderQr().solve(b);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (A * s - b).squaredNorm();
  return {s[0], s[1], ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

/// Indices of the positive samples approaching the right-end zero, ordered by increasing xi.
std::vector<std::size_t> tail_indices(const Profile& pr) {
  const auto& s = pr.samples;
  std::size_t last = s.size();
  while (last > 0 && !(s[last - 1].f > 0)) --last;
  if (last < 3) fail(ErrorCode::NoInterface, "profile has no positive tail");
  double fmax = 0.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < last; ++i)
    if (s[i].f >= fmax) {
      fmax = s[i].f;
      imax = i;
    }
  if (!(s[last - 1].f < 1e-2 * fmax) || !(s[last - 1].df < 0))
    fail(ErrorCode::NoInterface, "profile does not approach zero at its right end");
  std::vector<std::size_t> idx;
  for (std::size_t i = imax + 1; i < last; ++i)
    if (s[i].df < 0 && s[i].xi > s[i - 1].xi) idx.push_back(i);
  if (idx.size() < 3) fail(ErrorCode::NoInterface, "too few samples approaching the interface");
  return idx;
}

/// Interface location from f/f' = -(xi0 - xi)/k over the given samples.
double xi0_from_ratio(const Profile& pr, const std::vector<std::size_t>& w) {
  std::vector<double> x, r;
  for (auto i : w) {
    x.push_back(pr.samples[i].xi);
    r.push_back(pr.samples[i].f / pr.samples[i].df);
  }
  const LineFit lf = fit_line(x, r);
  return -lf.intercept / lf.slope;
}

/// Samples with xi0 - xi within one decade of the closest sample (at least `min_n`).
std::vector<std::size_t> last_decade(const Profile& pr, const std::vector<std::size_t>& tail, double xi0,
                                     std::size_t min_n = 6) {
  const double smin = xi0 - pr.samples[tail.back()].xi;
  std::vector<std::size_t> w;
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
    const double s = xi0 - pr.samples[*it].xi;
    if (s <= 10 * smin || w.size() < min_n) w.push_back(*it);
  }
  std::reverse(w.begin(), w.end());
  return w;
}

}  // namespace

InterfaceFit fit_interface_exponent(const Profile& pr) {
  const auto tail = tail_indices(pr);
  std::vector<std::size_t> w0(tail.end() - std::min<std::size_t>(tail.size(), 10), tail.end());
  double xi0 = xi0_from_ratio(pr, w0);
  if (!(xi0 > pr.samples[tail.back()].xi)) xi0 = pr.samples[tail.back()].xi;
  auto w = last_decade(pr, tail, xi0);
  const double xi0r = xi0_from_ratio(pr, w);
  if (xi0r > pr.samples[tail.back()].xi) {
    xi0 = xi0r;
    w = last_decade(pr, tail, xi0);
  }
  std::vector<double> ls, lf;
  for (auto i : w) {
    const double s = xi0 - pr.samples[i].xi;
    if (s > 0) {
      ls.push_back(std::log(s));
      lf.push_back(std::log(pr.samples[i].f));
    }
  }
  if (ls.size() < 3) fail(ErrorCode::NoInterface, "interface fit window is degenerate");
  const LineFit fit = fit_line(ls, lf);
  InterfaceFit r{xi0, fit.slope, fit.r2, InterfaceType::Ambiguous};
  const double e1 = 1.0 / (pr.params.m - 1), e2 = 1.0 / (1 - pr.params.p);
  const double d1 = std::abs(fit.slope - e1) / e1, d2 = std::abs(fit.slope - e2) / e2;
  if (d1 <= 0.05 && d1 <= d2) r.type = InterfaceType::TypeI;
  else if (d2 <= 0.05) r.type = InterfaceType::TypeII;
  return r;
}

std::pair<double, double> fit_origin_exponent(const Profile& pr) {
  std::vector<double> lx, lf;
  double x_first = 0.0;
  for (const auto& q : pr.samples) {
    if (!(q.xi > 0 && q.f > 0)) continue;
    if (x_first == 0.0) x_first = q.xi;
    if (q.xi > 10 * x_first && lx.size() >= 6) break;
    lx.push_back(std::log(q.xi));
    lf.push_back(std::log(q.f));
  }
  if (lx.size() < 3) fail(ErrorCode::DegenerateInput, "too few samples near the origin");
  const LineFit fit = fit_line(lx, lf);
  return {fit.slope, fit.r2};
}

InterfaceCheck verify_interface_equation(const Profile& pr, std::optional<InterfaceType> as) {
  if (!pr.interface) fail(ErrorCode::NoInterface, "profile has no classified interface");
  const InterfaceType type = as.value_or(pr.interface->type);
  if (type == InterfaceType::Ambiguous) fail(ErrorCode::WrongInterfaceType, "interface type is ambiguous");
  const double m = pr.params.m, p = pr.params.p, sg = pr.params.sigma;
  const double al = pr.exponents.alpha, be = pr.exponents.beta, T = pr.exponents.T;
  const double xi0 = pr.interface->xi0;
  const double g_exp = type == InterfaceType::TypeI ? m - 1 : 1 - p;
  const auto tail = tail_indices(pr);
  const auto w = last_decade(pr, tail, xi0, 8);
  // g = f^(m-1) (pressure) or f^(1-p); its one-sided slope at xi0 must be finite and nonzero.
  std::vector<double> ls, lg;
  Eigen::MatrixXd A(w.size(), 2);
  Eigen::VectorXd b(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto& q = pr.samples[w[k]];
    const double s = xi0 - q.xi, g = std::pow(q.f, g_exp);
    ls.push_back(std::log(s));
    lg.push_back(std::log(g));
    A(k, 0) = s;
    A(k, 1) = s * s;
    b[k] = g;
  }
  const LineFit lfit = fit_line(ls, lg);
  if (std::abs(lfit.slope - 1.0) > 0.1) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "one-sided limit of the %s gradient is %s (local exponent %.4g)",
                  type == InterfaceType::TypeI ? "pressure" : "w", lfit.slope > 1 ? "zero" : "infinite", lfit.slope);
    fail(ErrorCode::WrongInterfaceType, buf);
  }
  const double slope = A.colPivHouseholderQr().solve(b)[0];  // -g'(xi0)
  InterfaceCheck r;
  r.probe_time = 0.5 * T;
  const double tau = T - r.probe_time;
  const double s_t = xi0 * std::pow(tau, -be);
  r.lhs = be * xi0 * std::pow(tau, -be - 1);
  if (type == InterfaceType::TypeI) {
    r.rhs = m / (m - 1) * slope * std::pow(tau, be - al * (m - 1));
  } else {
    const double wx = -slope / (1 - p) * std::pow(tau, be - al * (1 - p));
    r.rhs = -std::pow(s_t, sg) / wx;
  }
  r.rel_error = std::abs(r.lhs - r.rhs) / std::abs(r.lhs);
  return r;
}

Profile reconstruct_profile(const Orbit& orbit, const Parameters& par) {
  const Coefficients c = coefficients(par);
  const SystemId id = orbit.system;
  Profile pr;
  pr.params = par;
  pr.exponents = derive_exponents(par);
  bool any_invertible = false;
  for (const auto& s : orbit.samples) {
    const auto& u = s.coords;
    const bool inv = id == SystemId::S2 ? (u[0] > 0 && u[2] >= 0) : (u[0] > 0 && u[2] > 0);
    if (!inv) continue;
    any_invertible = true;
    pr.samples.push_back(to_profile(u, id, c));
  }
  if (!any_invertible)
    fail(ErrorCode::NonInvertibleOrbit, "orbit lies in an invariant plane and carries no profile");
  std::stable_sort(pr.samples.begin(), pr.samples.end(),
                   [](const ProfilePoint& a, const ProfilePoint& b) { return a.xi < b.xi; });
  if (orbit.origin == "P0" || orbit.origin == "P2") {
    pr.origin_kind = OriginKind::P2Property;
    pr.samples.insert(pr.samples.begin(), ProfilePoint{0.0, 0.0, 0.0});
  }
  const auto& t = orbit.termination;
  if (t.kind == TerminationKind::EnteredPoint && (t.label == "P0" || t.label == "P1")) {
    try {
      pr.interface = fit_interface_exponent(pr);
      if (pr.interface->xi0 > pr.samples.back().xi) pr.samples.push_back({pr.interface->xi0, 0.0, 0.0});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoInterface) throw;
    }
  }
  return pr;
}

DirectResult integrate_direct(const ProfilePoint& start, const Parameters& par, double xi_end, const OdeOptions& opt,
                              double f_floor) {
  const double m = par.m, p = par.p, sg = par.sigma;
  const Exponents ex = derive_exponents(par);
  const double al = ex.alpha, be = ex.beta;
  if (!(start.f > 0)) fail(ErrorCode::DegenerateInput, "direct route needs f > 0 at the start");
  using V2 = Eigen::Vector2d;
  using detail::spow;
  const auto rhs = [&](double xi, const V2& y) {
    const double F = y[0], G = y[1];
    const double xs = xi == 0.0 ? (sg == 0.0 ? 1.0 : 0.0) : std::pow(std::abs(xi), sg);
    return V2(G, al * spow(F, 1.0 / m) - (be / m) * xi * spow(F, (1 - m) / m) * G - xs * spow(F, p / m));
  };
  const auto to_point = [&](double xi, const V2& y) {
    const double f = spow(y[0], 1.0 / m);
    return ProfilePoint{xi, f, f != 0.0 ? y[1] / (m * std::pow(std::abs(f), m - 1)) : 0.0};
  };
  DirectResult res;
  res.profile.params = par;
  res.profile.exponents = ex;
  auto& out = res.profile.samples;
  out.push_back(start);
  const V2 y0(std::pow(start.f, m), m * std::pow(start.f, m - 1) * start.df);
  double Fmax = y0[0];
  res.xi_end = xi_end;
  const double tol = opt.event_tol;
  const bool forward = xi_end > start.xi;
  constexpr double kStiffnessCap = 1e6;
  try {
    dopri5<2>(rhs, start.xi, y0, xi_end, opt, [&](const DenseStep<2>& st) {
      if (st.y1[0] <= 0.0) {
        double a = st.t0, b = st.t1();
        for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
          const double c = 0.5 * (a + b);
          (st.eval(c)[0] > 0 ? a : b) = c;
        }
        const V2 y = st.eval(a);
        out.push_back(to_point(a, y));
        res.end = DirectEnd::CrossedZero;
        res.xi_end = a;
        return false;
      }
      Fmax = std::max(Fmax, st.y1[0]);
      out.push_back(to_point(st.t1(), st.y1));
      // Approaching a zero forward, the damping rate (beta/m) xi F^{(1-m)/m} grows without bound and
      // the explicit pair stalls; past this stiffness the remaining approach is left to the interface fit.
      const double xi = st.t1();
      const bool stiff = forward && st.y1[1] < 0.0 &&
                         (be / m) * xi * xi * spow(st.y1[0], (1 - m) / m) > kStiffnessCap;
      if (st.y1[0] < f_floor * Fmax || stiff) {
        res.end = DirectEnd::Vanished;
        res.xi_end = st.t1();
        return false;
      }
      return true;
    });
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IntegrationFailure) throw;
    res.end = DirectEnd::Vanished;
    res.xi_end = out.back().xi;
  }
  if (xi_end < start.xi) std::reverse(out.begin(), out.end());
  return res;
}

namespace {

OriginKind classify_origin(const ProfilePoint& q, double tol_good = 1e-6) {
  if (!(q.f > 0)) return OriginKind::SignChangeAtZero;
  if (std::abs(q.df) < tol_good * std::max(1.0, q.f)) return OriginKind::P1Property;
  return q.df < 0 ? OriginKind::NegativeSlope : OriginKind::PositiveSlope;
}

}  // namespace

Profile integrate_ssode_direct(const ProfilePoint& start, const Parameters& par, int direction, double xi_max,
                               const OdeOptions& opt) {
  const double xi_end = direction > 0 ? xi_max : 0.0;
  DirectResult r = integrate_direct(start, par, xi_end, opt);
  if (r.end == DirectEnd::CrossedZero) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "profile crossed zero (SignChange) at xi=%.17g", r.xi_end);
    fail(ErrorCode::NegativeF, buf);
  }
  Profile& pr = r.profile;
  if (direction < 0 && r.end == DirectEnd::ReachedEnd) pr.origin_kind = classify_origin(pr.samples.front());
  if (direction > 0 && r.end == DirectEnd::Vanished) {
    if (classify_regime(par) == Regime::Supercritical && pr.samples.back().f > 0) {
      // The approach to the zero is finished in S1, where the contact is a landing in P0 or P1.
      const ProfilePoint last = pr.samples.back();
      StopConditions stop = s1_stop_conditions(par);
      stop.ode = opt;
      try {
        const Orbit tail = integrate({SystemId::S1, to_phase(last, SystemId::S1, coefficients(par)), 0.0},
                                     SystemId::S1, par, stop);
        const auto& t = tail.termination;
        if (t.kind == TerminationKind::EnteredPoint && (t.label == "P0" || t.label == "P1")) {
          const Profile tp = reconstruct_profile(tail, par);
          for (const auto& q : tp.samples)
            if (q.xi > pr.samples.back().xi) pr.samples.push_back(q);
          pr.interface = tp.interface;
          return pr;
        }
      } catch (const Error&) {
        // Fall back to fitting the direct samples.
      }
    }
    try {
      pr.interface = fit_interface_exponent(pr);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoInterface) throw;
    }
  }
  return pr;
}

Profile integrate_ssode_direct(const LocalExpansion& start, double offset, const Parameters& par, int direction,
                               double xi_max, const OdeOptions& opt) {
  Profile pr = integrate_ssode_direct(start.at_offset(offset), par, direction, xi_max, opt);
  if (start.at_origin() && (start.kind == ExpansionKind::Beh02 || start.kind == ExpansionKind::BehP2)) {
    pr.origin_kind = OriginKind::P2Property;
  }
  return pr;
}

}  // namespace blowup

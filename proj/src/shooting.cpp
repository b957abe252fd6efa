#include "blowup/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(ShootOutcome o) {
  switch (o) {
    case ShootOutcome::DecreasingToAxis: return "DecreasingToAxis";
    case ShootOutcome::IncreasingAtAxis: return "IncreasingAtAxis";
    case ShootOutcome::BackwardSignChange: return "BackwardSignChange";
    case ShootOutcome::GoodProfile: return "GoodProfile";
  }
  return "?";
}

const char* to_string(Endpoint e) {
  switch (e) {
    case Endpoint::P0: return "P0";
    case Endpoint::P1: return "P1";
    case Endpoint::Q3: return "Q3";
    case Endpoint::Undecided: return "Undecided";
  }
  return "?";
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double v0_from_xi0(double xi0, const Parameters& par) {
  const Exponents ex = derive_exponents(par);
  const double m = par.m, p = par.p;
  const double den = par.sigma * (m - 1) + 2 * (p - 1);
  return std::pow(m / ex.alpha, (1 - p) / (m - 1)) * std::pow(xi0, den / (m - 1)) / ex.alpha;
}

double xi0_from_v0(double v0, const Parameters& par) {
  const Exponents ex = derive_exponents(par);
  const double m = par.m, p = par.p;
  const double den = par.sigma * (m - 1) + 2 * (p - 1);
  return std::pow(v0 * ex.alpha / std::pow(m / ex.alpha, (1 - p) / (m - 1)), (m - 1) / den);
}

double barrier_h(double U, const Parameters& par) {
  const Exponents ex = derive_exponents(par);
  const double m = par.m, p = par.p, ba = ex.beta / ex.alpha;
  return (1 + ba / 2) * std::pow(U, (1 - p) / (m + p - 2)) + ba * ba / (4 * U);
}

double barrier_u0(const Parameters& par) {
  const double m = par.m, p = par.p, s = par.sigma;
  return std::pow((m + p - 2) * (m - p) * (m - p) / (2 * (s + 2) * (2 * s + 4 + m - p) * (1 - p)),
                  (m + p - 2) / (m - 1));
}

double barrier_v0bar(const Parameters& par) { return barrier_h(barrier_u0(par), par); }

ShootResult shoot_backward(double xi0, const Parameters& par, const ShootOptions& opt) {
  if (classify_regime(par) != Regime::Supercritical) fail(ErrorCode::RegimeMismatch, "backward shooting needs m+p>2");
  if (!(xi0 > 0)) fail(ErrorCode::InvalidParameters, "xi0 must be positive");
  const LocalExpansion e = type1_at(xi0, par);
  const ProfilePoint start = e.at_offset(opt.launch_offset * xi0);
  if (!(start.f > 0) || !std::isfinite(start.df)) fail(ErrorCode::IntegrationFailure, "invalid Type I launch point");
  ShootResult r;
  r.xi0 = xi0;
  r.v0 = v0_from_xi0(xi0, par);
  DirectResult d = integrate_direct(start, par, 0.0, opt.ode);
  r.profile = std::move(d.profile);
  auto& pr = r.profile;
  if (d.end == DirectEnd::ReachedEnd) {
    const ProfilePoint& q = pr.samples.front();
    r.f0 = q.f;
    r.df0 = q.df;
    if (std::abs(q.df) < opt.tol_good * std::max(1.0, q.f)) {
      r.outcome = ShootOutcome::GoodProfile;
      pr.origin_kind = OriginKind::P1Property;
    } else if (q.df < 0) {
      r.outcome = ShootOutcome::DecreasingToAxis;
      pr.origin_kind = OriginKind::NegativeSlope;
    } else {
      r.outcome = ShootOutcome::IncreasingAtAxis;
      pr.origin_kind = OriginKind::PositiveSlope;
    }
  } else {
    r.outcome = ShootOutcome::BackwardSignChange;
    r.xi1 = d.xi_end;
    const ProfilePoint& q = pr.samples.front();
    r.dfm1 = par.m * std::pow(std::abs(q.f), par.m - 1) * q.df;
    pr.origin_kind = OriginKind::SignChangeAtZero;
  }
  try {
    pr.interface = fit_interface_exponent(pr);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::NoInterface) throw;
  }
  pr.samples.push_back({xi0, 0.0, 0.0});
  return r;
}

std::pair<double, double> auto_bracket(const Parameters& par, const ShootOptions& opt) {
  // Below v0bar the profile is decreasing; start just under it.
  double lo = xi0_from_v0(0.9 * barrier_v0bar(par), par);
  for (int i = 0; i < 60 && shoot_backward(lo, par, opt).outcome != ShootOutcome::DecreasingToAxis; ++i) lo *= 0.5;
  if (shoot_backward(lo, par, opt).outcome != ShootOutcome::DecreasingToAxis)
    fail(ErrorCode::BracketInvalid, "no decreasing profile found for small xi0");
  double hi = lo;
  for (int i = 0; i < 200; ++i) {
    const double next = hi * 1.25;
    if (shoot_backward(next, par, opt).outcome != ShootOutcome::DecreasingToAxis) return {hi, next};
    hi = next;
  }
  fail(ErrorCode::BracketInvalid, "shooting stays decreasing over the scanned xi0 range");
}

GoodType1 find_good_type1(const Parameters& par, std::optional<std::pair<double, double>> bracket, double width,
                          const ShootOptions& opt) {
  auto [lo, hi] = bracket ? *bracket : auto_bracket(par, opt);
  ShootResult rlo = shoot_backward(lo, par, opt), rhi = shoot_backward(hi, par, opt);
  const auto in_a = [](const ShootResult& r) { return r.outcome == ShootOutcome::DecreasingToAxis; };
  if (in_a(rlo) == in_a(rhi) || !in_a(rlo)) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "bracket ends give %s and %s", to_string(rlo.outcome), to_string(rhi.outcome));
    fail(ErrorCode::BracketInvalid, buf);
  }
  GoodType1 g;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    ShootResult r = shoot_backward(mid, par, opt);
    ++g.iterations;
    if (r.outcome == ShootOutcome::GoodProfile) {
      lo = hi = mid;
      rlo = rhi = std::move(r);
      break;
    }
    if (in_a(r)) {
      lo = mid;
      rlo = std::move(r);
    } else {
      hi = mid;
      rhi = std::move(r);
    }
  }
  g.bracket = {lo, hi};
  // The boundary profile: whichever end reaches the axis with the smaller slope.
  const bool hi_axis = rhi.outcome != ShootOutcome::BackwardSignChange;
  g.result = (hi_axis && std::abs(rhi.df0) < std::abs(rlo.df0)) ? std::move(rhi) : std::move(rlo);
  g.xi0_star = g.result.xi0;
  if (std::abs(g.result.df0) < opt.tol_good * std::max(1.0, g.result.f0)) {
    g.result.outcome = ShootOutcome::GoodProfile;
    g.result.profile.origin_kind = OriginKind::P1Property;
  }
  return g;
}

Endpoint endpoint_of(const Orbit& o) {
  const auto& t = o.termination;
  if (t.kind == TerminationKind::EnteredPoint && t.label == "P0") return Endpoint::P0;
  if (t.kind == TerminationKind::EnteredPoint && t.label == "P1") return Endpoint::P1;
  if (t.kind == TerminationKind::Escaped && t.label == "Y->-inf") return Endpoint::Q3;
  return Endpoint::Undecided;
}

P2Classification classify_p2_orbit(const Parameters& par, double delta, double r_stop) {
  if (classify_regime(par) != Regime::Supercritical) fail(ErrorCode::RegimeMismatch, "P2 orbit analysis needs m+p>2");
  P2Classification c;
  c.orbit = integrate_from_p2(par, s1_stop_conditions(par, r_stop), delta);
  c.endpoint = endpoint_of(c.orbit);
  return c;
}

BarrierConstants barrier_constants(const Parameters& par) {
  const double m = par.m, p = par.p, s = par.sigma;
  const Coefficients c = coefficients(par);
  const double den = c.den();
  BarrierConstants b;
  b.u_p2 = std::pow(p2_location(c)[0], (m + p - 2) / (m - 1));
  b.k = 1.0 / (((s + 1) * (m - 1) + 2 * (p - 1)) / (m - 1) * std::pow(b.u_p2, (1 - p) / (m + p - 2)));
  b.k1 = (m - p) * (m - p) / (4 * (s + 2) * (s + 2));
  b.u_p2_over_k = b.u_p2 / b.k;
  b.u_p2_over_k_closed = den * ((s + 1) * (m - 1) + 2 * (p - 1)) / (2 * (s + 2) * (m + 1));
  b.u0 = barrier_u0(par);
  b.v0bar = barrier_h(b.u0, par);
  b.plane1_d = 2 * m * (m + 1) * (m + 1) / (m - 1);
  b.plane1_e = 2 * (m + 1) / (m - 1);
  b.plane2_b = m * (m - 1) / (2 * m * m + 5 * m + 1);
  b.plane2_c = (2 * m + 1) * (m - 1) / (2 * m * (2 * m * m + 5 * m + 1));
  b.y0bar = (m - 1) * (s + 2) / (2 * m * den);
  return b;
}

std::vector<double> fan_constants(int n, double k_lo, double k_hi) {
  std::vector<double> ks;
  for (int i = 0; i < n; ++i)
    ks.push_back(n == 1 ? k_lo : std::exp(std::log(k_lo) + (std::log(k_hi) - std::log(k_lo)) * i / (n - 1)));
  return ks;
}

namespace {

FanEntry run_fan_member(const Parameters& par, double K) {
  FanEntry f;
  f.K = K;
  try {
    const Orbit o = integrate_from_p0(local_expansion(ExpansionKind::Beh02, par, {K}), par, s1_stop_conditions(par));
    f.termination = o.termination;
    f.endpoint = endpoint_of(o);
    const Profile pr = reconstruct_profile(o, par);
    f.origin_exponent = fit_origin_exponent(pr).first;
    f.interface = pr.interface;
  } catch (const Error& e) {
    f.error = e.what();
  }
  return f;
}

}  // namespace

std::vector<FanEntry> p0_fan(const Parameters& par, const std::vector<double>& Ks, int workers) {
  if (classify_regime(par) != Regime::Supercritical) fail(ErrorCode::RegimeMismatch, "P0 fan needs m+p>2");
  std::vector<FanEntry> out(Ks.size());
  parallel_for(static_cast<int>(Ks.size()), workers, [&](int i) { out[i] = run_fan_member(par, Ks[i]); });
  return out;
}

FanTransition bisect_fan(const Parameters& par, double k_p0, double k_q3, int max_iter) {
  FanTransition t;
  double a = std::log(k_p0), b = std::log(k_q3);
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (a + b);
    const Orbit o =
        integrate_from_p0(local_expansion(ExpansionKind::Beh02, par, {std::exp(mid)}), par, s1_stop_conditions(par));
    const Endpoint e = endpoint_of(o);
    if (e == Endpoint::P1) {
      a = b = mid;
      t.boundary = Endpoint::P1;
      t.interface = reconstruct_profile(o, par).interface;
      break;
    }
    if (e == Endpoint::P0) a = mid;
    else if (e == Endpoint::Q3) b = mid;
    else break;
  }
  t.k_lo = std::exp(a);
  t.k_hi = std::exp(b);
  return t;
}

RegimeReport sweep_sigma(const Parameters& base, const std::vector<double>& grid, bool refine, double width,
                         int workers) {
  RegimeReport rep;
  rep.base = base;
  {
    Parameters probe = base;
    probe.sigma = std::max(base.sigma, sigma_lower_bound(base) + 1.0);
    if (classify_regime(probe) != Regime::Supercritical)
      fail(ErrorCode::RegimeMismatch, "sigma sweep needs m+p>2; use probe-nonexistence for m+p<2");
  }
  rep.entries.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    SweepEntry& e = rep.entries[i];
    e.sigma = grid[i];
    try {
      const Parameters par = make_parameters(base.m, base.p, grid[i]);
      e.barriers = barrier_constants(par);
      const P2Classification c = classify_p2_orbit(par);
      e.endpoint = c.endpoint;
      if (!c.orbit.y0_crossings.empty()) e.uv_crossing = c.orbit.y0_crossings.front().coords[2];
      if (e.endpoint == Endpoint::P0 || e.endpoint == Endpoint::P1) {
        try {
          e.interface = reconstruct_profile(c.orbit, par).interface;
        } catch (const Error&) {
        }
      }
    } catch (const Error& err) {
      e.error = err.what();
    }
  });
  std::optional<std::size_t> first_flip;
  Endpoint prev = Endpoint::Undecided;
  std::size_t prev_i = 0;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const Endpoint e = rep.entries[i].endpoint;
    if (e == Endpoint::Undecided) {
      ++rep.undecided;
      continue;
    }
    if (prev != Endpoint::Undecided && e != prev) {
      ++rep.transitions;
      if (!first_flip && prev == Endpoint::P0 && e != Endpoint::P0) first_flip = prev_i;
    }
    prev = e;
    prev_i = i;
  }
  rep.multiple_transitions = rep.transitions > 1;
  if (first_flip) {
    double lo = rep.entries[*first_flip].sigma;
    double hi = lo;
    for (std::size_t j = *first_flip + 1; j < rep.entries.size(); ++j)
      if (rep.entries[j].endpoint != Endpoint::Undecided) {
        hi = rep.entries[j].sigma;
        break;
      }
    if (refine) {
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const Endpoint e = classify_p2_orbit(make_parameters(base.m, base.p, mid)).endpoint;
        if (e == Endpoint::P0) lo = mid;
        else if (e == Endpoint::Q3) hi = mid;
        else {
          lo = hi = mid;
          break;
        }
      }
    }
    rep.sigma_star_bracket = std::make_pair(lo, hi);
  }
  return rep;
}

NonexistenceReport probe_nonexistence(const Parameters& par, int n_launches) {
  require_analyzable(par);
  if (classify_regime(par) != Regime::Subcritical)
    fail(ErrorCode::RegimeMismatch, "non-existence probe needs m+p<2");
  NonexistenceReport rep;
  for (auto& pt : enumerate_infinity(SystemId::S5, par)) rep.points.push_back(linearize(pt, par));
  for (const auto& pt : rep.points) {
    const auto it = pt.interpretation;
    if (it == Interpretation::TypeIInterface || it == Interpretation::TypeIIInterface ||
        it == Interpretation::EllipticOriginTypeII)
      rep.any_profile_point = true;
    if (pt.label == "P1*") {
      rep.candidate_label = pt.label;
      bool in_x0 = true;
      for (int k = 0; k < 3; ++k) {
        rep.candidate_eigenvalues[k] = pt.eigenvalues[k].real();
        if (pt.eigenvalues[k].real() > 0 && std::abs(pt.eigenvectors(0, k)) > 1e-9 * pt.eigenvectors.col(k).norm())
          in_x0 = false;
      }
      rep.candidate_unstable_in_x0 = in_x0;
    }
  }
  const Exponents ex = derive_exponents(par);
  const double m = par.m, p = par.p, be = ex.beta;
  const int n1 = n_launches / 2;
  for (int i = 0; i < n_launches; ++i) {
    NonexistenceLaunch l;
    const bool type1 = i < n1;
    const int j = type1 ? i : i - n1;
    const int nj = type1 ? n1 : n_launches - n1;
    l.kind = type1 ? "TypeI" : "TypeII";
    l.xi0 = std::exp(std::log(0.1) + std::log(1e3) * j / std::max(1, nj - 1));
    // Leading-order interface behaviors backed off by 1e-4 xi0.
    const double s = 1e-4 * l.xi0, xi = l.xi0 - s;
    ProfilePoint q{xi, 0.0, 0.0};
    if (type1) {
      const double phi = be * (m - 1) * (l.xi0 * l.xi0 - xi * xi) / (2 * m);
      q.f = std::pow(phi, 1 / (m - 1));
      q.df = q.f / phi * (-be * xi / m);
    } else {
      const double psi = (1 - p) * std::pow(l.xi0, par.sigma - 1) * s / be;
      q.f = std::pow(psi, 1 / (1 - p));
      q.df = -q.f / psi * std::pow(l.xi0, par.sigma - 1) / be;
    }
    try {
      const DirectResult d = integrate_direct(q, par, 0.0);
      if (d.end != DirectEnd::ReachedEnd) {
        l.outcome = "BackwardSignChange";
      } else {
        const ProfilePoint& o = d.profile.samples.front();
        l.good = o.f > 0 && std::abs(o.df) < 1e-6 * std::max(1.0, o.f);
        l.outcome = l.good ? "GoodProfile" : (o.df < 0 ? "DecreasingToAxis" : "IncreasingAtAxis");
      }
    } catch (const Error& e) {
      l.outcome = std::string("Unbounded: ") + e.what();
    }
    if (!l.good) ++rep.failures;
    rep.launches.push_back(l);
  }
  return rep;
}

}  // namespace blowup

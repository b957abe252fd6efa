#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "blowup/errors.hpp"

namespace blowup {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h0 = 0.0;  // 0 selects an initial step automatically
  double hmax = std::numeric_limits<double>::infinity();
  double hmin = 1e-14;
  long max_steps = 2'000'000;
  double event_tol = 1e-10;
};

/// One accepted Dormand-Prince step with its fourth-order continuous extension.
template <int N>
struct DenseStep {
  using Vec = Eigen::Matrix<double, N, 1>;
  double t0 = 0.0, h = 0.0;
  Vec y0, y1, r2, r3, r4, r5;
  double t1() const { return t0 + h; }
  Vec eval(double t) const {
    const double s = (t - t0) / h, s1 = 1.0 - s;
    return y0 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
};

/// Root of g along a dense step, located by bracketed Illinois iteration to `tol` in t.
template <int N, class G>
double locate_root(const DenseStep<N>& st, G&& g, double tol) {
  double a = st.t0, b = st.t1();
  double ga = g(a, st.y0), gb = g(b, st.y1);
  int side = 0;
  for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
    double c = (a * gb - b * ga) / (gb - ga);
    if (!(std::min(a, b) < c && c < std::max(a, b))) c = 0.5 * (a + b);
    const double gc = g(c, st.eval(c));
    if ((gc > 0) == (gb > 0)) {
      b = c;
      gb = gc;
      if (side == -1) ga *= 0.5;
      side = -1;
    } else {
      a = c;
      ga = gc;
      if (side == 1) gb *= 0.5;
      side = 1;
    }
    if (gc == 0.0) return c;
  }
  return 0.5 * (a + b);
}

/// Adaptive explicit Runge-Kutta pair of order 5(4) (Dormand-Prince) with dense output.
/// Integrates y' = f(t, y) from t0 toward t1 (either direction). `on_step` receives each
/// accepted DenseStep and returns false to stop. Returns the number of accepted steps.
template <int N, class F, class OnStep>
long dopri5(F&& f, double t0, Eigen::Matrix<double, N, 1> y0, double t1, const OdeOptions& opt, OnStep&& on_step) {
  using Vec = Eigen::Matrix<double, N, 1>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const auto scale = [&](const Vec& a, const Vec& b) {
    return (opt.atol + opt.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix();
  };
  const auto rms = [](const Vec& v) { return std::sqrt(v.squaredNorm() / double(v.size())); };

  double t = t0;
  Vec y = y0;
  Vec k1 = f(t, y);
  double h = opt.h0;
  if (h <= 0.0) {
    const Vec sc = scale(y, y);
    const double d0 = rms(y.cwiseQuotient(sc)), d1n = rms(k1.cwiseQuotient(sc));
    double h1 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h1 = std::min(h1, std::abs(t1 - t0));
    const Vec k2 = f(t + dir * h1, (y + dir * h1 * k1).eval());
    const double d2 = rms((k2 - k1).cwiseQuotient(sc)) / h1;
    const double mx = std::max(d1n, d2);
    const double h2 = mx <= 1e-15 ? std::max(1e-6, h1 * 1e-3) : std::pow(0.01 / mx, 0.2);
    h = std::min(100 * h1, h2);
  }
  h = std::min({h, opt.hmax, std::abs(t1 - t0)});
  long steps = 0;
  double err_old = 1e-4;
  bool reject = false;
  DenseStep<N> st;
  while (dir * (t1 - t) > 0.0) {
    if (steps >= opt.max_steps) fail(ErrorCode::StepLimitExceeded, "step limit exceeded");
    if (h < opt.hmin * std::max(1.0, std::abs(t)))
      fail(ErrorCode::IntegrationFailure, "step size underflow");
    if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
    const double hs = dir * h;
    const Vec k2 = f(t + c2 * hs, (y + hs * a21 * k1).eval());
    const Vec k3 = f(t + c3 * hs, (y + hs * (a31 * k1 + a32 * k2)).eval());
    const Vec k4 = f(t + c4 * hs, (y + hs * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const Vec k5 = f(t + c5 * hs, (y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const Vec k6 = f(t + hs, (y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const Vec y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vec k7 = f(t + hs, y1);
    const Vec ev = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = rms(ev.cwiseQuotient(scale(y, y1)));
    if (!std::isfinite(err) || !y1.allFinite()) err = 1e10;
    if (err <= 1.0) {
      // Lund-stabilized (PI) step control.
      double fac = 0.9 * std::pow(err, -0.17) * std::pow(err_old, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (reject) fac = std::min(fac, 1.0);
      err_old = std::max(err, 1e-4);
      st.t0 = t;
      st.h = hs;
      st.y0 = y;
      st.y1 = y1;
      const Vec ydiff = y1 - y;
      const Vec bspl = hs * k1 - ydiff;
      st.r2 = ydiff;
      st.r3 = bspl;
      st.r4 = ydiff - hs * k7 - bspl;
      st.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      ++steps;
      t += hs;
      y = y1;
      k1 = k7;
      reject = false;
      if (!on_step(static_cast<const DenseStep<N>&>(st))) break;
      h = std::min(h * fac, opt.hmax);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      reject = true;
    }
  }
  return steps;
}

}  // namespace blowup

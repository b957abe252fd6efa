#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "blowup/params.hpp"

namespace blowup {

template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// Autonomous systems. Chart variants carry their fixed orientation sign:
/// Minus multiplies the native right-hand side by -1 (used at Q2 and its S5 analogue),
/// Plus keeps it (Q3 and the S5 points with Ybar < 0).
enum class SystemId { S1, S2, S3, S4, S5, S1Center, Inf1, Inf2Minus, Inf2Plus, Inf11, Inf21Minus, Inf21Plus };

const char* to_string(SystemId id);
bool is_chart(SystemId id);
/// The finite system a chart compactifies (S1 or S5); identity for finite systems.
SystemId base_system(SystemId id);

struct PhaseState {
  SystemId system = SystemId::S1;
  Eigen::Vector3d coords = Eigen::Vector3d::Zero();
  double eta = 0.0;
};

struct ProfilePoint {
  double xi = 0.0;
  double f = 0.0;
  double df = 0.0;
};

/// Parameters, exponents and the derived constants shared by all fields.
struct Coefficients {
  double m, p, sigma, alpha, beta;
  Regime regime;
  double ba() const { return beta / alpha; }
  /// (m-1)/(m+p-2): the power of U (or x) appearing in S2 and S3.
  double q() const { return (m - 1.0) / (m + p - 2.0); }
  /// sigma(m-1)+2(p-1), the positive denominator of the exponents.
  double den() const { return sigma * (m - 1.0) + 2.0 * (p - 1.0); }
};

Coefficients coefficients(const Parameters& par);

/// Throws RegimeMismatch/CriticalRegime unless `id` may be evaluated for `c`.
void check_regime(SystemId id, const Coefficients& c);

namespace detail {

template <class S>
S spow(const S& x, double e) {
  using std::abs;
  using std::pow;
  if (x == S(0)) return S(0);
  return x > S(0) ? S(pow(x, S(e))) : S(-pow(-x, S(e)));
}

template <class S>
S sabs(const S& x) {
  return x < S(0) ? S(-x) : x;
}

// Second-order center-manifold graph at P0 of S1: Y = (alpha/beta)(X - Z + T(X,Z)).
struct CenterGraph {
  double k, a, b, c;  // T = k (a X^2 + b X Z + c Z^2), k = alpha/beta
  explicit CenterGraph(const Coefficients& co)
      : k(co.alpha / co.beta),
        a(-(co.m * co.alpha - co.beta) / co.beta),
        b((3.0 * co.beta + 2.0 * co.alpha + 3.0) / co.beta),
        c(-co.alpha * (co.m + co.p - 1.0) / co.beta) {}
  template <class S>
  S y(const S& X, const S& Z) const {
    return S(k) * (X - Z + S(k) * (S(a) * X * X + S(b) * X * Z + S(c) * Z * Z));
  }
  template <class S>
  S yx(const S& X, const S& Z) const {
    return S(k) * (S(1) + S(k) * (S(2 * a) * X + S(b) * Z));
  }
  template <class S>
  S yz(const S& X, const S& Z) const {
    return S(k) * (S(-1) + S(k) * (S(b) * X + S(2 * c) * Z));
  }
};

}  // namespace detail

/// Second-order center-manifold value of Y over (X, Z) near P0 of S1.
double center_manifold_y(double X, double Z, const Coefficients& c);

/// Right-hand sides of the finite systems and of the native infinity charts.
template <class S>
Vec3<S> field(SystemId id, const Vec3<S>& u, const Coefficients& c) {
  using detail::sabs;
  using detail::spow;
  using std::pow;
  const double m = c.m, p = c.p, sg = c.sigma, al = c.alpha, be = c.beta, ba = c.ba();
  const S x = u[0], y = u[1], z = u[2];
  Vec3<S> r;
  switch (id) {
    case SystemId::S1:
      r << x * (S(m - 1) * y - S(2) * x), -y * y - S(ba) * y + x - x * y - z,
          z * (S(m + p - 2) * y + S(sg - 2) * x);
      return r;
    case SystemId::S2: {
      const S xq = spow(x, c.q());
      r << S(m * (m + p - 2)) * x * y, -S(m) * y * y - S(be) * y * z + S(al) * xq - S(pow(sabs(z), S(sg))) * x,
          S(m) * xq;
      return r;
    }
    case SystemId::S3: {
      const S uq = spow(x, c.q());
      r << S(1.0 / c.q()) * x * (S(m - 1) * y - S(2) * uq), -y * y - S(ba) * y + uq * (S(1) - y) - x * z,
          S(c.den() / (m - 1)) * uq * z;
      return r;
    }
    case SystemId::S4:
      r << S(m) * x * (S(m - 1) * y - S(2) * x), -S(m) * y * y - S(be) * y + S(al) * x - S(m) * x * y - x * z,
          S(m) * z * (S(p - 1) * y + S(sg) * x);
      return r;
    case SystemId::S5:
      r << x * (S((m - p) / 2) * y - S((sg + 2) / 2) * x),
          -S((m + p) / 2) * y * y - S(sg / 2) * x * y + x * z - S(ba) * z * y - S(1),
          z * (S((2 - m - p) / 2) * y + S((2 - sg) / 2) * x);
      return r;
    case SystemId::S1Center: {
      const detail::CenterGraph g(c);
      const S yc = g.y(x, z);
      const S dx = x * (S(m - 1) * yc - S(2) * x);
      const S dz = z * (S(m + p - 2) * yc + S(sg - 2) * x);
      r << dx, g.yx(x, z) * dx + g.yz(x, z) * dz, dz;
      return r;
    }
    case SystemId::Inf1:  // coords (y, z, w) around Q1 / Q5 of S1
      r << x + z - S(m) * x * x - S(ba) * x * z - y * z, S(sg) * y - S(1 - p) * x * y, S(2) * z - S(m - 1) * x * z;
      return r;
    case SystemId::Inf2Minus:
    case SystemId::Inf2Plus: {  // coords (x, z, w) around Q2 / Q3 of S1
      const S s = S(id == SystemId::Inf2Plus ? 1.0 : -1.0);
      r << -S(m) * x + x * x - S(ba) * x * z + x * x * z - x * y * z,
          -S(m + p - 1) * y - S(ba) * y * z - S(sg - 1) * x * y - y * y * z + x * y * z,
          -z - S(ba) * z * z + x * z * z - x * z - y * z * z;
      return s * r;
    }
    case SystemId::Inf11:  // coords (y, z, w) of S5
      r << x + y - z * z - S(m) * x * x - S(ba) * x * y, S(2) * y - S(m - 1) * x * y,
          S((sg + 2) / 2) * z - S((m - p) / 2) * x * z;
      return r;
    case SystemId::Inf21Minus:
    case SystemId::Inf21Plus: {  // coords (x, z, w) of S5
      const S s = S(id == SystemId::Inf21Plus ? 1.0 : -1.0);
      r << -S(m) * x - S(ba) * x * y + x * x - x * z * z + x * x * y,
          -y - x * y - S(ba) * y * y - y * z * z + x * y * y,
          -S((m + p) / 2) * z - S(ba) * y * z - S(sg / 2) * x * z - z * z * z + x * y * z;
      return s * r;
    }
  }
  return Vec3<S>::Zero();
}

/// Analytic Jacobians of `field`.
template <class S>
Mat3<S> field_jacobian(SystemId id, const Vec3<S>& u, const Coefficients& c) {
  using detail::sabs;
  using detail::spow;
  using std::pow;
  const double m = c.m, p = c.p, sg = c.sigma, al = c.alpha, be = c.beta, ba = c.ba();
  const S x = u[0], y = u[1], z = u[2];
  Mat3<S> J;
  switch (id) {
    case SystemId::S1:
      J << S(m - 1) * y - S(4) * x, S(m - 1) * x, S(0),  //
          S(1) - y, -S(2) * y - S(ba) - x, S(-1),           //
          S(sg - 2) * z, S(m + p - 2) * z, S(m + p - 2) * y + S(sg - 2) * x;
      return J;
    case SystemId::S2: {
      const double q = c.q();
      const S dxq = S(q) * spow(sabs(x), q - 1.0);
      const S az = sabs(z);
      const S sgnz = z < S(0) ? S(-1) : S(1);
      const S dzs = sg == 1.0 ? sgnz : S(sg) * S(pow(az, S(sg - 1))) * sgnz;
      J << S(m * (m + p - 2)) * y, S(m * (m + p - 2)) * x, S(0),  //
          S(al) * dxq - S(pow(az, S(sg))), -S(2 * m) * y - S(be) * z, -S(be) * y - dzs * x,  //
          S(m) * dxq, S(0), S(0);
      return J;
    }
    case SystemId::S3: {
      const double q = c.q(), k3 = c.den() / (m - 1);
      const S uq = spow(x, q);
      const S duq = S(q) * spow(sabs(x), q - 1.0);
      J << S(1.0 / q) * (S(m - 1) * y - S(2) * uq) - S(2) * uq, S((m - 1) / q) * x, S(0),  //
          duq * (S(1) - y) - z, -S(2) * y - S(ba) - uq, -x,                                   //
          S(k3) * duq * z, S(0), S(k3) * uq;
      return J;
    }
    case SystemId::S4:
      J << S(m) * (S(m - 1) * y - S(4) * x), S(m * (m - 1)) * x, S(0),  //
          S(al) - S(m) * y - z, -S(2 * m) * y - S(be) - S(m) * x, -x,    //
          S(m * sg) * z, S(m * (p - 1)) * z, S(m) * (S(p - 1) * y + S(sg) * x);
      return J;
    case SystemId::S5:
      J << S((m - p) / 2) * y - S(sg + 2) * x, S((m - p) / 2) * x, S(0),  //
          -S(sg / 2) * y + z, -S(m + p) * y - S(sg / 2) * x - S(ba) * z, x - S(ba) * y,  //
          S((2 - sg) / 2) * z, S((2 - m - p) / 2) * z, S((2 - m - p) / 2) * y + S((2 - sg) / 2) * x;
      return J;
    case SystemId::S1Center: {
      const detail::CenterGraph g(c);
      const S yc = g.y(x, z), gx = g.yx(x, z), gz = g.yz(x, z);
      const S k2 = S(g.k * g.k);
      const S gxx = k2 * S(2 * g.a), gxz = k2 * S(g.b), gzz = k2 * S(2 * g.c);
      const S dx = x * (S(m - 1) * yc - S(2) * x);
      const S dz = z * (S(m + p - 2) * yc + S(sg - 2) * x);
      const S dxdx = S(m - 1) * yc - S(2) * x + x * (S(m - 1) * gx - S(2));
      const S dxdz = x * S(m - 1) * gz;
      const S dzdx = z * (S(m + p - 2) * gx + S(sg - 2));
      const S dzdz = S(m + p - 2) * yc + S(sg - 2) * x + z * S(m + p - 2) * gz;
      J << dxdx, S(0), dxdz,  //
          gxx * dx + gx * dxdx + gxz * dz + gz * dzdx, S(0), gxz * dx + gx * dxdz + gzz * dz + gz * dzdz,  //
          dzdx, S(0), dzdz;
      return J;
    }
    case SystemId::Inf1:
      J << S(1) - S(2 * m) * x - S(ba) * z, -z, S(1) - S(ba) * x - y,  //
          -S(1 - p) * y, S(sg) - S(1 - p) * x, S(0),                    //
          -S(m - 1) * z, S(0), S(2) - S(m - 1) * x;
      return J;
    case SystemId::Inf2Minus:
    case SystemId::Inf2Plus: {
      const S s = S(id == SystemId::Inf2Plus ? 1.0 : -1.0);
      J << -S(m) + S(2) * x - S(ba) * z + S(2) * x * z - y * z, -x * z, -S(ba) * x + x * x - x * y,
          -S(sg - 1) * y + y * z, -S(m + p - 1) - S(ba) * z - S(sg - 1) * x - S(2) * y * z + x * z,
          -S(ba) * y - y * y + x * y,  //
          z * z - z, -z * z, S(-1) - S(2 * ba) * z + S(2) * x * z - x - S(2) * y * z;
      return s * J;
    }
    case SystemId::Inf11:
      J << S(1) - S(2 * m) * x - S(ba) * y, S(1) - S(ba) * x, -S(2) * z,  //
          -S(m - 1) * y, S(2) - S(m - 1) * x, S(0),                        //
          -S((m - p) / 2) * z, S(0), S((sg + 2) / 2) - S((m - p) / 2) * x;
      return J;
    case SystemId::Inf21Minus:
    case SystemId::Inf21Plus: {
      const S s = S(id == SystemId::Inf21Plus ? 1.0 : -1.0);
      J << -S(m) - S(ba) * y + S(2) * x - z * z + S(2) * x * y, -S(ba) * x + x * x, -S(2) * x * z,  //
          -y + y * y, S(-1) - x - S(2 * ba) * y - z * z + S(2) * x * y, -S(2) * y * z,             //
          -S(sg / 2) * z + y * z, -S(ba) * z + x * z,
          -S((m + p) / 2) - S(ba) * y - S(sg / 2) * x - S(3) * z * z + x * y;
      return s * J;
    }
  }
  return Mat3<S>::Zero();
}

/// Homogenized field (xbar, W) -> W^2 F(xbar / W) of S1 or S5 (polynomial of degree 2).
template <class S>
Vec3<S> homogenized_field(SystemId base, const Vec3<S>& xb, const S& w, const Coefficients& c) {
  const double m = c.m, p = c.p, sg = c.sigma, ba = c.ba();
  const S X = xb[0], Y = xb[1], Z = xb[2];
  Vec3<S> r;
  if (base == SystemId::S1) {
    r << X * (S(m - 1) * Y - S(2) * X), -Y * Y - S(ba) * Y * w + X * w - X * Y - Z * w,
        Z * (S(m + p - 2) * Y + S(sg - 2) * X);
  } else {
    r << X * (S((m - p) / 2) * Y - S((sg + 2) / 2) * X),
        -S((m + p) / 2) * Y * Y - S(sg / 2) * X * Y + X * Z - S(ba) * Z * Y - w * w,
        Z * (S((2 - m - p) / 2) * Y + S((2 - sg) / 2) * X);
  }
  return r;
}

/// A chart of the Poincare sphere: divide by coordinate `pivot` (0..2), orientation `sign`.
struct Chart {
  SystemId base = SystemId::S1;
  int pivot = 0;
  int sign = 1;
};

/// Field of a generic chart. Chart coordinates are the two non-pivot ratios followed by W/x_pivot.
template <class S>
Vec3<S> chart_field(const Chart& ch, const Vec3<S>& v, const Coefficients& c) {
  Vec3<S> xb;
  int k = 0;
  int idx[2];
  for (int i = 0; i < 3; ++i) {
    if (i == ch.pivot) {
      xb[i] = S(1);
    } else {
      xb[i] = v[k];
      idx[k++] = i;
    }
  }
  const S w = v[2];
  const Vec3<S> F = homogenized_field(ch.base, xb, w, c);
  const S Fj = F[ch.pivot];
  Vec3<S> r;
  r << F[idx[0]] - v[0] * Fj, F[idx[1]] - v[1] * Fj, -w * Fj;
  return S(double(ch.sign)) * r;
}

/// Jacobian of `chart_field` by complex-step differentiation (exact for polynomials).
Eigen::Matrix3d chart_jacobian(const Chart& ch, const Eigen::Vector3d& v, const Coefficients& c);

/// Residual of the degree-2 equilibrium conditions on the sphere at infinity, evaluated at xbar.
Eigen::Vector3d poincare_residual(SystemId base, const Eigen::Vector3d& xbar, const Coefficients& c);

/// Validating wrappers.
Eigen::Vector3d vector_field(const PhaseState& state, const Parameters& par);
Eigen::Matrix3d jacobian(const PhaseState& state, const Parameters& par);
Eigen::Vector3d poincare_infinity_field(const PhaseState& state, const Parameters& par);

PhaseState profile_to_phase(const ProfilePoint& pt, SystemId system, const Parameters& par);
ProfilePoint phase_to_profile(const PhaseState& state, const Parameters& par);

/// Same maps with precomputed coefficients (no regime checks), for hot loops.
Eigen::Vector3d to_phase(const ProfilePoint& pt, SystemId system, const Coefficients& c);
ProfilePoint to_profile(const Eigen::Vector3d& u, SystemId system, const Coefficients& c);

/// Critical point P2 of S1 and its analogue in S4.
Eigen::Vector3d p2_location(const Coefficients& c);

}  // namespace blowup

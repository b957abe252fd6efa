#include "blowup/phase_systems.hpp"

#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(SystemId id) {
  switch (id) {
    case SystemId::S1: return "S1";
    case SystemId::S2: return "S2";
    case SystemId::S3: return "S3";
    case SystemId::S4: return "S4";
    case SystemId::S5: return "S5";
    case SystemId::S1Center: return "S1_center";
    case SystemId::Inf1: return "Inf1";
    case SystemId::Inf2Minus: return "Inf2(-)";
    case SystemId::Inf2Plus: return "Inf2(+)";
    case SystemId::Inf11: return "Inf11";
    case SystemId::Inf21Minus: return "Inf21(-)";
    case SystemId::Inf21Plus: return "Inf21(+)";
  }
  return "?";
}

bool is_chart(SystemId id) {
  switch (id) {
    case SystemId::Inf1:
    case SystemId::Inf2Minus:
    case SystemId::Inf2Plus:
    case SystemId::Inf11:
    case SystemId::Inf21Minus:
    case SystemId::Inf21Plus: return true;
    default: return false;
  }
}

SystemId base_system(SystemId id) {
  switch (id) {
    case SystemId::Inf1:
    case SystemId::Inf2Minus:
    case SystemId::Inf2Plus: return SystemId::S1;
    case SystemId::Inf11:
    case SystemId::Inf21Minus:
    case SystemId::Inf21Plus: return SystemId::S5;
    default: return id;
  }
}

Coefficients coefficients(const Parameters& par) {
  const Exponents e = derive_exponents(par);
  return {par.m, par.p, par.sigma, e.alpha, e.beta, classify_regime(par)};
}

void check_regime(SystemId id, const Coefficients& c) {
  if (c.regime == Regime::Critical) fail(ErrorCode::CriticalRegime, "phase-space systems are undefined for m+p=2");
  const bool sub = base_system(id) == SystemId::S5;
  if (sub && c.regime != Regime::Subcritical)
    fail(ErrorCode::RegimeMismatch, std::string(to_string(id)) + " requires m+p<2");
  if (!sub && c.regime != Regime::Supercritical)
    fail(ErrorCode::RegimeMismatch, std::string(to_string(id)) + " requires m+p>2");
}

double center_manifold_y(double X, double Z, const Coefficients& c) { return detail::CenterGraph(c).y(X, Z); }

Eigen::Matrix3d chart_jacobian(const Chart& ch, const Eigen::Vector3d& v, const Coefficients& c) {
  using C = std::complex<double>;
  constexpr double h = 1e-30;
  Eigen::Matrix3d J;
  for (int j = 0; j < 3; ++j) {
    Vec3<C> z = v.cast<C>();
    z[j] += C(0.0, h);
    J.col(j) = chart_field(ch, z, c).imag() / h;
  }
  return J;
}

Eigen::Vector3d poincare_residual(SystemId base, const Eigen::Vector3d& xb, const Coefficients& c) {
  const Eigen::Vector3d P = homogenized_field<double>(base, xb, 0.0, c);
  return {xb[0] * P[1] - xb[1] * P[0], xb[0] * P[2] - xb[2] * P[0], xb[1] * P[2] - xb[2] * P[1]};
}

Eigen::Vector3d vector_field(const PhaseState& s, const Parameters& par) {
  const Coefficients c = coefficients(par);
  check_regime(s.system, c);
  if (s.system == SystemId::S2 && s.coords[2] < 0.0) fail(ErrorCode::DegenerateInput, "S2 requires z >= 0");
  return field<double>(s.system, s.coords, c);
}

Eigen::Matrix3d jacobian(const PhaseState& s, const Parameters& par) {
  const Coefficients c = coefficients(par);
  check_regime(s.system, c);
  if (s.system == SystemId::S2 && s.coords[2] < 0.0) fail(ErrorCode::DegenerateInput, "S2 requires z >= 0");
  return field_jacobian<double>(s.system, s.coords, c);
}

Eigen::Vector3d poincare_infinity_field(const PhaseState& s, const Parameters& par) {
  if (!is_chart(s.system)) fail(ErrorCode::Unsupported, "not an infinity chart");
  return vector_field(s, par);
}

namespace {

// Solves [[a, b], [c, d]] [lf, lx] = [r1, r2] for (ln f, ln xi).
std::pair<double, double> solve2(double a, double b, double c, double d, double r1, double r2) {
  const double det = a * d - b * c;
  return {(r1 * d - b * r2) / det, (a * r2 - c * r1) / det};
}

}  // namespace

Eigen::Vector3d to_phase(const ProfilePoint& pt, SystemId id, const Coefficients& c) {
  const double m = c.m, p = c.p, sg = c.sigma, al = c.alpha;
  const double xi = pt.xi, f = pt.f, df = pt.df;
  using std::pow;
  switch (id) {
    case SystemId::S1:
    case SystemId::S1Center:
      return {(m / al) * pow(f, m - 1) / (xi * xi), (m / al) * pow(f, m - 2) * df / xi,
              (m / (al * al)) * pow(xi, sg - 2) * pow(f, m + p - 2)};
    case SystemId::S2: return {pow(f, m + p - 2), pow(f, m - 2) * df, xi};
    case SystemId::S3: {
      const Eigen::Vector3d u = to_phase(pt, SystemId::S1, c);
      const double U = pow(u[0], 1.0 / c.q());
      return {U, u[1], u[2] / U};
    }
    case SystemId::S4: return {pow(f, m - 1) / (xi * xi), pow(f, m - 2) * df / xi, pow(xi, sg) * pow(f, p - 1)};
    case SystemId::S5: {
      const double sm = std::sqrt(m);
      return {sm * pow(xi, -(sg + 2) / 2) * pow(f, (m - p) / 2), sm * pow(xi, -sg / 2) * pow(f, (m - p - 2) / 2) * df,
              (al / sm) * pow(xi, (2 - sg) / 2) * pow(f, (2 - m - p) / 2)};
    }
    default: fail(ErrorCode::Unsupported, std::string("no profile variables for ") + to_string(id));
  }
}

ProfilePoint to_profile(const Eigen::Vector3d& u, SystemId id, const Coefficients& c) {
  const double m = c.m, p = c.p, sg = c.sigma, al = c.alpha;
  using std::exp;
  using std::log;
  using std::pow;
  switch (id) {
    case SystemId::S1:
    case SystemId::S1Center: {
      if (!(u[0] > 0.0 && u[2] > 0.0)) fail(ErrorCode::DegenerateInput, "S1 inverse needs X>0, Z>0");
      const auto [lf, lx] = solve2(m - 1, -2, m + p - 2, sg - 2, log(al * u[0] / m), log(al * al * u[2] / m));
      const double f = exp(lf), xi = exp(lx);
      return {xi, f, u[1] * (al / m) * xi * pow(f, 2 - m)};
    }
    case SystemId::S2: {
      if (!(u[0] > 0.0 && u[2] >= 0.0)) fail(ErrorCode::DegenerateInput, "S2 inverse needs x>0, z>=0");
      const double f = pow(u[0], 1.0 / (m + p - 2));
      return {u[2], f, u[1] * pow(f, 2 - m)};
    }
    case SystemId::S3: {
      if (!(u[0] > 0.0 && u[2] > 0.0)) fail(ErrorCode::DegenerateInput, "S3 inverse needs U>0, V>0");
      const double k3 = c.den() / (m - 1);
      const double xi = pow(u[2] * al * pow(m / al, -(1 - p) / (m - 1)), 1.0 / k3);
      const double X = pow(u[0], c.q());
      const double f = pow(al * X * xi * xi / m, 1.0 / (m - 1));
      return {xi, f, u[1] * (al / m) * xi * pow(f, 2 - m)};
    }
    case SystemId::S4: {
      if (!(u[0] > 0.0 && u[2] > 0.0)) fail(ErrorCode::DegenerateInput, "S4 inverse needs Xbar>0, Zbar>0");
      const auto [lf, lx] = solve2(m - 1, -2, p - 1, sg, log(u[0]), log(u[2]));
      const double f = exp(lf), xi = exp(lx);
      return {xi, f, u[1] * xi * pow(f, 2 - m)};
    }
    case SystemId::S5: {
      if (!(u[0] > 0.0 && u[2] > 0.0)) fail(ErrorCode::DegenerateInput, "S5 inverse needs X>0, Z>0");
      const double sm = std::sqrt(m);
      const auto [lf, lx] =
          solve2((m - p) / 2, -(sg + 2) / 2, (2 - m - p) / 2, (2 - sg) / 2, log(u[0] / sm), log(u[2] * sm / al));
      const double f = exp(lf), xi = exp(lx);
      return {xi, f, u[1] * pow(xi, sg / 2) * pow(f, -(m - p - 2) / 2) / sm};
    }
    default: fail(ErrorCode::Unsupported, std::string("no profile variables for ") + to_string(id));
  }
}

PhaseState profile_to_phase(const ProfilePoint& pt, SystemId system, const Parameters& par) {
  const Coefficients c = coefficients(par);
  if (!(pt.f > 0.0) || !std::isfinite(pt.f)) fail(ErrorCode::DegenerateInput, "profile transform is singular at f=0");
  if (system == SystemId::S2 ? pt.xi < 0.0 : !(pt.xi > 0.0))
    fail(ErrorCode::DegenerateInput, "profile transform is singular at xi=0");
  return {system, to_phase(pt, system, c), 0.0};
}

ProfilePoint phase_to_profile(const PhaseState& s, const Parameters& par) {
  return to_profile(s.coords, s.system, coefficients(par));
}

Eigen::Vector3d p2_location(const Coefficients& c) {
  return {(c.m - 1) / (2 * (c.m + 1) * c.alpha), 1.0 / ((c.m + 1) * c.alpha), 0.0};
}

}  // namespace blowup

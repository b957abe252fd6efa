#include "blowup/date_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(PortraitTag t) {
  switch (t) {
    case PortraitTag::Portrait8_EllipticSector: return "Portrait8_EllipticSector";
    case PortraitTag::Portrait3_NoReentry: return "Portrait3_NoReentry";
    case PortraitTag::Unclassified: return "Unclassified";
  }
  return "?";
}

QuadraticSystem2D p0_center_system(const Parameters& par) {
  const double al = derive_exponents(par).alpha;
  QuadraticSystem2D s;
  s.P[0][0][0] = 1.0;
  s.P[0][0][1] = s.P[0][1][0] = -(par.m - 1) * al / 2;
  s.P[1][0][1] = s.P[1][1][0] = 1.0;
  s.P[1][1][1] = -(par.m + par.p - 2) * al;
  return s;
}

QuadraticSystem2D transform(const QuadraticSystem2D& sys, const Eigen::Matrix2d& A) {
  const Eigen::Matrix2d B = A.inverse();
  QuadraticSystem2D out;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int mu = 0; mu < 2; ++mu) {
        double s = 0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (int n = 0; n < 2; ++n) s += A(k, i) * sys.P[i][j][n] * B(j, l) * B(n, mu);
        out.P[k][l][mu] = s;
      }
  for (int k = 0; k < 2; ++k) out.P[k][0][1] = out.P[k][1][0] = 0.5 * (out.P[k][0][1] + out.P[k][1][0]);
  return out;
}

namespace {

int delta(int a, int b) { return a == b ? 1 : 0; }

// Levi-Civita symbol with eps[0][1] = -1, eps[1][0] = 1.
constexpr double eps[2][2] = {{0.0, -1.0}, {1.0, 0.0}};

}  // namespace

Decomposition decompose(const QuadraticSystem2D& sys) {
  for (int k = 0; k < 2; ++k)
    if (std::abs(sys.P[k][0][1] - sys.P[k][1][0]) >
        1e-12 * std::max({1.0, std::abs(sys.P[k][0][1]), std::abs(sys.P[k][1][0])}))
      fail(ErrorCode::AsymmetricTensor, "coefficient tensor is not symmetric");
  Decomposition d;
  for (int l = 0; l < 2; ++l) d.p[l] = sys.P[0][l][0] + sys.P[1][l][1];
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int mu = 0; mu < 2; ++mu)
        d.Q[k][l][mu] = sys.P[k][l][mu] - (delta(l, k) * d.p[mu] + delta(mu, k) * d.p[l]) / 3.0;
  return d;
}

QuadraticSystem2D recompose(const Decomposition& d) {
  QuadraticSystem2D s;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int mu = 0; mu < 2; ++mu)
        s.P[k][l][mu] = d.Q[k][l][mu] + (delta(l, k) * d.p[mu] + delta(mu, k) * d.p[l]) / 3.0;
  return s;
}

DateInvariants invariants(const QuadraticSystem2D& sys) {
  const Decomposition dec = decompose(sys);
  DateInvariants inv;
  inv.p = dec.p;
  inv.Q = dec.Q;
  const auto& Q = dec.Q;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      double s = 0;
      for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
          for (int rho = 0; rho < 2; ++rho)
            for (int sg = 0; sg < 2; ++sg) s += eps[mu][nu] * eps[rho][sg] * Q[k][mu][rho] * Q[l][nu][sg];
      inv.h(k, l) = 0.5 * s;
    }
  const auto& p = inv.p;
  inv.H = p.dot(inv.h * p);
  double dsum = 0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu) dsum += eps[k][l] * eps[mu][nu] * inv.h(k, mu) * inv.h(l, nu);
  inv.D = -2.0 * dsum;
  const Eigen::Vector2d pt(p[1], -p[0]);
  double F = 0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      double qp = 0;
      for (int s = 0; s < 2; ++s) qp += Q[s][k][l] * p[s];
      F += pt[k] * pt[l] * qp;
    }
  inv.F = F;
  for (int n = 1; n <= 3; ++n)
    inv.K[n - 1] = F + 9.0 * std::pow(-2.0, n - 3) * inv.H - 27.0 * std::pow(-8.0, n - 3) * inv.D;
  inv.scale = std::abs(F) + 9.0 * std::abs(inv.H) + 27.0 * std::abs(inv.D);
  return inv;
}

Classification classify(const DateInvariants& inv) {
  const double tol = 1e-12 * std::max(1.0, inv.scale);
  const double vals[3] = {inv.D, inv.K[1], inv.K[2]};
  const char* names[3] = {"D", "K2", "K3"};
  Classification c;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(vals[i]) <= tol) fail(ErrorCode::DegenerateSigns, std::string(names[i]) + " vanishes within tolerance");
    if (i) c.signs += ",";
    c.signs += std::string(names[i]) + (vals[i] < 0 ? "<0" : ">0");
  }
  const bool d = inv.D < 0, k2 = inv.K[1] < 0, k3 = inv.K[2] < 0;
  if (d && k2 && k3) c.tag = PortraitTag::Portrait8_EllipticSector;
  else if (d && !k2 && k3) c.tag = PortraitTag::Portrait3_NoReentry;
  return c;
}

DateClosedForms p0_closed_forms(const Parameters& par) {
  const double m = par.m, p = par.p, al = derive_exponents(par).alpha, a2 = al * al;
  DateClosedForms c;
  c.h11 = -a2 * (1 - p) * (1 - p) / 9;
  c.h12 = al * (1 - p) / 18;
  c.h22 = -1.0 / 9;
  c.H = -(a2 / 9) * (3 * (p - 1) * (p - 1) + 2.25 * (m - 1) * (m - 1));
  c.D = -a2 * (1 - p) * (1 - p) / 27;
  c.F = -(a2 / 2) * (3 * m + 2 * p - 5) * (3 * m - 2 * p - 1);
  c.K2 = -(27.0 / 8) * a2 * (m + p - 2) * (m - p);
  c.K3 = -(27.0 / 4) * a2 * (m - 1) * (m - 1);
  return c;
}

}  // namespace blowup

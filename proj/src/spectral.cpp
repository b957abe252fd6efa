#include "blowup/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace blowup {

namespace {

cplx polish(cplx z, double a2, double a1, double a0) {
  for (int i = 0; i < 3; ++i) {
    const cplx f = ((z + a2) * z + a1) * z + a0;
    const cplx d = (3.0 * z + 2.0 * a2) * z + a1;
    if (std::abs(d) < 1e-300) break;
    const cplx step = f / d;
    const cplx next = z - step;
    const cplx fn = ((next + a2) * next + a1) * next + a0;
    if (std::abs(fn) >= std::abs(f)) break;
    z = next;
  }
  return z;
}

// Stable roots of l^2 + b l + c.
std::array<cplx, 2> quadratic_roots(double b, double c) {
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0) return {cplx(0.0), cplx(0.0)};
    return {cplx(q), cplx(c / q)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {cplx(-0.5 * b, -im), cplx(-0.5 * b, im)};
}

double real_cubic_root(double a2, double a1, double a0) {
  // One real root of the depressed cubic t^3 + pt + q, shifted back.
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  double t;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    t = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
  } else if (p < 0.0) {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    t = r * std::cos(std::acos(arg) / 3.0);
  } else {
    t = std::cbrt(-q);
  }
  double l = t - a2 / 3.0;
  for (int i = 0; i < 4; ++i) {
    const double f = ((l + a2) * l + a1) * l + a0;
    const double d = (3.0 * l + 2.0 * a2) * l + a1;
    if (d == 0.0) break;
    const double next = l - f / d;
    if (std::abs(((next + a2) * next + a1) * next + a0) >= std::abs(f)) break;
    l = next;
  }
  return l;
}

}  // namespace

std::array<cplx, 3> cubic_roots(double a2, double a1, double a0) {
  std::array<cplx, 3> r;
  if (a0 == 0.0) {
    const auto q = quadratic_roots(a2, a1);
    r = {cplx(0.0), q[0], q[1]};
  } else {
    const double l = real_cubic_root(a2, a1, a0);
    // Deflate: l^2 + b l + c with b = a2 + l, c = -a0 / l.
    const auto q = quadratic_roots(a2 + l, -a0 / l);
    r = {cplx(l), polish(q[0], a2, a1, a0), polish(q[1], a2, a1, a0)};
  }
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return r;
}

namespace {

using Vec3c = Eigen::Vector3cd;

Vec3c cross(const Vec3c& a, const Vec3c& b) {
  return Vec3c(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Orthonormal basis of the kernel of a (numerically) rank-deficient matrix.
std::vector<Vec3c> kernel(const Eigen::Matrix3cd& M, double scale) {
  const double tol = 1e-9 * std::max(scale, 1e-300);
  Vec3c best = Vec3c::Zero();
  double bestn = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec3c c = cross(M.row(i).transpose(), M.row(j).transpose());
      if (c.norm() > bestn) {
        bestn = c.norm();
        best = c;
      }
    }
  if (bestn > tol * scale) return {best / bestn};
  // Rank <= 1: kernel is the plane orthogonal (bilinearly) to the largest row.
  int r = 0;
  for (int i = 1; i < 3; ++i)
    if (M.row(i).norm() > M.row(r).norm()) r = i;
  const Vec3c row = M.row(r).transpose();
  if (row.norm() <= tol) return {Vec3c(1, 0, 0), Vec3c(0, 1, 0), Vec3c(0, 0, 1)};
  // Vectors v with row . v = 0 (no conjugation).
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(row[i]) > std::abs(row[k])) k = i;
  std::vector<Vec3c> out;
  for (int i = 0; i < 3; ++i) {
    if (i == k) continue;
    Vec3c v = Vec3c::Zero();
    v[i] = 1.0;
    v[k] = -row[i] / row[k];
    out.push_back(v.normalized());
  }
  return out;
}

}  // namespace

EigenData eigen_closed_form(const Eigen::Matrix3d& A) {
  const double tr = A.trace();
  const double c2 = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) + A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0) +
                    A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  const double det = A.determinant();
  EigenData out;
  out.values = cubic_roots(-tr, c2, -det);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i) {
    // Eigenvalues within the grouping tolerance share one kernel computation.
    int first = i;
    for (int j = 0; j < i; ++j)
      if (std::abs(out.values[j] - out.values[i]) < 1e-9 * scale) {
        first = j;
        break;
      }
    const Eigen::Matrix3cd M = A.cast<cplx>() - out.values[first] * Eigen::Matrix3cd::Identity();
    const auto ker = kernel(M, scale);
    const int slot = i - first;
    const Vec3c v = ker[std::min<std::size_t>(slot, ker.size() - 1)];
    // Fix the phase so the largest component is real and positive.
    int k = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(v[j]) > std::abs(v[k]) + 1e-14) k = j;
    out.vectors.col(i) = v * (std::abs(v[k]) / v[k]);
  }
  return out;
}

}  // namespace blowup

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace blowup {

using cplx = std::complex<double>;

/// Roots of l^3 + a2 l^2 + a1 l + a0, sorted by (real, imag).
std::array<cplx, 3> cubic_roots(double a2, double a1, double a0);

struct EigenData {
  std::array<cplx, 3> values;
  Eigen::Matrix3cd vectors;  // column i belongs to values[i], unit norm
};

/// Eigenvalues from the characteristic polynomial, eigenvectors from kernels of A - lambda I.
EigenData eigen_closed_form(const Eigen::Matrix3d& A);

}  // namespace blowup

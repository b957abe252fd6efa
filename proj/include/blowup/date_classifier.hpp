#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "blowup/params.hpp"

namespace blowup {

/// Coefficient tensor P[k][l][mu] of x_k' = sum P[k][l][mu] x_l x_mu (symmetric in l, mu).
using Tensor3 = std::array<std::array<std::array<double, 2>, 2>, 2>;

struct QuadraticSystem2D {
  Tensor3 P{};
};

/// Quadratic part of the center-manifold flow at P0 in (X, Z), time rescaled by beta.
QuadraticSystem2D p0_center_system(const Parameters& par);

/// Coordinate change v = A u applied to the system.
QuadraticSystem2D transform(const QuadraticSystem2D& sys, const Eigen::Matrix2d& A);

struct Decomposition {
  Eigen::Vector2d p;
  Tensor3 Q{};
};

Decomposition decompose(const QuadraticSystem2D& sys);
/// Inverse of decompose.
QuadraticSystem2D recompose(const Decomposition& d);

enum class PortraitTag { Portrait8_EllipticSector, Portrait3_NoReentry, Unclassified };

const char* to_string(PortraitTag t);

struct DateInvariants {
  Eigen::Vector2d p;
  Tensor3 Q{};
  Eigen::Matrix2d h;
  double H = 0, D = 0, F = 0;
  std::array<double, 3> K{};  // K1, K2, K3
  /// Magnitude of the terms entering K2/K3, used for the degeneracy tolerance.
  double scale = 1.0;
};

DateInvariants invariants(const QuadraticSystem2D& sys);

struct Classification {
  PortraitTag tag = PortraitTag::Unclassified;
  std::string signs;  // e.g. "D<0,K2<0,K3<0"
};

/// Throws DegenerateSigns when D, K2 or K3 is within 1e-12 (relative to the term scale) of zero.
Classification classify(const DateInvariants& inv);

/// Closed forms of the P0-system invariants, keyed as in DateInvariants.
struct DateClosedForms {
  double h11, h12, h22, H, D, F, K2, K3;
};
DateClosedForms p0_closed_forms(const Parameters& par);

}  // namespace blowup

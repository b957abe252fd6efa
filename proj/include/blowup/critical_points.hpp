#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "blowup/phase_systems.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

enum class Interpretation {
  Unset,
  EllipticOriginTypeII,  // P0: profiles with (beh.02) at 0, Type II contact at the interface
  TypeIInterface,
  TypeIIInterface,
  GoodOriginP2,
  PositiveAtOrigin,
  SignChange,
  OriginRoot,
  NoProfile,
};

const char* to_string(Interpretation i);

struct ManifoldDims {
  int stable = 0, unstable = 0, center = 0;
};

struct CriticalPointReport {
  SystemId system = SystemId::S1;
  std::string label;
  bool at_infinity = false;
  Eigen::VectorXd location;  // 3-vector, or (Xbar, Ybar, Zbar, W) on the sphere
  Chart chart;               // infinity points: chart used for the linearization
  std::optional<SystemId> native_chart;
  Eigen::Vector3d chart_coords = Eigen::Vector3d::Zero();
  bool linearized = false;
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
  std::array<cplx, 3> eigenvalues{};
  Eigen::Matrix3cd eigenvectors = Eigen::Matrix3cd::Zero();
  ManifoldDims dims;
  Interpretation interpretation = Interpretation::Unset;
  double residual = 0.0;
};

/// S2 takes interface locations xi0, S3 takes v0 values in `samples`.
std::vector<CriticalPointReport> enumerate_finite(SystemId system, const Parameters& par,
                                                  const std::vector<double>& samples = {});
std::vector<CriticalPointReport> enumerate_infinity(SystemId system, const Parameters& par);

/// Fills matrix, eigen data, dims and interpretation. Throws NotACriticalPoint.
CriticalPointReport linearize(CriticalPointReport point, const Parameters& par);

ManifoldDims manifold_dims(const std::array<cplx, 3>& values, double scale);

enum class ExpansionKind { Beh02, BehP2, BehP1, TypeIIContact, Q5Root, Q1Constant };

const char* to_string(ExpansionKind k);

/// Leading-order local profile near a critical point.
struct LocalExpansion {
  ExpansionKind kind = ExpansionKind::Beh02;
  std::string anchor;
  Parameters params;
  double alpha = 0.0, beta = 0.0;
  std::vector<double> free_constants;
  /// xi0 for interface kinds, 0 for origin kinds.
  double anchor_xi = 0.0;
  bool at_origin() const { return anchor_xi == 0.0; }
  /// (f, f') at `xi`.
  ProfilePoint evaluate(double xi) const;
  /// Point at distance `offset` from the anchor, on the profile side.
  ProfilePoint at_offset(double offset) const { return evaluate(at_origin() ? offset : anchor_xi - offset); }
};

/// free_constants: Beh02 {K}; BehP1 {K} or use interface_expansion; TypeIIContact {C};
/// Q5Root {K}; Q1Constant {a, b}; BehP2 none.
LocalExpansion local_expansion(const CriticalPointReport& point, const Parameters& par,
                               const std::vector<double>& free_constants);
LocalExpansion local_expansion(ExpansionKind kind, const Parameters& par, const std::vector<double>& free_constants);

/// Type I expansion with interface at xi0, or Type II contact with interface at xi0.
LocalExpansion type1_at(double xi0, const Parameters& par);
LocalExpansion type2_at(double xi0, const Parameters& par);

/// Normalized residual of the profile equation for an expansion at `offset` from its anchor.
double ssode_residual(const LocalExpansion& e, double offset);

/// Interface-sphere denominator of the outgoing P2 eigenvector (asserted negative in tests).
double p2_eigvec_denominator(const Parameters& par);

}  // namespace blowup

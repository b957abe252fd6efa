#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "blowup/critical_points.hpp"
#include "blowup/ode.hpp"
#include "blowup/params.hpp"
#include "blowup/phase_systems.hpp"

namespace blowup {

enum class TerminationKind { EnteredPoint, LeftDomain, SignChange, StepLimit, Escaped, Completed };

const char* to_string(TerminationKind k);

struct Termination {
  TerminationKind kind = TerminationKind::Completed;
  std::string label;      // point label, or escape direction such as "Y->-inf"
  double distance = 0.0;  // distance to the entered point
  int coord = -1;         // coordinate index for SignChange
  std::string describe() const;
};

struct OrbitSample {
  double eta = 0.0;
  Eigen::Vector3d coords = Eigen::Vector3d::Zero();
};

/// Value of Z = UV (S1 coordinates) where the orbit crosses {Y = 0}.
struct PlaneCrossing {
  double eta = 0.0;
  Eigen::Vector3d coords = Eigen::Vector3d::Zero();
  int direction = 0;  // sign of dY/deta at the crossing
};

struct Orbit {
  SystemId system = SystemId::S1;
  std::vector<OrbitSample> samples;
  std::string origin;  // launch point label ("P0", "P2", ...) or empty for an explicit state
  std::optional<LocalExpansion> launch;
  Termination termination;
  std::vector<PlaneCrossing> y0_crossings;
  long steps = 0;
};

struct PointTarget {
  std::string label;
  Eigen::Vector3d location = Eigen::Vector3d::Zero();
  double radius = 1e-4;
};

struct StopConditions {
  OdeOptions ode;
  double eta_max = 1e14;
  std::vector<PointTarget> targets;
  /// S1: enter P0 inside this radius with Y < 0 and X, Z decreasing. 0 disables.
  double p0_radius = 0.0;
  /// After entering P0, continue on the center-manifold flow down to this radius. 0 disables.
  double p0_completion_radius = 0.0;
  /// S1 and S3: Escaped("Y->-inf"), labelled Q3, once Y < -y_escape.
  double y_escape = 1e3;
  /// Norm beyond which the orbit is reported as BlowupInPhaseVariables.
  double norm_escape = 1e8;
  std::vector<int> sign_watch;
  /// Center-manifold launches hand over to the full system at this radius.
  double handoff_radius = 1e-3;
  bool record_y0_crossings = true;
};

/// Default stop set for S1 orbits: P0 landing, P1 and P2 balls of radius r_stop, Q3 escape.
StopConditions s1_stop_conditions(const Parameters& par, double r_stop = 1e-4);

/// Integrates from `start` in `system`. A start in S1Center with `system` == S1 is integrated on
/// the center-manifold flow up to StopConditions::handoff_radius and then continued in S1.
Orbit integrate(const PhaseState& start, SystemId system, const Parameters& par, const StopConditions& stop);

/// S1Center state on the Beh02 orbit with |(X, Z)| = delta.
PhaseState p0_launch_state(const LocalExpansion& beh02, const Parameters& par, double delta);
/// Integrates the Beh02 orbit out of P0.
Orbit integrate_from_p0(const LocalExpansion& beh02, const Parameters& par, const StopConditions& stop,
                        double delta = 1e-6);
/// Outgoing unstable eigenvector of P2, oriented into Z > 0 and normalized.
Eigen::Vector3d p2_unstable_direction(const Parameters& par);
/// Integrates the orbit leaving P2 at P2 + delta * e3.
Orbit integrate_from_p2(const Parameters& par, const StopConditions& stop, double delta = 1e-6);

enum class OriginKind { Unknown, P1Property, P2Property, NegativeSlope, PositiveSlope, SignChangeAtZero };
enum class InterfaceType { TypeI, TypeII, Ambiguous };

const char* to_string(OriginKind k);
const char* to_string(InterfaceType t);

struct InterfaceFit {
  double xi0 = 0.0;
  double exponent = 0.0;
  double r2 = 0.0;
  InterfaceType type = InterfaceType::Ambiguous;
};

struct Profile {
  Parameters params;
  Exponents exponents;
  std::vector<ProfilePoint> samples;  // increasing in xi
  OriginKind origin_kind = OriginKind::Unknown;
  std::optional<InterfaceFit> interface;
  bool good() const {
    return (origin_kind == OriginKind::P1Property || origin_kind == OriginKind::P2Property) && interface.has_value();
  }
  /// Cubic Hermite interpolation of (f, f') at `xi` inside the sampled range.
  ProfilePoint at(double xi) const;
};

Profile reconstruct_profile(const Orbit& orbit, const Parameters& par);

/// Least-squares fits near the right end of the positive part of the profile.
InterfaceFit fit_interface_exponent(const Profile& profile);

/// Power-law fit f ~ c xi^e over the first decade of samples with xi > 0: returns (e, r2).
std::pair<double, double> fit_origin_exponent(const Profile& profile);

struct InterfaceCheck {
  double lhs = 0.0, rhs = 0.0, rel_error = 0.0;
  double probe_time = 0.0;
};

/// Checks the interface equation matching `as` (default: the fitted type) at probe time t = T/2.
InterfaceCheck verify_interface_equation(const Profile& profile, std::optional<InterfaceType> as = std::nullopt);

enum class DirectEnd { ReachedEnd, Vanished, CrossedZero };

struct DirectResult {
  Profile profile;
  DirectEnd end = DirectEnd::ReachedEnd;
  double xi_end = 0.0;  // xi where integration stopped
};

/// Integrates the profile equation in (F, G) = (f^m, (f^m)') from `start` toward `xi_end`.
/// Stops where F crosses zero (CrossedZero) or falls below `f_floor` times its running maximum
/// with (f^m)' comparably small (Vanished).
DirectResult integrate_direct(const ProfilePoint& start, const Parameters& par, double xi_end,
                              const OdeOptions& opt = {}, double f_floor = 1e-14);

/// Public form: direction +1 integrates to xi_max, -1 to xi = 0. Throws NegativeF on a crossing.
Profile integrate_ssode_direct(const ProfilePoint& start, const Parameters& par, int direction, double xi_max = 1e3,
                               const OdeOptions& opt = {});
Profile integrate_ssode_direct(const LocalExpansion& start, double offset, const Parameters& par, int direction,
                               double xi_max = 1e3, const OdeOptions& opt = {});

}  // namespace blowup

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowup/critical_points.hpp"
#include "blowup/integrator.hpp"
#include "blowup/params.hpp"

namespace blowup {

enum class ShootOutcome { DecreasingToAxis, IncreasingAtAxis, BackwardSignChange, GoodProfile };

const char* to_string(ShootOutcome o);

struct ShootOptions {
  double launch_offset = 1e-6;  // relative to xi0
  double tol_good = 1e-6;
  OdeOptions ode;
};

struct ShootResult {
  double xi0 = 0.0;
  double v0 = 0.0;
  ShootOutcome outcome = ShootOutcome::DecreasingToAxis;
  double f0 = 0.0;   // f(0) when the axis is reached
  double df0 = 0.0;  // f'(0) when the axis is reached
  double xi1 = 0.0;  // backward zero for BackwardSignChange
  double dfm1 = 0.0; // (f^m)'(xi1) for BackwardSignChange
  Profile profile;
};

/// v0 <-> xi0 through the S3 coordinate V at the interface.
double v0_from_xi0(double xi0, const Parameters& par);
double xi0_from_v0(double v0, const Parameters& par);

/// Barrier h(U) on the plane {Y = -beta/(2 alpha)} of S3, its minimizer U0 and v0bar = h(U0).
double barrier_h(double U, const Parameters& par);
double barrier_u0(const Parameters& par);
double barrier_v0bar(const Parameters& par);

ShootResult shoot_backward(double xi0, const Parameters& par, const ShootOptions& opt = {});

struct GoodType1 {
  double xi0_star = 0.0;
  std::pair<double, double> bracket;  // final bracket, low end in the decreasing set
  int iterations = 0;
  ShootResult result;
};

/// Bracket whose low end is DecreasingToAxis and high end is not.
std::pair<double, double> auto_bracket(const Parameters& par, const ShootOptions& opt = {});
GoodType1 find_good_type1(const Parameters& par, std::optional<std::pair<double, double>> bracket = std::nullopt,
                          double width = 1e-8, const ShootOptions& opt = {});

enum class Endpoint { P0, P1, Q3, Undecided };
const char* to_string(Endpoint e);

struct P2Classification {
  Endpoint endpoint = Endpoint::Undecided;
  Orbit orbit;
};

P2Classification classify_p2_orbit(const Parameters& par, double delta = 1e-6, double r_stop = 1e-4);
Endpoint endpoint_of(const Orbit& orbit);

struct BarrierConstants {
  double k = 0.0;           // plane Y + kV = 1
  double k1 = 0.0;          // hyperbolic cylinder UV = k1
  double u_p2 = 0.0;        // U(P2)
  double u_p2_over_k = 0.0; // bound on UV at the first {Y = 0} crossing
  double u_p2_over_k_closed = 0.0;
  double u0 = 0.0, v0bar = 0.0;
  double plane1_d = 0.0, plane1_e = 0.0;
  double plane2_b = 0.0, plane2_c = 0.0;
  double y0bar = 0.0;
};

BarrierConstants barrier_constants(const Parameters& par);

struct FanEntry {
  double K = 0.0;
  Endpoint endpoint = Endpoint::Undecided;
  Termination termination;
  std::optional<double> origin_exponent;
  std::optional<InterfaceFit> interface;
  std::string error;
};

/// K log-spaced over [k_lo, k_hi].
std::vector<double> fan_constants(int n = 8, double k_lo = 1e-2, double k_hi = 1e2);
std::vector<FanEntry> p0_fan(const Parameters& par, const std::vector<double>& Ks, int workers = 0);

struct FanTransition {
  double k_lo = 0.0, k_hi = 0.0;  // P0 at k_lo, Q3 at k_hi
  Endpoint boundary = Endpoint::Undecided;
  std::optional<InterfaceFit> interface;  // fitted on the boundary orbit when it enters P1
};

/// Bisects the Beh02 constant between a P0 and a Q3 fan member.
FanTransition bisect_fan(const Parameters& par, double k_p0, double k_q3, int max_iter = 60);

struct SweepEntry {
  double sigma = 0.0;
  Endpoint endpoint = Endpoint::Undecided;
  std::optional<double> uv_crossing;
  std::optional<InterfaceFit> interface;  // profile of the P2 orbit when it ends at P0 or P1
  BarrierConstants barriers;
  std::string error;
};

struct RegimeReport {
  Parameters base;
  std::vector<SweepEntry> entries;
  std::optional<std::pair<double, double>> sigma_star_bracket;
  int transitions = 0;
  bool multiple_transitions = false;
  int undecided = 0;
};

RegimeReport sweep_sigma(const Parameters& base, const std::vector<double>& sigma_grid, bool refine = true,
                         double width = 1e-3, int workers = 0);

struct NonexistenceLaunch {
  std::string kind;  // "TypeI" or "TypeII"
  double xi0 = 0.0;
  std::string outcome;
  bool good = false;
};

struct NonexistenceReport {
  std::vector<CriticalPointReport> points;
  std::string candidate_label;
  std::array<double, 3> candidate_eigenvalues{};
  bool candidate_unstable_in_x0 = false;
  bool any_profile_point = false;
  std::vector<NonexistenceLaunch> launches;
  int failures = 0;
};

NonexistenceReport probe_nonexistence(const Parameters& par, int n_launches = 10);

/// Runs fn(i) for i in [0, n) on a bounded pool; workers <= 0 selects hardware concurrency.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace blowup

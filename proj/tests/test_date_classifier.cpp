#include <doctest.h>

#include <random>

#include "blowup/date_classifier.hpp"
#include "blowup/errors.hpp"
#include "support.hpp"

using namespace blowup;

namespace {

const Parameters ref{3, 0.5, 1};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("decomposition of the P0 system") {
  const auto d = decompose(p0_center_system(ref));
  CHECK(d.p[0] == doctest::Approx(2.0));
  CHECK(d.p[1] == doctest::Approx(-7.5));
  CHECK(d.Q[0][0][0] == doctest::Approx(-1.0 / 3));
  CHECK(d.Q[0][0][1] == doctest::Approx(-0.5));
  CHECK(d.Q[1][1][1] == doctest::Approx(0.5));
  const auto back = recompose(d);
  const auto orig = p0_center_system(ref);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int mu = 0; mu < 2; ++mu) CHECK(back.P[k][l][mu] == doctest::Approx(orig.P[k][l][mu]).epsilon(1e-15));
  const auto z = decompose(QuadraticSystem2D{});
  CHECK(z.p.norm() == 0.0);
  // Traceless: sum_k Q^k_{lk} = 0.
  for (int l = 0; l < 2; ++l) CHECK(std::abs(d.Q[0][l][0] + d.Q[1][l][1]) < 1e-14);
}

TEST_CASE("asymmetric tensor is rejected") {
  QuadraticSystem2D s;
  s.P[0][0][1] = 1.0;
  CHECK_THROWS_AS(decompose(s), Error);
}

TEST_CASE("spot invariants") {
  const auto inv = invariants(p0_center_system(ref));
  CHECK(inv.D == doctest::Approx(-1.0 / 12).epsilon(1e-14));
  CHECK(inv.H == doctest::Approx(-9.75).epsilon(1e-14));
  CHECK(inv.F == doctest::Approx(-157.5).epsilon(1e-14));
  CHECK(inv.K[1] == doctest::Approx(-113.90625).epsilon(1e-14));
  CHECK(inv.K[2] == doctest::Approx(-243.0).epsilon(1e-14));
  CHECK(inv.K[1] == doctest::Approx(inv.F - 4.5 * inv.H + 3.375 * inv.D).epsilon(1e-15));
  CHECK(classify(inv).tag == PortraitTag::Portrait8_EllipticSector);
  CHECK(classify(invariants(p0_center_system({1.3, 0.5, 4}))).tag == PortraitTag::Portrait3_NoReentry);
}

TEST_CASE("epsilon sums equal closed forms over the grid") {
  double worst = 0;
  for (const Parameters& par : testing::supercritical_grid()) {
    const auto inv = invariants(p0_center_system(par));
    const auto cf = p0_closed_forms(par);
    for (auto [a, b] : {std::pair{inv.h(0, 0), cf.h11}, {inv.h(0, 1), cf.h12}, {inv.h(1, 0), cf.h12},
                        {inv.h(1, 1), cf.h22}, {inv.H, cf.H}, {inv.D, cf.D}, {inv.F, cf.F}, {inv.K[1], cf.K2},
                        {inv.K[2], cf.K3}})
      worst = std::max(worst, rel(a, b));
    const auto cl = classify(inv);
    CHECK(cl.tag == PortraitTag::Portrait8_EllipticSector);
    CHECK(inv.D < 0);
  }
  CHECK(worst < 1e-12);
  for (const Parameters& par : testing::subcritical_grid()) {
    const auto inv = invariants(p0_center_system(par));
    const auto cf = p0_closed_forms(par);
    CHECK(rel(inv.K[1], cf.K2) < 1e-12);
    CHECK(inv.K[1] > 0);
    CHECK(classify(inv).tag == PortraitTag::Portrait3_NoReentry);
  }
}

TEST_CASE("critical exponent sum gives degenerate signs") {
  try {
    classify(invariants(p0_center_system({1.5, 0.5, 3})));
    FAIL("expected DegenerateSigns");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSigns);
  }
}

TEST_CASE("invariants are preserved by unimodular coordinate changes") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int t = 0; t < 300; ++t) {
    QuadraticSystem2D s;
    for (int k = 0; k < 2; ++k) {
      s.P[k][0][0] = coef(rng);
      s.P[k][1][1] = coef(rng);
      s.P[k][0][1] = s.P[k][1][0] = coef(rng);
    }
    Eigen::Matrix2d A;
    A << u(rng), u(rng), u(rng), 0.0;
    if (std::abs(A(0, 1) * A(1, 0)) < 0.1) continue;
    const double sign = t % 2 ? 1.0 : -1.0;  // det = +1 and det = -1 alternately
    A(1, 1) = (sign + A(0, 1) * A(1, 0)) / A(0, 0);
    const auto a = invariants(s);
    const auto b = invariants(transform(s, A));
    // Rounding in the transformed coefficients grows with the conditioning of A.
    const double kappa = A.norm() * A.inverse().norm();
    const double sc = 1e-13 * std::pow(kappa, 6) * std::max(1.0, a.scale);
    CHECK(std::abs(a.D - b.D) <= sc);
    CHECK(std::abs(a.H - b.H) <= sc);
    CHECK(std::abs(a.F - b.F) <= sc);
    for (int n = 0; n < 3; ++n) CHECK(std::abs(a.K[n] - b.K[n]) <= sc);
  }
}

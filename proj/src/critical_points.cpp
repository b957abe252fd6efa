#include "blowup/critical_points.hpp"

#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(Interpretation i) {
  switch (i) {
    case Interpretation::Unset: return "Unset";
    case Interpretation::EllipticOriginTypeII: return "EllipticOriginTypeII";
    case Interpretation::TypeIInterface: return "TypeIInterface";
    case Interpretation::TypeIIInterface: return "TypeIIInterface";
    case Interpretation::GoodOriginP2: return "GoodOriginP2";
    case Interpretation::PositiveAtOrigin: return "PositiveAtOrigin";
    case Interpretation::SignChange: return "SignChange";
    case Interpretation::OriginRoot: return "OriginRoot";
    case Interpretation::NoProfile: return "NoProfile";
  }
  return "?";
}

const char* to_string(ExpansionKind k) {
  switch (k) {
    case ExpansionKind::Beh02: return "Beh02";
    case ExpansionKind::BehP2: return "BehP2";
    case ExpansionKind::BehP1: return "BehP1";
    case ExpansionKind::TypeIIContact: return "TypeIIContact";
    case ExpansionKind::Q5Root: return "Q5Root";
    case ExpansionKind::Q1Constant: return "Q1Constant";
  }
  return "?";
}

namespace {

CriticalPointReport finite_point(SystemId id, std::string label, Eigen::Vector3d loc) {
  CriticalPointReport r;
  r.system = id;
  r.label = std::move(label);
  r.location = loc;
  return r;
}

CriticalPointReport infinity_point(SystemId id, std::string label, Eigen::Vector3d xbar, Chart chart,
                                   std::optional<SystemId> native, const Coefficients& c) {
  CriticalPointReport r;
  r.system = id;
  r.label = std::move(label);
  r.at_infinity = true;
  xbar.normalize();
  r.location = Eigen::Vector4d(xbar[0], xbar[1], xbar[2], 0.0);
  r.chart = chart;
  r.native_chart = native;
  Eigen::Vector3d v;
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != chart.pivot) v[k++] = xbar[i] / xbar[chart.pivot];
  v[2] = 0.0;
  r.chart_coords = v;
  r.residual = poincare_residual(base_system(id), xbar, c).norm();
  return r;
}

}  // namespace

std::vector<CriticalPointReport> enumerate_finite(SystemId id, const Parameters& par,
                                                  const std::vector<double>& samples) {
  const Coefficients c = coefficients(par);
  check_regime(id, c);
  std::vector<CriticalPointReport> out;
  switch (id) {
    case SystemId::S1:
      out.push_back(finite_point(id, "P0", Eigen::Vector3d::Zero()));
      out.push_back(finite_point(id, "P1", Eigen::Vector3d(0.0, -c.ba(), 0.0)));
      out.push_back(finite_point(id, "P2", p2_location(c)));
      break;
    case SystemId::S4:
      out.push_back(finite_point(id, "P0", Eigen::Vector3d::Zero()));
      out.push_back(finite_point(id, "P1", Eigen::Vector3d(0.0, -c.beta / c.m, 0.0)));
      out.push_back(finite_point(id, "P2", (c.alpha / c.m) * p2_location(c)));
      break;
    case SystemId::S2:
      for (double xi0 : samples) out.push_back(finite_point(id, "P(xi0)", Eigen::Vector3d(0.0, -c.beta * xi0 / c.m, xi0)));
      break;
    case SystemId::S3:
      for (double v0 : samples) out.push_back(finite_point(id, "P(v0)", Eigen::Vector3d(0.0, -c.ba(), v0)));
      break;
    case SystemId::S5: break;
    default: fail(ErrorCode::Unsupported, std::string("no finite enumeration for ") + to_string(id));
  }
  for (auto& r : out) r.residual = field<double>(id, r.location.head<3>(), c).norm();
  return out;
}

std::vector<CriticalPointReport> enumerate_infinity(SystemId id, const Parameters& par) {
  const Coefficients c = coefficients(par);
  check_regime(id, c);
  const double m = c.m, al = c.alpha, be = c.beta;
  std::vector<CriticalPointReport> out;
  using V = Eigen::Vector3d;
  if (id == SystemId::S1) {
    out.push_back(infinity_point(id, "Q1", V(1, 0, 0), {id, 0, 1}, SystemId::Inf1, c));
    out.push_back(infinity_point(id, "Q2", V(0, 1, 0), {id, 1, 1}, SystemId::Inf2Minus, c));
    out.push_back(infinity_point(id, "Q3", V(0, -1, 0), {id, 1, -1}, SystemId::Inf2Plus, c));
    out.push_back(infinity_point(id, "Q4", V(0, 0, 1), {id, 2, 1}, std::nullopt, c));
    out.push_back(infinity_point(id, "Q5", V(m, 1, 0), {id, 0, 1}, SystemId::Inf1, c));
  } else if (id == SystemId::S5) {
    out.push_back(infinity_point(id, "Q1*", V(1, 0, 0), {id, 0, 1}, SystemId::Inf11, c));
    out.push_back(infinity_point(id, "Q2*", V(0, 1, 0), {id, 1, 1}, SystemId::Inf21Minus, c));
    out.push_back(infinity_point(id, "Q3*", V(0, -1, 0), {id, 1, -1}, SystemId::Inf21Plus, c));
    out.push_back(infinity_point(id, "Q4*", V(0, 0, 1), {id, 2, 1}, std::nullopt, c));
    out.push_back(infinity_point(id, "Q5*", V(m, 1, 0), {id, 0, 1}, SystemId::Inf11, c));
    out.push_back(infinity_point(id, "P1*", V(0, -be, al), {id, 1, -1}, SystemId::Inf21Plus, c));
    out.push_back(infinity_point(id, "P2*", V((m - 1) / 2, 1, al * (m + 1)), {id, 2, 1}, std::nullopt, c));
  } else {
    fail(ErrorCode::Unsupported, std::string("no compactification for ") + to_string(id));
  }
  return out;
}

ManifoldDims manifold_dims(const std::array<cplx, 3>& values, double scale) {
  ManifoldDims d;
  const double tol = 1e-10 * std::max(1.0, scale);
  for (const auto& v : values) {
    if (v.real() < -tol) ++d.stable;
    else if (v.real() > tol) ++d.unstable;
    else ++d.center;
  }
  return d;
}

namespace {

Interpretation interpret(const CriticalPointReport& r) {
  const std::string& l = r.label;
  if (l == "P0") return Interpretation::EllipticOriginTypeII;
  if (l == "P1" || l == "P(xi0)" || l == "P(v0)") return Interpretation::TypeIInterface;
  if (l == "P2" || l == "P2*") return Interpretation::GoodOriginP2;
  if (l == "Q1" || l == "Q1*") return Interpretation::PositiveAtOrigin;
  if (l == "Q2" || l == "Q3" || l == "Q2*" || l == "Q3*") return Interpretation::SignChange;
  if (l == "Q5" || l == "Q5*") return Interpretation::OriginRoot;
  return Interpretation::NoProfile;  // Q4, Q4*, P1*
}

}  // namespace

CriticalPointReport linearize(CriticalPointReport r, const Parameters& par) {
  const Coefficients c = coefficients(par);
  if (r.at_infinity) {
    Eigen::Vector3d F;
    if (r.native_chart) {
      check_regime(*r.native_chart, c);
      F = field<double>(*r.native_chart, r.chart_coords, c);
      r.matrix = field_jacobian<double>(*r.native_chart, r.chart_coords, c);
    } else {
      F = chart_field<double>(r.chart, r.chart_coords, c);
      r.matrix = chart_jacobian(r.chart, r.chart_coords, c);
    }
    r.residual = std::max(r.residual, F.norm());
  } else {
    check_regime(r.system, c);
    const Eigen::Vector3d u = r.location.head<3>();
    r.residual = field<double>(r.system, u, c).norm();
    r.matrix = field_jacobian<double>(r.system, u, c);
  }
  if (!(r.residual <= 1e-10)) fail(ErrorCode::NotACriticalPoint, r.label + " does not zero the field");
  const EigenData e = eigen_closed_form(r.matrix);
  r.eigenvalues = e.values;
  r.eigenvectors = e.vectors;
  r.dims = manifold_dims(e.values, r.matrix.cwiseAbs().maxCoeff());
  r.interpretation = interpret(r);
  r.linearized = true;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

LocalExpansion base(ExpansionKind kind, const Parameters& par, std::vector<double> fc) {
  const Exponents ex = derive_exponents(par);
  LocalExpansion e;
  e.kind = kind;
  e.params = par;
  e.alpha = ex.alpha;
  e.beta = ex.beta;
  e.free_constants = std::move(fc);
  return e;
}

void need(const std::vector<double>& fc, std::size_t n, const char* what) {
  if (fc.size() < n) fail(ErrorCode::DegenerateInput, std::string("missing free constant for ") + what);
  for (double v : fc)
    if (!std::isfinite(v)) fail(ErrorCode::DegenerateInput, "non-finite free constant");
}

}  // namespace

LocalExpansion local_expansion(ExpansionKind kind, const Parameters& par, const std::vector<double>& fc) {
  LocalExpansion e = base(kind, par, fc);
  const double m = par.m, p = par.p;
  switch (kind) {
    case ExpansionKind::Beh02:
      need(fc, 1, "Beh02");
      e.anchor = "P0";
      break;
    case ExpansionKind::BehP2:
      e.anchor = "P2";
      break;
    case ExpansionKind::BehP1:
      need(fc, 1, "BehP1");
      e.anchor = "P1";
      e.anchor_xi = std::sqrt(2 * m * fc[0] / ((m - 1) * e.beta));
      break;
    case ExpansionKind::TypeIIContact:
      need(fc, 1, "TypeIIContact");
      e.anchor = "P0";
      e.anchor_xi = std::pow(fc[0] / (1 - p), e.beta);
      break;
    case ExpansionKind::Q5Root:
      need(fc, 1, "Q5Root");
      e.anchor = "Q5";
      break;
    case ExpansionKind::Q1Constant:
      need(fc, 2, "Q1Constant");
      e.anchor = "Q1";
      break;
  }
  return e;
}

LocalExpansion local_expansion(const CriticalPointReport& pt, const Parameters& par, const std::vector<double>& fc) {
  const std::string& l = pt.label;
  if (l == "P0") return local_expansion(ExpansionKind::Beh02, par, fc);
  if (l == "P2") return local_expansion(ExpansionKind::BehP2, par, fc);
  if (l == "P1") return local_expansion(ExpansionKind::BehP1, par, fc);
  if (l == "P(xi0)") return type1_at(pt.location[2], par);
  if (l == "Q5") return local_expansion(ExpansionKind::Q5Root, par, fc);
  if (l == "Q1") return local_expansion(ExpansionKind::Q1Constant, par, fc);
  fail(ErrorCode::NoProfileBehavior, l + " carries no profile expansion");
}

LocalExpansion type1_at(double xi0, const Parameters& par) {
  const Exponents ex = derive_exponents(par);
  const double K = (par.m - 1) * ex.beta * xi0 * xi0 / (2 * par.m);
  return local_expansion(ExpansionKind::BehP1, par, {K});
}

LocalExpansion type2_at(double xi0, const Parameters& par) {
  const Exponents ex = derive_exponents(par);
  return local_expansion(ExpansionKind::TypeIIContact, par, {(1 - par.p) * std::pow(xi0, 1.0 / ex.beta)});
}

ProfilePoint LocalExpansion::evaluate(double xi) const {
  const double m = params.m, p = params.p, sg = params.sigma;
  using std::pow;
  switch (kind) {
    case ExpansionKind::Beh02:
    case ExpansionKind::TypeIIContact: {
      const double C = kind == ExpansionKind::Beh02 ? pow(free_constants[0], 1 - p) : free_constants[0];
      // General solution of beta xi f' - alpha f + xi^sigma f^p = 0.
      const double g = alpha / beta;
      const double br = C - (1 - p) * pow(xi, 1 / beta);
      if (br <= 0) return {xi, 0.0, 0.0};
      const double f = pow(xi, g) * pow(br, 1 / (1 - p));
      return {xi, f, f * (g / xi - pow(xi, 1 / beta - 1) / (beta * br))};
    }
    case ExpansionKind::BehP2: {
      const double c = pow((m - 1) / (2 * m * (m + 1)), 1 / (m - 1));
      const double f = c * pow(xi, 2 / (m - 1));
      return {xi, f, f * 2 / ((m - 1) * xi)};
    }
    case ExpansionKind::BehP1: {
      // phi = f^{m-1} = a1 s - beta(m-1)s^2/(2m) + c s^{1+q}, s = xi0 - xi; the s^{1+q}
      // term is the first correction from the reaction.
      const double xi0 = anchor_xi, s = xi0 - xi;
      if (s <= 0) return {xi, 0.0, 0.0};
      const double a1 = beta * (m - 1) * xi0 / m;
      const double q = (m + p - 2) / (m - 1);
      const double c = -(m - 1) * (m - 1) * pow(xi0, sg) * pow(a1, (p - 1) / (m - 1)) / (m * (1 + q) * (m + p - 1));
      const double phi = a1 * s - beta * (m - 1) * s * s / (2 * m) + c * pow(s, 1 + q);
      const double dphi = -(a1 - beta * (m - 1) * s / m + c * (1 + q) * pow(s, q));
      const double f = pow(phi, 1 / (m - 1));
      return {xi, f, dphi * pow(phi, (2 - m) / (m - 1)) / (m - 1)};
    }
    case ExpansionKind::Q5Root: {
      const double K = free_constants[0];
      const double f = K * pow(xi, 1 / m);
      return {xi, f, f / (m * xi)};
    }
    case ExpansionKind::Q1Constant: {
      const double a = free_constants[0], b = free_constants[1];
      const double f2 = (alpha * a - m * (m - 1) * pow(a, m - 2) * b * b) / (m * pow(a, m - 1));
      return {xi, a + b * xi + 0.5 * f2 * xi * xi, b + f2 * xi};
    }
  }
  return {xi, 0.0, 0.0};
}

double ssode_residual(const LocalExpansion& e, double offset) {
  const double m = e.params.m, p = e.params.p, sg = e.params.sigma;
  const ProfilePoint pt = e.at_offset(offset);
  const double h = offset * 1e-4;
  auto G = [&](double xi) {
    const ProfilePoint q = e.evaluate(xi);
    return m * std::pow(q.f, m - 1) * q.df;
  };
  const double d2 = (G(pt.xi + h) - G(pt.xi - h)) / (2 * h);
  const double react = std::pow(pt.xi, sg) * std::pow(pt.f, p);
  const double res = d2 - e.alpha * pt.f + e.beta * pt.xi * pt.df + react;
  const double scale = std::abs(G(pt.xi)) / offset + e.alpha * pt.f + e.beta * std::abs(pt.xi * pt.df) + react;
  return std::abs(res) / scale;
}

double p2_eigvec_denominator(const Parameters& par) {
  const double m = par.m, p = par.p, s = par.sigma;
  return -(m - 1) * (m - 1) * s * s - (m - 1) * (3 * m + 4 * p - 3) * s - 4 * m * m - 4 * m * p - 4 * p * p + 4 * m +
         8 * p;
}

}  // namespace blowup

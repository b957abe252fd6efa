#include "blowup/params.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Supercritical: return "Supercritical";
    case Regime::Critical: return "Critical";
    case Regime::Subcritical: return "Subcritical";
  }
  return "Unknown";
}

Parameters make_parameters(double m, double p, double sigma) {
  if (!(m > 1.0) || !std::isfinite(m)) fail(ErrorCode::InvalidParameters, "m must be > 1");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParameters, "p must lie in (0,1)");
  if (!std::isfinite(sigma)) fail(ErrorCode::InvalidParameters, "sigma must be finite");
  return {m, p, sigma};
}

double sigma_lower_bound(const Parameters& par) { return 2.0 * (1.0 - par.p) / (par.m - 1.0); }

Regime classify_regime(const Parameters& par) {
  const double s = par.m + par.p;
  if (s > 2.0) return Regime::Supercritical;
  if (s < 2.0) return Regime::Subcritical;
  return Regime::Critical;
}

Exponents derive_exponents(const Parameters& par, double T) {
  make_parameters(par.m, par.p, par.sigma);
  const double lower = sigma_lower_bound(par);
  if (!(par.sigma > lower)) {
    std::ostringstream os;
    os.precision(17);
    os << "sigma at or below lower bound " << lower;
    fail(ErrorCode::SigmaOutOfRange, os.str());
  }
  const double den = par.sigma * (par.m - 1.0) + 2.0 * (par.p - 1.0);
  return {(par.sigma + 2.0) / den, (par.m - par.p) / den, T};
}

void require_analyzable(const Parameters& par) {
  if (classify_regime(par) == Regime::Critical)
    fail(ErrorCode::CriticalRegime, "m+p=2 is not supported by the phase-space analysis");
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = trim(line.substr(0, eq));
    if (!key.empty()) out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidParameters, "cannot read config file " + path);
  return parse_key_values(in);
}

Parameters parameters_from(const std::map<std::string, std::string>& kv, Parameters base) {
  auto get = [&](const char* key, double& dst) {
    if (auto it = kv.find(key); it != kv.end()) {
      try {
        dst = std::stod(it->second);
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidParameters, std::string("bad value for ") + key);
      }
    }
  };
  get("m", base.m);
  get("p", base.p);
  get("sigma", base.sigma);
  return make_parameters(base.m, base.p, base.sigma);
}

}  // namespace blowup

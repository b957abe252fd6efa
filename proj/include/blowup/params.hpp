#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace blowup {

enum class Regime { Supercritical, Critical, Subcritical };

const char* to_string(Regime r);

/// Exponents of u_t = (u^m)_xx + |x|^sigma u^p.
struct Parameters {
  double m = 3.0;
  double p = 0.5;
  double sigma = 1.0;
};

struct Exponents {
  double alpha = 0.0;
  double beta = 0.0;
  double T = 1.0;
};

/// Throws InvalidParameters unless m > 1 and 0 < p < 1.
Parameters make_parameters(double m, double p, double sigma);

double sigma_lower_bound(const Parameters& par);
Regime classify_regime(const Parameters& par);

/// Throws SigmaOutOfRange when sigma <= 2(1-p)/(m-1).
Exponents derive_exponents(const Parameters& par, double T = 1.0);

/// Throws CriticalRegime for m+p=2 (analysis operations refuse it).
void require_analyzable(const Parameters& par);

/// Parses `key=value` lines; '#' starts a comment. Unknown keys are kept.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> load_key_values(const std::string& path);

/// Fills m, p, sigma from a key/value map, keeping defaults for absent keys.
Parameters parameters_from(const std::map<std::string, std::string>& kv, Parameters base = {});

}  // namespace blowup

#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "blowup/critical_points.hpp"
#include "blowup/date_classifier.hpp"
#include "blowup/integrator.hpp"
#include "blowup/shooting.hpp"

namespace blowup {

using Json = nlohmann::json;

/// Deterministic serialization: sorted keys, two-space indent, numbers as %.17g, non-finite as null.
std::string dump_json(const Json& j);

Json to_json(const Parameters& par);
Json to_json(const Exponents& ex);
Json to_json(const CriticalPointReport& pt);
Json to_json(const DateInvariants& inv, const Classification& cl);
Json to_json(const InterfaceFit& fit);
Json to_json(const Termination& t);
Json profile_summary(const Profile& pr);
Json to_json(const ShootResult& r);
Json to_json(const BarrierConstants& b);
Json to_json(const RegimeReport& r);
Json to_json(const FanEntry& f);
Json to_json(const NonexistenceReport& r);

/// Full analysis of one parameter set: exponents, regime, critical points, Date invariants.
Json analyze_report(const Parameters& par);

std::string profile_csv(const Profile& pr);
std::string orbit_csv(const Orbit& o);
std::string sweep_csv(const RegimeReport& r);

struct Series {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  std::string label;
};

struct Marker {
  double x = 0.0, y = 0.0;
  std::string label;
};

struct Panel {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  std::vector<Marker> markers;
  /// Optional fixed ranges; empty means fit to the data.
  std::pair<double, double> xrange{0, 0}, yrange{0, 0};
};

/// Static SVG 1.1 figure in a fixed 800x600 viewport with panels laid out side by side.
std::string render_svg(const std::vector<Panel>& panels, const std::string& title);

/// (Y, X) and (Y, Z) projections of S1 orbits with the finite critical points marked.
std::string phase_portrait_svg(const Parameters& par, const std::vector<std::pair<std::string, Orbit>>& orbits);

}  // namespace blowup

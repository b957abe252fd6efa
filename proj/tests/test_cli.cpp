#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blowup/cli.hpp"
#include "blowup/report.hpp"

using namespace blowup;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  Run r;
  r.code = run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("blowup_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("dump_json prints 17 significant digits and null for non-finite values") {
  const Json j{{"b", 0.1}, {"a", {1.0 / 3.0, NAN, 2}}, {"s", "x\"y"}};
  CHECK(dump_json(j) ==
        "{\n  \"a\": [0.33333333333333331, null, 2],\n  \"b\": 0.10000000000000001,\n  \"s\": \"x\\\"y\"\n}\n");
}

TEST_CASE("analyze at the reference parameters") {
  const Run r = run({"analyze", "--m", "3", "--p", "0.5", "--sigma", "1"});
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["date_invariants"]["K2"].get<double>() == doctest::Approx(-113.90625).epsilon(1e-12));
  CHECK(j["date_invariants"]["portrait"].get<std::string>().find("elliptic sector") != std::string::npos);
  CHECK(j["regime"] == "Supercritical");
  CHECK(j["exponents"]["alpha"].get<double>() == doctest::Approx(3.0));
  bool has_p1 = false;
  for (const auto& pt : j["finite_points"])
    if (pt["label"] == "P1") {
      has_p1 = true;
      CHECK(pt["eigenvalues"].size() == 3);
      CHECK(pt["eigenvalues"][0].size() == 2);
    }
  CHECK(has_p1);
}

TEST_CASE("analyze reports regime errors with exit code 2") {
  const Run r = run({"analyze", "--m", "3", "--p", "0.5", "--sigma", "0.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("sigma at or below lower bound 0.5") != std::string::npos);
  CHECK(run({"analyze", "--m", "0.5"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"analyze", "--bogus", "1"}).code == 2);
}

TEST_CASE("analyze in the subcritical regime") {
  const Run r = run({"analyze", "--m", "1.3", "--p", "0.5", "--sigma", "4"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["infinity_points"].size() == 7);
  CHECK(j["date_invariants"]["portrait_tag"] == "Portrait3_NoReentry");
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "run.cfg") << "# reference\nm=3\np=0.5\nsigma=0.5\n";
  }
  CHECK(run({"analyze", "--config", (dir / "run.cfg").string()}).code == 2);
  const Run r = run({"analyze", "--config", (dir / "run.cfg").string(), "--sigma", "1"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["params"]["sigma"].get<double>() == 1.0);
}

TEST_CASE("shoot writes profile.csv and shoot.json") {
  const fs::path dir = scratch("shoot");
  SUBCASE("auto bracket") {
    const Run r = run({"shoot", "--m", "3", "--p", "0.5", "--sigma", "1", "--auto-bracket", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(slurp(dir / "shoot.json"));
    CHECK(j["result"]["outcome"] == "GoodProfile");
    CHECK(std::abs(j["result"]["profile"]["interface"]["exponent"].get<double>() - 0.5) < 0.025);
    CHECK(slurp(dir / "profile.csv").rfind("xi,f,df\n", 0) == 0);
  }
  SUBCASE("small interface") {
    REQUIRE(run({"shoot", "--m", "3", "--p", "0.5", "--sigma", "1", "--xi0", "0.1", "--out", dir.string()}).code == 0);
    CHECK(Json::parse(slurp(dir / "shoot.json"))["result"]["outcome"] == "DecreasingToAxis");
  }
  SUBCASE("large interface") {
    REQUIRE(run({"shoot", "--m", "3", "--p", "0.5", "--sigma", "1", "--xi0", "1e6", "--out", dir.string()}).code == 0);
    const Json j = Json::parse(slurp(dir / "shoot.json"));
    CHECK(j["result"]["outcome"] == "BackwardSignChange");
    CHECK(j["result"]["xi1"].get<double>() > 0);
  }
  SUBCASE("invalid bracket is a usage error") {
    CHECK(run({"shoot", "--bracket", "0.1:0.2", "--out", dir.string()}).code == 2);
    CHECK(run({"shoot", "--out", dir.string()}).code == 2);
  }
}

TEST_CASE("sweep writes tables and portraits") {
  const fs::path dir = scratch("sweep");
  const Run r = run({"sweep", "--m", "3", "--p", "0.5", "--grid", "3:3.5:0.5", "--refine", "--fan", "2", "--out",
                     dir.string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(slurp(dir / "sweep.json"));
  REQUIRE(j["sigma_star_bracket"].is_array());
  const double lo = j["sigma_star_bracket"][0].get<double>(), hi = j["sigma_star_bracket"][1].get<double>();
  CHECK(lo >= 3.2);
  CHECK(hi <= 3.3);
  CHECK(slurp(dir / "sweep.csv").rfind("sigma,endpoint,xi0_star_if_any,k1,Uv_crossing\n", 0) == 0);
  for (const char* name : {"portrait_3.svg", "portrait_3.5.svg", "portrait_3.csv", "portrait_3.5.csv"})
    CHECK(fs::exists(dir / name));
  const std::string svg = slurp(dir / "portrait_3.svg");
  CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
  CHECK(svg.find(">P2<") != std::string::npos);
  CHECK(slurp(dir / "portrait_3.csv").rfind("orbit,eta,X,Y,Z\n", 0) == 0);
}

TEST_CASE("sweep on subcritical parameters points to probe-nonexistence") {
  const Run r = run({"sweep", "--m", "1.3", "--p", "0.5", "--grid", "3:4:1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("probe-nonexistence") != std::string::npos);
}

TEST_CASE("probe-nonexistence prints the evidence table") {
  const fs::path dir = scratch("probe");
  const Run r = run({"probe-nonexistence", "--m", "1.3", "--p", "0.5", "--sigma", "4", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("10/10") != std::string::npos);
  const Json j = Json::parse(slurp(dir / "nonexistence.json"));
  CHECK(j["point_count"] == 7);
  CHECK(j["conclusion"] == "NoProfile");
}

TEST_CASE("golden JSON is byte-stable across reruns and worker counts") {
  const fs::path a = scratch("golden_a"), b = scratch("golden_b");
  REQUIRE(run({"analyze", "--sigma", "2", "--seed", "17", "--out", a.string()}).code == 0);
  REQUIRE(run({"analyze", "--sigma", "2", "--seed", "17", "--out", b.string()}).code == 0);
  CHECK(slurp(a / "analyze.json") == slurp(b / "analyze.json"));
  REQUIRE(run({"sweep", "--grid", "2:4:1", "--fan", "2", "--seed", "17", "--workers", "1", "--out", a.string()}).code == 0);
  REQUIRE(run({"sweep", "--grid", "2:4:1", "--fan", "2", "--seed", "17", "--workers", "3", "--out", b.string()}).code == 0);
  CHECK(slurp(a / "sweep.json") == slurp(b / "sweep.json"));
  CHECK(slurp(a / "portrait_3.svg") == slurp(b / "portrait_3.svg"));
}

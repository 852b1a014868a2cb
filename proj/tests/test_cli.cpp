#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kBin = SYL_BINARY;
const fs::path kWork = fs::temp_directory_path() / "syl_cli_tests";

int run(const std::string& args) {
  const std::string cmd = kBin.string() + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bubble command: outputs and exit codes") {
  const fs::path out = kWork / "bubble1";
  fs::remove_all(out);
  REQUIRE(run("bubble --lambda 1 --p 3 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "profile.csv"));
  CHECK(fs::exists(out / "manifest.json"));
  const json rep = read_json(out / "report.json");
  CHECK(rep.at("mu0").get<double>() > 0.0);
  CHECK(rep.at("residual_2d").get<double>() < 1e-6);

  // p outside (2,4): usage/validation error
  CHECK(run("bubble --lambda 1 --p 5 --out " + (kWork / "bad").string()) == 1);
}

TEST_CASE("bubble command: scaling law across two runs") {
  const fs::path o1 = kWork / "scale1", o2 = kWork / "scale2";
  fs::remove_all(o1);
  fs::remove_all(o2);
  REQUIRE(run("bubble --lambda 1 --p 3 --out " + o1.string()) == 0);
  REQUIRE(run("bubble --lambda 2 --p 3 --out " + o2.string()) == 0);
  const double mu1 = read_json(o1 / "report.json").at("mu0").get<double>();
  const double mu2 = read_json(o2 / "report.json").at("mu0").get<double>();
  CHECK(mu2 / mu1 == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("theta command: builtin charts") {
  const fs::path bub = kWork / "bubble1";
  if (!fs::exists(bub / "profile.csv"))
    REQUIRE(run("bubble --lambda 1 --p 3 --out " + bub.string()) == 0);
  const std::string prof = (bub / "profile.csv").string();

  const fs::path t1 = kWork / "theta_sphere";
  REQUIRE(run("theta --chart sphere:1 --profile " + prof + " --out " + t1.string()) == 0);
  const json j1 = read_json(t1 / "theta.json");
  CHECK(j1.at("tie_flag").get<bool>());  // constant curvature

  const fs::path t2 = kWork / "theta_torus";
  REQUIRE(run("theta --chart torus:2,1 --argmax --profile " + prof + " --out " + t2.string()) ==
          0);
  const json j2 = read_json(t2 / "theta.json");
  const double s_star = j2.at("point").at(0).get<double>();
  CHECK(std::min(std::fmod(s_star, 2 * M_PI), 2 * M_PI - std::fmod(s_star, 2 * M_PI)) < 1e-6);
  CHECK(j2.at("report").at("K").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-8));

  const fs::path t3 = kWork / "theta_flat";
  REQUIRE(run("theta --chart flat --profile " + prof + " --out " + t3.string()) == 0);
  const json j3 = read_json(t3 / "theta.json");
  CHECK(j3.at("report").at("theta").get<double>() == 0.0);

  // curvature field CSV
  const fs::path t4 = kWork / "theta_csv";
  REQUIRE(run("theta --chart torus:2,1 --profile " + prof + " --curvature-csv K.csv --grid 24 " +
              "--out " + t4.string()) == 0);
  const std::string csv = slurp(t4 / "K.csv");
  CHECK(csv.rfind("s,t,K\n", 0) == 0);

  // bad chart spec
  CHECK(run("theta --chart banana:1 --profile " + prof + " --out " + (kWork / "x").string()) ==
        2);
}

TEST_CASE("torus command: run, config file, determinism") {
  const fs::path o1 = kWork / "torus1";
  fs::remove_all(o1);
  REQUIRE(run("torus --eps 0.3 --a 1 --p 3 --grid 32 --seed random:7 --out " + o1.string()) == 0);
  const json r1 = read_json(o1 / "result.json");
  CHECK(r1.at("converged").get<bool>());
  CHECK(r1.at("mu_eps").get<double>() > 0.0);
  CHECK(r1.at("grad_norm").get<double>() < 1e-8);
  CHECK(fs::exists(o1 / "field.csv"));

  // bitwise-identical rerun
  const fs::path o2 = kWork / "torus2";
  fs::remove_all(o2);
  REQUIRE(run("torus --eps 0.3 --a 1 --p 3 --grid 32 --seed random:7 --out " + o2.string()) == 0);
  CHECK(slurp(o1 / "result.json") == slurp(o2 / "result.json"));
  CHECK(slurp(o1 / "field.csv") == slurp(o2 / "field.csv"));

  // config snapshot from the manifest reproduces the same payload
  const json manifest = read_json(o1 / "manifest.json");
  const fs::path cfg_path = kWork / "resnap.json";
  {
    std::ofstream out(cfg_path);
    out << manifest.at("config").dump();
  }
  const fs::path o3 = kWork / "torus3";
  fs::remove_all(o3);
  REQUIRE(run("torus --config " + cfg_path.string() + " --out " + o3.string()) == 0);
  CHECK(slurp(o1 / "result.json") == slurp(o3 / "result.json"));
}

TEST_CASE("torus sweep command") {
  const fs::path o = kWork / "sweep";
  fs::remove_all(o);
  REQUIRE(run("torus --a 1 --p 3 --grid 32 --sweep 0.5,0.4 --out " + o.string()) == 0);
  const std::string csv = slurp(o / "sweep.csv");
  CHECK(csv.rfind("eps,mu_eps,width,decay_c,grad_norm\n", 0) == 0);
  CHECK(csv.find("FAILED") == std::string::npos);
}

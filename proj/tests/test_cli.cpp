#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "annulus/common.hpp"
#include "annulus/config.hpp"
#include "annulus/svg.hpp"

namespace fs = std::filesystem;
using namespace annulus;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string output;
};

Run run(const std::string& args, const fs::path& out) {
  const fs::path log = out / "stdout.txt";
  fs::create_directories(out);
  const std::string cmd = std::string(ANNULUS_CLI) + " --out " + out.string() + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("annulus_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = RunConfig::parse("# comment\n  R = 0.9  \n\np=3\neps=inf # trailing\n");
  CHECK(c.get_real("R", 0.0) == 0.9);
  CHECK(c.get_integer("p", 0) == 3);
  CHECK(c.get_string("eps", "") == "inf");
  CHECK(c.get_real("missing", 1.5) == 1.5);
  CHECK(RunConfig::parse(c.serialize()) == c);
  CHECK(RunConfig::parse(RunConfig::parse(c.serialize()).serialize()) == c);
  CHECK_THROWS_AS(RunConfig::parse("novalue\n"), ParameterError);
  CHECK_THROWS_AS(c.get_integer("R", 0), ParameterError);
  CHECK_THROWS_AS(parse_real("x", "abc"), ParameterError);
  CHECK(parse_integer("n", "-12") == -12);
}

TEST_CASE("svg output") {
  PlotPanel panel{"Q_p", "R", "Q", {{"p=2", {0.0, 0.5, 1.0}, {1.0, -0.25, -2.0}, false}}};
  const auto svg = render_svg({panel, panel});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("p=2") != std::string::npos);
  CHECK(svg.find("<!--") != std::string::npos);
}

TEST_CASE("radial command") {
  const auto out = scratch("radial");
  CHECK(run("radial --R 0.5 --p 2 --eps inf", out).code == 0);
  CHECK(slurp(out / "profile.csv").rfind("r,rho\n", 0) == 0);
  CHECK(run("radial --R 0.5 --p 2 --eps 10", out).code == 0);
  const auto bad = run("radial --R 1.5 --p 2", out);
  CHECK(bad.code == 1);
  CHECK(bad.output.find("R must lie in (0,1)") != std::string::npos);
  CHECK(run("radial --R 0.5 --p 2 --bogus 1", out).code == 1);
  fs::remove_all(out);
}

TEST_CASE("thresholds command") {
  const auto out = scratch("thresholds");
  const auto two = run("thresholds --p-max 2", out);
  CHECK(two.code == 0);
  CHECK(two.output.find("unconditional") != std::string::npos);
  const auto table = slurp(out / "thresholds.csv");
  CHECK(table.find("0.41421356") != std::string::npos);
  CHECK(table.find("\n1,,") != std::string::npos);
  CHECK(slurp(out / "thresholds.svg").find("</svg>") != std::string::npos);
  CHECK(run("thresholds --p-max 0", out).code == 1);
  fs::remove_all(out);
}

TEST_CASE("spectral command") {
  const auto out = scratch("spectral");
  const auto ok = run("spectral --R 0.99 --q 2 --k-min -6 --k-max 20", out);
  CHECK(ok.code == 0);
  const auto table = slurp(out / "spectral.csv");
  CHECK(table.find("\n0,II,0,") != std::string::npos);
  const auto singular = run("spectral --R 0.05 --q 1 --k-min -1 --k-max 1 --nodes 256", out);
  CHECK(singular.code == 2);
  CHECK(singular.output.find("pi/2") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("flow and energy commands") {
  const auto out = scratch("flow");
  const auto zero = run("flow --R 0.5 --p 0 --q 0 --nr 16 --na 32", out);
  CHECK(zero.code == 0);
  CHECK(zero.output.find("degrees (0,0)") != std::string::npos);
  const auto trace = slurp(out / "trace.csv");
  CHECK(trace.rfind("iter,dirichlet,potential,total,deg_out,deg_in,res_out,res_in,min_mod,min_r,min_theta\n", 0) == 0);
  // Config file with a flag override.
  std::ofstream(out / "run.cfg") << "R = 0.99\np = 2\nq = 2\neps = 100\nnr = 32\nna = 64\n";
  const auto stationary = run("--config " + (out / "run.cfg").string() + " flow --na 128", out);
  CHECK(stationary.code == 0);
  CHECK(stationary.output.find("degrees (2,2)") != std::string::npos);
  const auto first = slurp(out / "trace.csv");
  CHECK(run("--config " + (out / "run.cfg").string() + " flow --na 128", out).code == 0);
  CHECK(slurp(out / "trace.csv") == first);
  const auto e = run("energy --field " + (out / "field.csv").string() + " --grid " + (out / "grid.json").string() +
                         " --eps 100",
                     out);
  CHECK(e.code == 0);
  CHECK(run("energy --R 0.5 --p 1 --q 0 --init test --nr 64 --na 512", out).code == 0);
  CHECK(run("flow --R 0 --p 1 --q 1", out).code == 1);
  fs::remove_all(out);
}

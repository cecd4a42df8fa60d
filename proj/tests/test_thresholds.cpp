#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "annulus/energy.hpp"
#include "annulus/radial.hpp"
#include "annulus/thresholds.hpp"

using namespace annulus;

TEST_CASE("Q polynomial") {
  const double s = std::sqrt(2.0) - 1.0;
  CHECK(std::abs(q_polynomial(2, s)) < 1e-15);
  for (int p = 1; p <= 7; ++p) {
    CHECK(q_polynomial(p, 1.0) == -2.0);
    CHECK(q_polynomial(p, 0.0) == p - 1.0);
    for (int i = 0; i < 20; ++i) CHECK(q_polynomial(p, (i + 1) / 20.0) < q_polynomial(p, i / 20.0));
  }
}

TEST_CASE("Q root") {
  CHECK(std::abs(q_root(2) - (std::sqrt(2.0) - 1.0)) < 1e-10);
  const double r3 = q_root(3);
  CHECK(std::abs(2.0 - 3.0 * r3 - r3 * r3 * r3) < 1e-12);
  double previous = 0.0;
  for (int p = 2; p <= 7; ++p) {
    const double r = q_root(p);
    CHECK(r > previous);
    CHECK(q_polynomial(p, r - 1e-6) > 0.0);
    CHECK(q_polynomial(p, r + 1e-6) < 0.0);
    previous = r;
  }
  CHECK_THROWS_AS(q_root(1), NoRootError);
  CHECK_THROWS_AS(q_root(0), ParameterError);
}

TEST_CASE("hypothesis check") {
  CHECK(hypothesis_h_check(2, 0.5).holds);
  const auto open = hypothesis_h_check(2, 0.3);
  CHECK_FALSE(open.holds);
  CHECK(open.margin < 0.0);
  for (double R : {0.01, 0.5, 0.99}) {
    const auto one = hypothesis_h_check(1, R);
    CHECK(one.holds);
    CHECK(one.margin == doctest::Approx(kTwoPi - kTwoPi * (1 - R) / (1 + R)));
  }
}

TEST_CASE("energy gap") {
  for (int p = 2; p <= 6; ++p) {
    const double root = q_root(p);
    CHECK(radial_energy_gap(p, root) == doctest::Approx(kTwoPi).epsilon(1e-10));
    for (int i = 1; i <= 20; ++i) {
      const double above = root + (1.0 - root) * i / 21.0;
      const double below = root * i / 21.0;
      CHECK(radial_energy_gap(p, above) < kTwoPi);
      CHECK(radial_energy_gap(p, below) > kTwoPi);
    }
    CHECK(std::abs(radial_energy_gap(p, 1.0 - 1e-9)) < 1e-6);
  }
  CHECK(radial_harmonic_energy(0, 0.4) == 0.0);
}

TEST_CASE("energy gap agrees with the discrete energy") {
  const double R = 0.6;
  const auto g = make_grid(AnnulusSpec(R), 512, 512);
  auto energy = [&](int p) {
    return evaluate_energy(radial_ansatz(g, harmonic_profile(g.annulus(), p, g.radial_nodes()), p),
                           Coupling::infinite()).total;
  };
  CHECK((energy(3) - energy(2)) == doctest::Approx(radial_energy_gap(3, R)).epsilon(1e-5));
}

TEST_CASE("beta threshold") {
  std::vector<double> betas;
  for (int p = 1; p <= 5; ++p) betas.push_back(beta_threshold(p));
  // Quadrature regression value.
  CHECK(betas[0] == doctest::Approx(0.5813549008).epsilon(1e-6));
  CHECK(betas[0] < std::exp(-1.0 / (16.0 * kPi * kPi)));
  for (int p = 1; p < 5; ++p) CHECK(betas[p] >= betas[p - 1]);
  for (int p = 1; p <= 5; ++p) {
    const double b = betas[static_cast<std::size_t>(p - 1)];
    CHECK(gb_integral_criterion(AnnulusSpec(b + 1e-4), p).holds);
    CHECK_FALSE(gb_integral_criterion(AnnulusSpec(b - 1e-4), p).holds);
  }
  CHECK(beta_threshold(1, 1e-6) == 0.0);
  CHECK_THROWS_AS(beta_threshold(1, -1.0), ParameterError);
}

TEST_CASE("threshold table") {
  const std::vector<double> samples{0.3, 0.5, 0.9};
  const auto one = threshold_report(1, samples);
  CHECK_FALSE(one.q_root.has_value());
  CHECK(one.hypothesis_h_holds_at.size() == 3);
  const auto two = threshold_report(2, samples);
  REQUIRE(two.q_root.has_value());
  CHECK(*two.capacity_at_root == doctest::Approx(-kTwoPi / std::log(std::sqrt(2.0) - 1.0)));
  CHECK_FALSE(two.hypothesis_h_holds_at[0].second);
  CHECK(two.hypothesis_h_holds_at[1].second);
  CHECK(threshold_csv_header() == "p,q_root,beta_p,capacity_at_q_root");
  const auto path = std::filesystem::temp_directory_path() / "annulus_thresholds_test.csv";
  const std::vector<ThresholdReport> rows{one, two};
  write_threshold_csv(rows, path);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("0.41421356") != std::string::npos);
  std::filesystem::remove(path);
}

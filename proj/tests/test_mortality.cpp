// Mortality laws: closed-form hazards, survival and density values,
// hazard inversion round trips, and the tabulated law's two tails.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "bequest/mortality.hpp"

using namespace bequest;
using Catch::Approx;

TEST_CASE("constant force closed forms") {
  MortalityLaw law = ConstantForce(0.05);
  CHECK(horizon(law) == kInf);
  CHECK(sup_hazard(law) == 0.05);
  CHECK(hazard(law, 3.0) == 0.05);
  CHECK(cumulative_hazard(law, 2.0, 12.0) == Approx(0.5).epsilon(1e-14));
  CHECK(survival(law, 0.0, 20.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(density(law, 20.0) == Approx(0.05 * std::exp(-1.0)).epsilon(1e-14));
  // Memorylessness: survival over [t, t+u] does not depend on t.
  CHECK(survival(law, 7.0, 7.0 + 4.0) == Approx(survival(law, 0.0, 4.0)).epsilon(1e-14));
}

TEST_CASE("demoivre closed forms") {
  MortalityLaw law = DeMoivre(100.0);
  CHECK(horizon(law) == 100.0);
  CHECK(sup_hazard(law) == kInf);
  CHECK(hazard(law, 0.0) == Approx(0.01).epsilon(1e-14));
  CHECK(hazard(law, 60.0) == Approx(1.0 / 40.0).epsilon(1e-14));
  // Survival is linear, the death density is flat at 1/T.
  CHECK(survival(law, 0.0, 30.0) == Approx(0.70).epsilon(1e-12));
  CHECK(survival(law, 20.0, 60.0) == Approx(0.50).epsilon(1e-12));
  CHECK(cumulative_hazard(law, 20.0, 60.0) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(density(law, 42.0) == Approx(0.01).epsilon(1e-10));
  // Everyone is dead by the horizon.
  CHECK(survival(law, 0.0, 100.0) == 0.0);
  CHECK_THROWS_AS(hazard(law, 100.0), std::domain_error);
  CHECK_THROWS_AS(hazard(law, -1.0), std::domain_error);
}

TEST_CASE("gamma-two closed forms") {
  // hazard(t) = mu^2 t / (1 + mu t), survival(0, t) = (1 + mu t) e^{-mu t}.
  MortalityLaw law = GammaTwo(0.05);
  CHECK(horizon(law) == kInf);
  CHECK(sup_hazard(law) == 0.05);
  CHECK(hazard(law, 0.0) == 0.0);
  CHECK(hazard(law, 20.0) == Approx(0.0025 * 20.0 / 2.0).epsilon(1e-14));
  CHECK(survival(law, 0.0, 75.0) == Approx(4.75 * std::exp(-3.75)).epsilon(1e-13));
  CHECK(survival(law, 0.0, 75.0) == Approx(0.11170929281604326).epsilon(1e-12));
  CHECK(density(law, 20.0) == Approx(0.018393972058572117).epsilon(1e-12));
  CHECK(cumulative_hazard(law, 0.0, 20.0) == Approx(1.0 - std::log(2.0)).epsilon(1e-12));
  // Conditional survival = ratio of unconditional survivals.
  CHECK(survival(law, 10.0, 30.0) ==
        Approx(survival(law, 0.0, 30.0) / survival(law, 0.0, 10.0)).epsilon(1e-12));
}

TEST_CASE("linear-pdf closed forms") {
  // Death density g(t) = r - 2 (rT - 1) t / T^2, here g(t) = 0.02 - t/9000.
  MortalityLaw law = LinearPdf(0.02, 60.0);
  CHECK(horizon(law) == 60.0);
  CHECK(density(law, 0.0) == Approx(0.02).epsilon(1e-12));
  CHECK(density(law, 30.0) == Approx(0.02 - 30.0 / 9000.0).epsilon(1e-12));
  CHECK(survival(law, 0.0, 30.0) == Approx(0.45).epsilon(1e-12));
  CHECK(survival(law, 0.0, 60.0) == 0.0);
  CHECK(hazard(law, 30.0) == Approx(density(law, 30.0) / 0.45).epsilon(1e-10));
  // The construction needs r T > 1, otherwise the density turns increasing.
  CHECK_THROWS_AS(LinearPdf(0.01, 60.0), std::domain_error);
}

TEST_CASE("tabulated step law with constant-rate tail") {
  Tabulated tab({0.0, 10.0, 20.0}, {0.01, 0.03, 0.05}, Interp::Step, Tail::ConstantRate);
  MortalityLaw law = tab;
  CHECK(horizon(law) == kInf);
  CHECK(sup_hazard(law) == 0.05);
  CHECK(hazard(law, 5.0) == 0.01);
  CHECK(hazard(law, 10.0) == 0.03);
  CHECK(hazard(law, 15.0) == 0.03);
  CHECK(hazard(law, 250.0) == 0.05);
  // Prefix sums: H(10) = 0.1, H(20) = 0.4, then 0.05 per year.
  CHECK(cumulative_hazard(law, 0.0, 25.0) == Approx(0.65).epsilon(1e-13));
  CHECK(cumulative_hazard(law, 5.0, 25.0) == Approx(0.60).epsilon(1e-13));
  // Knots surface as integration breakpoints.
  auto bp = hazard_breakpoints(law, 5.0, 25.0);
  REQUIRE(bp.size() == 4);
  CHECK(bp[1] == 10.0);
  CHECK(bp[2] == 20.0);
}

TEST_CASE("tabulated linear interpolation") {
  Tabulated tab({0.0, 10.0, 20.0}, {0.01, 0.03, 0.05}, Interp::Linear, Tail::ConstantRate);
  MortalityLaw law = tab;
  CHECK(hazard(law, 5.0) == Approx(0.02).epsilon(1e-14));
  CHECK(hazard(law, 15.0) == Approx(0.04).epsilon(1e-14));
  // Trapezoid prefix: H(10) = 0.2, then 0.03*5 + 0.5*0.002*25.
  CHECK(cumulative_hazard(law, 0.0, 15.0) == Approx(0.375).epsilon(1e-13));
}

TEST_CASE("tabulated finite-horizon tail completes hyperbolically") {
  // The final row's rate is a placeholder; the last segment uses
  // c / (T - t) with c matched to the anchor rate at the previous knot.
  Tabulated tab({0.0, 10.0, 50.0}, {0.01, 0.02, 999.0}, Interp::Step, Tail::FiniteHorizon);
  MortalityLaw law = tab;
  CHECK(horizon(law) == 50.0);
  CHECK(sup_hazard(law) == kInf);
  CHECK(hazard(law, 10.0) == Approx(0.02).epsilon(1e-12));  // c = 0.02 * 40 = 0.8
  CHECK(hazard(law, 30.0) == Approx(0.8 / 20.0).epsilon(1e-12));
  CHECK(cumulative_hazard(law, 0.0, 30.0) == Approx(0.1 + 0.8 * std::log(2.0)).epsilon(1e-12));
  CHECK(survival(law, 0.0, 50.0) == 0.0);
}

TEST_CASE("tabulated validation") {
  CHECK_THROWS_AS(Tabulated({0.0}, {0.01}, Interp::Step, Tail::ConstantRate), std::domain_error);
  CHECK_THROWS_AS(Tabulated({1.0, 2.0}, {0.01, 0.02}, Interp::Step, Tail::ConstantRate),
                  std::domain_error);
  CHECK_THROWS_AS(Tabulated({0.0, 2.0}, {0.02, 0.01}, Interp::Step, Tail::ConstantRate),
                  std::domain_error);  // decreasing rates
  CHECK_THROWS_AS(Tabulated({0.0, 2.0}, {0.0, 0.0}, Interp::Step, Tail::ConstantRate),
                  std::domain_error);  // zero tail rate
}

TEST_CASE("tabulated csv loader") {
  std::istringstream in("t,lambda\n0,0.01\n10,0.03\n20,0.05\n");
  MortalityLaw law = tabulated_from_csv(in, Interp::Step, Tail::ConstantRate);
  CHECK(hazard(law, 5.0) == 0.01);
  CHECK(hazard(law, 25.0) == 0.05);
}

TEST_CASE("inverse cumulative hazard round trips") {
  std::vector<MortalityLaw> laws = {ConstantForce(0.05), DeMoivre(100.0), GammaTwo(0.05),
                                    LinearPdf(0.02, 60.0)};
  for (const MortalityLaw& law : laws) {
    for (double t : {0.0, 5.0, 20.0}) {
      for (double target : {0.01, 0.3, 1.0, 2.5}) {
        double s = inverse_cumulative_hazard(law, t, target);
        if (s < horizon(law))
          CHECK(cumulative_hazard(law, t, s) == Approx(target).margin(1e-9));
        else
          CHECK(cumulative_hazard(law, t, horizon(law)) <= target + 1e-9);
      }
    }
  }
  // Closed forms where they exist.
  CHECK(inverse_cumulative_hazard(ConstantForce(0.05), 2.0, 0.4) == Approx(10.0).epsilon(1e-13));
  CHECK(inverse_cumulative_hazard(DeMoivre(100.0), 20.0, std::log(2.0)) ==
        Approx(60.0).epsilon(1e-12));
}

TEST_CASE("sample death time maps uniforms through the hazard") {
  MortalityLaw law = GammaTwo(0.05);
  // u = 1 is an immediate death (zero exponential draw).
  CHECK(sample_death_time(law, 1.0) == Approx(0.0).margin(1e-9));
  double s = sample_death_time(law, 0.2);
  CHECK(survival(law, 0.0, s) == Approx(0.2).margin(1e-9));
  CHECK_THROWS_AS(sample_death_time(law, 0.0), std::domain_error);
}

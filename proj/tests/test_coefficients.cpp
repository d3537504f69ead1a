#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mixedsde/bihari.hpp"
#include "mixedsde/coefficients.hpp"
#include "mixedsde/rng.hpp"

using namespace mixedsde;

TEST_CASE("rho1 piecewise definition") {
  CHECK(rho1(0.0, 2.0, 0.2) == 0.0);
  // delta = 0.5 >= 1/e is inadmissible
  CHECK_THROWS_AS(rho1(0.1, 2.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rho1(-0.1, 2.0, 0.2), std::domain_error);
  CHECK_THROWS_AS(rho1(0.1, 1.0, 0.2), std::invalid_argument);
  // 0.1 log^{1/2}(10), 40-digit oracle
  CHECK(rho1(0.1, 2.0, 0.2) == Catch::Approx(0.15174271293851463509).epsilon(1e-14));

  SECTION("continuity and analytic left derivative at the splice") {
    const double below = rho1(0.2 - 1e-12, 2.0, 0.2);
    const double above = rho1(0.2 + 1e-12, 2.0, 0.2);
    CHECK(std::abs(above - below) < 1e-10);
    // analytic derivative against a symmetric difference just below delta
    const double h = 1e-7;
    const double fd = (rho1(0.2, 2.0, 0.2) - rho1(0.2 - h, 2.0, 0.2)) / h;
    CHECK(rho1_left_derivative(2.0, 0.2) == Catch::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("rho2 piecewise definition") {
  CHECK(rho2(0.0, 2.0, 0.1) == 0.0);
  CHECK_THROWS_AS(rho2(0.1, 2.0, 0.45), std::invalid_argument);
  // 0.05 log^{1/2}(20) log^{1/2}(log 20), 40-digit oracle
  CHECK(rho2(0.05, 2.0, 0.1) == Catch::Approx(0.090648822384270888628).epsilon(1e-14));
  SECTION("continuity at the splice") {
    const double below = rho2(0.1 - 1e-12, 2.0, 0.1);
    const double above = rho2(0.1 + 1e-12, 2.0, 0.1);
    CHECK(std::abs(above - below) < 1e-10);
  }
  SECTION("left derivative matches finite differences") {
    const double h = 1e-7;
    const double fd = (rho2(0.1, 2.0, 0.1) - rho2(0.1 - h, 2.0, 0.1)) / h;
    CHECK(rho2_left_derivative(2.0, 0.1) == Catch::Approx(fd).epsilon(1e-5));
  }
  SECTION("a delta with negative left derivative is rejected") {
    // log(1/delta) barely above 1 makes log log tiny and the derivative negative
    CHECK_THROWS_AS(rho2(0.05, 2.0, 0.36), std::invalid_argument);
  }
}

TEST_CASE("built-in moduli are concave and nondecreasing on samples") {
  const auto r1 = ModulusOfContinuity::rho1_modulus(2.0, 0.2);
  const auto r2 = ModulusOfContinuity::rho2_modulus(2.0, 0.1);
  GaussianStream stream(99);
  for (const auto& [rho, delta] : {std::pair{&r1, 0.2}, std::pair{&r2, 0.1}}) {
    for (int k = 0; k < 10000; ++k) {
      const double u = stream.uniform() * delta;
      const double v = stream.uniform() * delta;
      const double mid = (*rho)((u + v) / 2.0);
      CHECK(mid >= 0.5 * ((*rho)(u) + (*rho)(v)) - 1e-12);
      const double lo = std::min(u, v) * 5.0;  // cover the extension branch too
      const double hi = std::max(u, v) * 5.0;
      CHECK((*rho)(hi) >= (*rho)(lo) - 1e-12);
    }
  }
}

TEST_CASE("linear extension preserves concavity") {
  for (double q : {1.5, 2.0, 4.0}) {
    for (double delta : {0.05, 0.2, 0.3}) {
      const double slope = rho1_left_derivative(q, delta);
      CHECK(slope >= 0.0);
      // slope of the secant just below delta dominates the extension slope
      const double h = delta * 1e-6;
      const double secant = (rho1(delta, q, delta) - rho1(delta - h, q, delta)) / h;
      CHECK(secant >= slope - 1e-6);
    }
  }
}

TEST_CASE("divergence certification via the barrier") {
  const auto r1 = ModulusOfContinuity::rho1_modulus(2.0, 0.2);
  const auto r2 = ModulusOfContinuity::rho2_modulus(2.0, 0.1);
  for (const auto* rho : {&r1, &r2}) {
    double prev = 0.0;
    for (int k = 1; k <= 12; ++k) {
      const double v = std::abs(barrier_F(std::pow(10.0, -k), *rho, 2.0));
      CHECK(v > prev);           // strictly increasing magnitude
      CHECK(v - prev > 1e-3);    // no plateau
      prev = v;
    }
  }
}

TEST_CASE("hypothesis probe") {
  SECTION("identity drift passes the growth check") {
    auto cs = make_preset("linear");
    cs.drift = [](double, std::span<const double> x, std::span<double> o) { o[0] = x[0]; };
    const SampleBox box{0.0, 1.0, {-5.0}, {5.0}};
    const auto rep = probe_hypotheses(cs, box, 4000, 1);
    CHECK(rep.check("H.1.1").pass);
  }
  SECTION("quadratic drift fails with a witness near the box edge") {
    auto cs = make_preset("linear");
    cs.drift = [](double, std::span<const double> x, std::span<double> o) { o[0] = x[0] * x[0]; };
    const SampleBox box{0.0, 1.0, {-10.0}, {10.0}};
    const auto rep = probe_hypotheses(cs, box, 4000, 1);
    const auto& check = rep.check("H.1.1");
    CHECK_FALSE(check.pass);
    CHECK(check.max_ratio > 1.0);
    REQUIRE(check.witness.size() >= 3);
    CHECK(std::abs(check.witness[2]) > 8.0);  // witness x near the edge where x^2/(1+|x|) peaks
  }
  SECTION("sine fractional diffusion satisfies H.2") {
    auto cs = make_preset("trig");
    const SampleBox box{0.0, 1.0, {-7.0}, {7.0}};
    const auto rep = probe_hypotheses(cs, box, 8000, 5);
    CHECK(rep.check("H.2.1").pass);
    CHECK(rep.check("H.2.2").pass);
    CHECK(rep.check("H.2.3").pass);
  }
  SECTION("all built-in presets satisfy their own hypotheses") {
    for (const char* name : {"linear", "trig", "rho1-lipschitz-free"}) {
      const auto cs = make_preset(name);
      const SampleBox box{0.0, 1.0, {-3.0}, {3.0}};
      const auto rep = probe_hypotheses(cs, box, 10000, 7);
      INFO(name);
      CHECK(rep.pass);
    }
  }
  SECTION("evaluator exceptions carry the offending point") {
    auto cs = make_preset("linear");
    cs.drift = [](double, std::span<const double> x, std::span<double> o) {
      if (x[0] > 2.0) throw std::runtime_error("blown up");
      o[0] = x[0];
    };
    const SampleBox box{0.0, 1.0, {-5.0}, {5.0}};
    CHECK_THROWS_WITH(probe_hypotheses(cs, box, 4000, 1),
                      Catch::Matchers::ContainsSubstring("x[0]="));
  }
}

TEST_CASE("finite-difference fallback for the sigma_H derivative") {
  const auto cs = make_preset("trig");
  const auto fd = finite_difference_dsigma_h(cs.sigma_h, 1, 1);
  std::vector<double> exact(1), approx(1);
  const std::vector<double> x = {0.7};
  cs.dsigma_h(0.0, x, exact);
  fd(0.0, x, approx);
  CHECK(approx[0] == Catch::Approx(exact[0]).epsilon(1e-8));
}

TEST_CASE("preset catalogue") {
  CHECK_THROWS_AS(make_preset("unknown"), std::invalid_argument);
  const auto lin = make_preset("linear");
  CHECK(lin.modulus.kind() == ModulusOfContinuity::Kind::kLinear);
  const auto rho = make_preset("rho1-lipschitz-free");
  CHECK(rho.modulus.kind() == ModulusOfContinuity::Kind::kRho1);
  // drift is genuinely non-Lipschitz at 0: difference quotients blow up
  std::vector<double> out1(1), out2(1);
  const double h1 = 1e-4, h2 = 1e-12;
  rho.drift(0.0, std::vector<double>{h1}, out1);
  rho.drift(0.0, std::vector<double>{h2}, out2);
  CHECK(out2[0] / h2 > out1[0] / h1);
}

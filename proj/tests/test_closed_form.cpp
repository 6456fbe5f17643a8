#include <cmath>
#include <random>

#include "crf/closed_form.hpp"
#include "crf/errors.hpp"
#include "doctest.h"

using namespace crf;

namespace {

void check_poly(const Polynomial& p, const std::vector<double>& expected) {
  REQUIRE(p.c.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(p.c[k] == doctest::Approx(expected[k]).epsilon(1e-15));
}

}  // namespace

TEST_CASE("P(t) examples") {
  check_poly(p_of_t({2, {0.0, 0.0}}), {1, 0, 0});
  check_poly(p_of_t({2, {1.0, 2.0}}), {1, 3, 2});
  check_poly(p_of_t({3, {2.0, 2.0, 2.0}}), {1, 6, 12, 8});
}

TEST_CASE("w_inv examples") {
  const RationalT flat = w_inv_closed(Polynomial{{1.0}});
  const auto fs = flat.series(4);
  CHECK(fs[0] == 0.0);
  CHECK(fs[1] == 1.0);
  for (int k = 2; k <= 4; ++k) CHECK(fs[static_cast<std::size_t>(k)] == 0.0);

  // (t + t^2/2) / (1 + t)
  const auto s = w_inv_closed(p_of_t({1, {1.0}})).series(6);
  const double expected[] = {0, 1, -0.5, 0.5, -0.5, 0.5, -0.5};
  for (int k = 0; k <= 6; ++k) CHECK(s[static_cast<std::size_t>(k)] == doctest::Approx(expected[k]).epsilon(1e-15));

  check_poly(w_inv_closed(p_of_t({2, {1.0, 2.0}})).num, {0, 1, 1.5, 2.0 / 3.0});
}

TEST_CASE("w_inv properties over random spectra") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    RicciSpectrum spec;
    spec.n = 1 + trial % 4;
    for (int i = 0; i < spec.n; ++i) spec.eigenvalues.push_back(trial % 2 ? u(rng) : u(rng) - 1.5);
    const Polynomial P = p_of_t(spec);
    const RationalT w = w_inv_closed(P);
    // (w P)' = P as polynomials
    const Polynomial lhs = derivative(w.num);
    for (int k = 0; k <= P.degree(); ++k) CHECK(lhs.coeff(k) == doctest::Approx(P.coeff(k)).epsilon(1e-14));
    const auto ser = w.series(3);
    CHECK(ser[0] == 0.0);
    CHECK(ser[1] == doctest::Approx(1.0));
    // series times P reproduces the numerator
    const auto big = w.series(12);
    for (int k = 0; k <= 12; ++k) {
      double acc = 0.0;
      for (int j = 0; j <= k; ++j) acc += P.coeff(j) * big[static_cast<std::size_t>(k - j)];
      CHECK(acc == doctest::Approx(w.num.coeff(k)).epsilon(1e-9).scale(1.0));
    }
    if (trial % 2)
      for (double t : {0.0, 0.5, 3.0, 100.0}) {
        CHECK(P(t) > 0.0);
        CHECK(std::isfinite(w(t)));
      }
  }
}

TEST_CASE("omega_of_t") {
  const int D = 6;
  const InitialData flat = flat_metric(2, D);
  JetMatrix zero(2, Jet(2, D));
  const OmegaSeries a = omega_of_t(flat.h, zero, 3);
  CHECK(max_abs(a.g(0, 0)[1]) == 0.0);
  CHECK(max_abs_diff(a.det[0], Jet::constant(2, D, 1.0)) == 0.0);
  CHECK(max_abs(a.det[1]) == 0.0);

  const double lambda = 1.5;
  JetMatrix rho = map_entries(flat.h, [&](const Jet& e) { return lambda * e; });
  const OmegaSeries b = omega_of_t(flat.h, rho, 2);
  CHECK(std::abs(b.det[1].constant_term() - Complex(2 * lambda)) < 1e-15);
  CHECK(std::abs(b.det[2].constant_term() - Complex(lambda * lambda)) < 1e-15);
}

TEST_CASE("spectra of built-in metrics") {
  auto spec = [](const char* text, int D) { return spectrum_from_metric(builtin_metric(parse_metric_spec(text), D)); };
  CHECK(spec("fubini_study_chart:1", 10).eigenvalues.at(0) == doctest::Approx(2.0));
  const auto fs2 = spec("fubini_study_chart:2,2", 8);
  CHECK(fs2.eigenvalues.at(0) == doctest::Approx(1.5));
  CHECK(fs2.eigenvalues.at(1) == doctest::Approx(1.5));
  const auto prod = spec("product:fubini_study_chart:1+flat:1", 8);
  CHECK(prod.eigenvalues.at(0) == doctest::Approx(0.0));
  CHECK(prod.eigenvalues.at(1) == doctest::Approx(2.0));
  CHECK(spec("flat:2", 4).eigenvalues.at(1) == 0.0);
  CHECK_THROWS_AS(spec("perturbed_flat:1,0.1,3", 8), InvalidInput);
  CHECK_THROWS_AS(spec("perturbed_flat:2,0.1,3", 8), InvalidInput);
}

TEST_CASE("calibration against the solver") {
  SolverConfig cfg;
  cfg.M = 8;
  cfg.D = 12;

  SUBCASE("Fubini-Study") {
    const CalibrationReport r = calibrate(solve(fubini_study_chart(1, 1.0, cfg.D), cfg));
    REQUIRE(r.kappa.has_value());
    CHECK(*r.kappa == 4.0);
    CHECK(r.kappa_unique);
    CHECK(r.max_deviation <= 1e-9);
    CHECK(r.det_deviation <= 1e-12);
  }
  SUBCASE("Fubini-Study, c = 2") {
    cfg.c = 2.0;
    const CalibrationReport r = calibrate(solve(fubini_study_chart(1, 1.0, cfg.D), cfg));
    REQUIRE(r.kappa.has_value());
    CHECK(*r.kappa == 2.0);
    CHECK(r.max_deviation <= 1e-9);
  }
  SUBCASE("product with a flat factor") {
    cfg.M = 4;
    cfg.D = 10;
    const CalibrationReport r = calibrate(solve(builtin_metric(parse_metric_spec("product:fubini_study_chart:1+flat:1"), cfg.D), cfg));
    REQUIRE(r.kappa.has_value());
    CHECK(*r.kappa == 4.0);
    CHECK(r.max_deviation <= 1e-9);
  }
  SUBCASE("flat: every candidate fits") {
    const CalibrationReport r = calibrate(solve(flat_metric(1, cfg.D), cfg));
    REQUIRE(r.kappa.has_value());
    CHECK(*r.kappa == 1.0);
    CHECK(!r.kappa_unique);
    CHECK(r.max_deviation == 0.0);
  }
  SUBCASE("non-constant spectrum is rejected") {
    cfg.M = 2;
    cfg.D = 8;
    CHECK_THROWS_AS(calibrate(solve(perturbed_flat(1, 0.1, 1, 4, cfg.D), cfg)), InvalidInput);
  }
}

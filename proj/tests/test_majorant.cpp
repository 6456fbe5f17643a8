#include <cmath>
#include <numbers>
#include <random>

#include "crf/errors.hpp"
#include "crf/majorant.hpp"
#include "doctest.h"

using namespace crf;

namespace {

constexpr double e = std::numbers::e;

Solution run(const InitialData& in, int M, int D) {
  SolverConfig cfg;
  cfg.M = M;
  cfg.D = D;
  return solve(in, cfg);
}

MajorantParams simple_params(double A, double R = 0.5, double M = 4.0) {
  MajorantParams p;
  p.A = A;
  p.R = R;
  p.M_const = M;
  return p;
}

NonlinearityTerm term(int p, int q, std::vector<int> beta, double bound) {
  NonlinearityTerm t;
  t.p = p;
  t.q = q;
  t.beta = std::move(beta);
  t.bound = bound;
  return t;
}

const NonlinearityTerm* find_term(const NonlinearityBounds& b, int p, int q, std::vector<int> beta) {
  for (const auto& t : b.terms)
    if (t.p == p && t.q == q && t.beta == beta) return &t;
  return nullptr;
}

}  // namespace

TEST_CASE("polydisc samples") {
  const auto pts = polydisc_samples(4, 0.3, 100);
  CHECK(pts.size() == 100 + 16);
  for (const auto& p : pts)
    for (const auto& z : p) CHECK(std::abs(z) == doctest::Approx(0.3));
  CHECK(polydisc_samples(4, 0.3, 100) == pts);
}

TEST_CASE("parameter estimates") {
  InitialData lin = flat_metric(1, 10);
  lin.h(0, 0) = Jet::constant(1, 10, 1.0) + Jet::coordinate(1, 10, 0);
  const MajorantParams p = estimate_params(run(lin, 2, 10), 0.5);
  CHECK(p.A >= 0.5);  // |v_1(0)| = 1/2
  CHECK(p.sigma == 1.0);
  CHECK(p.M_const == 4.0);
  CHECK(p.euler_e == e);

  const MajorantParams f = estimate_params(run(flat_metric(2, 8), 3, 8), 0.5);
  CHECK(f.A_sampled == 0.0);
  CHECK(f.A == f.A_floor);
  CHECK(f.A_floor == 1e-8);

  const Solution fs = run(fubini_study_chart(1, 1.0, 8), 2, 8);
  CHECK_THROWS_AS(estimate_params(fs, 0.0), InvalidInput);
  CHECK_THROWS_AS(estimate_params(fs, 1.0), InvalidInput);
  CHECK_THROWS_AS(estimate_params(fs, 0.75), InvalidInput);  // beyond 1/sqrt(2)
  CHECK_NOTHROW(estimate_params(fs, 0.5));
}

TEST_CASE("nonlinearity bounds for a flat line") {
  // det(1 + Y) e^{-Z} - 1 + Z: |coefficient of Z^q| = 1/q!, of Y Z^q = 1/q!.
  const Solution s = run(flat_metric(1, 6), 4, 6);
  const NonlinearityBounds b = estimate_nonlinearity_bounds(s, estimate_params(s, 0.5), 4);
  REQUIRE(find_term(b, 0, 2, {0}));
  CHECK(find_term(b, 0, 2, {0})->bound == doctest::Approx(0.5));
  CHECK(find_term(b, 0, 4, {0})->bound == doctest::Approx(1.0 / 24));
  CHECK(find_term(b, 0, 0, {1})->bound == doctest::Approx(1.0));
  CHECK(find_term(b, 0, 2, {1})->bound == doctest::Approx(0.5));
  CHECK(!find_term(b, 0, 1, {0}));
  CHECK(!find_term(b, 1, 0, {0}));  // a = 0
  CHECK(!find_term(b, 0, 3, {1}));  // reaches t^5 only
}

TEST_CASE("majorant sequence by hand") {
  const double A = 0.7;
  NonlinearityBounds none;
  none.m_max = 6;
  const auto zero = majorant_sequence(simple_params(A), none, 6);
  CHECK(zero[0] == A);
  for (std::size_t k = 1; k < zero.size(); ++k) CHECK(zero[k] == 0.0);

  NonlinearityBounds quad;
  quad.m_max = 3;
  quad.terms.push_back(term(0, 2, {0}, 0.3));
  const auto cq = majorant_sequence(simple_params(A), quad, 3);
  CHECK(cq[1] == doctest::Approx(0.3 * A * A));
  CHECK(cq[2] == doctest::Approx(0.3 * 2 * A * cq[1]));

  NonlinearityBounds lin_y;
  lin_y.m_max = 2;
  lin_y.terms.push_back(term(0, 0, {1}, 0.2));
  CHECK(majorant_sequence(simple_params(A, 0.5, 4.0), lin_y, 2)[1] == doctest::Approx(4 * e * e * 4.0 * 0.2 * A));

  NonlinearityBounds cubic;  // weight 3 picks up one factor of R
  cubic.m_max = 3;
  cubic.terms.push_back(term(0, 3, {0}, 1.5));
  CHECK(majorant_sequence(simple_params(A, 0.4), cubic, 3)[2] == doctest::Approx(1.5 * 0.4 * A * A * A));

  CHECK_THROWS_AS(majorant_sequence(simple_params(A), cubic, 4), InvalidInput);
}

TEST_CASE("enlarging a bound never decreases the sequence") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    NonlinearityBounds b;
    b.m_max = 6;
    for (int p = 0; p <= 2; ++p)
      for (int q = 0; q <= 3; ++q)
        for (int y = 0; y <= 1; ++y)
          if (p + q + 2 * y >= 2 && p + q + 2 * y <= 6 && u(rng) < 0.5) b.terms.push_back(term(p, q, {y}, u(rng)));
    if (b.terms.empty()) continue;
    const MajorantParams p = simple_params(0.1 + u(rng), 0.1 + 0.8 * u(rng));
    const auto before = majorant_sequence(p, b, 6);
    b.terms[static_cast<std::size_t>(trial) % b.terms.size()].bound *= 1.5;
    const auto after = majorant_sequence(p, b, 6);
    for (std::size_t k = 0; k < before.size(); ++k) {
      CHECK(after[k] >= before[k]);
      CHECK(before[k] >= 0.0);
    }
  }
}

TEST_CASE("domination on solver output") {
  SUBCASE("flat") {
    const MajorantReport r = run_majorant(run(flat_metric(1, 12), 5, 12), 0.5, 5);
    CHECK(r.passed());
    CHECK(r.C1_equals_A);
    for (const auto& row : r.rows) CHECK(row.lhs == 0.0);
    CHECK(!r.radius.radius.has_value());
  }
  SUBCASE("perturbed flat") {
    for (unsigned seed : {1u, 2u, 3u}) {
      const MajorantReport r = run_majorant(run(perturbed_flat(1, 0.1, seed, 4, 20), 8, 20), 0.5, 8);
      CHECK(r.domination_passed());
      CHECK(r.passed());
      CHECK(r.C1_equals_A);
      CHECK(r.rows.size() == 8 * 3 * 3);
      for (const auto& row : r.rows) CHECK(row.points >= 100);
      REQUIRE(r.radius.radius.has_value());
      CHECK(*r.radius.radius > 0.0);
    }
  }
}

TEST_CASE("Cauchy derivative estimate") {
  for (int p = 0; p <= 5; ++p) CHECK(cauchy_estimate_check(p, 1.0, 0.5).passed());
  const auto a = cauchy_estimate_check(2, 1.0, 0.4), b = cauchy_estimate_check(2, 2.0, 0.4);
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(b.rows[k].lhs == doctest::Approx(2 * a.rows[k].lhs));
    CHECK(b.rows[k].rhs == doctest::Approx(2 * a.rows[k].rhs));
  }
  // p = 1 at the real corner: |f'| = C/(R-r)^2 exactly
  const auto one = cauchy_estimate_check(1, 1.0, 0.5);
  for (const auto& row : one.rows) CHECK(row.lhs == doctest::Approx(1.0 / ((0.5 - row.r) * (0.5 - row.r))));
  CHECK_THROWS_AS(cauchy_estimate_check(-1, 1.0, 0.5), InvalidInput);
  CHECK_THROWS_AS(cauchy_estimate_check(1, 1.0, 1.5), InvalidInput);
}

TEST_CASE("radius estimate") {
  const double A = 2.0, q = 3.0, R = 0.5, r = 0.25;
  std::vector<double> C;
  for (int m = 1; m <= 6; ++m) C.push_back(A * std::pow(q, m - 1) * std::pow(R - r, 2 * m - 2));
  const RadiusEstimate est = radius_estimate(C, R, r);
  REQUIRE(est.radius.has_value());
  CHECK(std::abs(*est.radius - 1.0 / q) <= 0.1 / q);

  const RadiusEstimate entire = radius_estimate({1.0, 0.0, 0.0, 0.0}, R, r);
  CHECK(!entire.radius.has_value());
  CHECK(entire.note.find("entire") != std::string::npos);
  CHECK_THROWS_AS(radius_estimate({1.0, 2.0, 3.0}, R, r), InvalidInput);
}

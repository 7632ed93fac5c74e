#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "kirchbif/errors.hpp"
#include "kirchbif/fiber.hpp"
#include "kirchbif/rng.hpp"

using namespace kirchbif;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Independent oracle for zero_energy_point: coarse 2D grid search on the joint
// residual of { psi = 0, psi' = 0 }, then finite-difference Newton on the
// residual vector. Never touches the closed-form algebra under test.
ZeroEnergyPoint zero_energy_grid_oracle(double a, double gamma, const FiberScalars& s) {
  auto res = [&](double t, double lam) {
    ProblemParams p{a, gamma, lam};
    const double scale = a * s.p * t * t;
    return std::array<double, 2>{eval_psi(p, s, t) / scale,
                                 eval_psi_derivs(p, s, t).first * t / scale};
  };
  double t_lo = 1e-2, t_hi = 1e2, l_lo = 1e-6, l_hi = 1e2;
  double best_t = 1.0, best_l = 1.0;
  for (int round = 0; round < 6; ++round) {
    double best = 1e300;
    for (int i = 0; i <= 40; ++i) {
      const double t = t_lo * std::pow(t_hi / t_lo, i / 40.0);
      for (int j = 0; j <= 40; ++j) {
        const double lam = l_lo * std::pow(l_hi / l_lo, j / 40.0);
        const auto r = res(t, lam);
        const double v = r[0] * r[0] + r[1] * r[1];
        if (v < best) {
          best = v;
          best_t = t;
          best_l = lam;
        }
      }
    }
    const double t_span = std::pow(t_hi / t_lo, 2.0 / 40.0);
    const double l_span = std::pow(l_hi / l_lo, 2.0 / 40.0);
    t_lo = best_t / t_span;
    t_hi = best_t * t_span;
    l_lo = best_l / l_span;
    l_hi = best_l * l_span;
  }
  // Damped Newton with a finite-difference Jacobian.
  for (int it = 0; it < 60; ++it) {
    const auto r = res(best_t, best_l);
    const double dt = 1e-7 * best_t;
    const double dl = 1e-7 * best_l;
    const auto rt = res(best_t + dt, best_l);
    const auto rl = res(best_t, best_l + dl);
    const double j00 = (rt[0] - r[0]) / dt, j01 = (rl[0] - r[0]) / dl;
    const double j10 = (rt[1] - r[1]) / dt, j11 = (rl[1] - r[1]) / dl;
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0) break;
    const double step_t = (r[0] * j11 - r[1] * j01) / det;
    const double step_l = (j00 * r[1] - j10 * r[0]) / det;
    const double damp = std::min(1.0, 0.2 * best_t / std::max(1e-300, std::abs(step_t)));
    best_t -= damp * step_t;
    best_l -= damp * step_l;
    if (std::abs(step_t) < 1e-12 * best_t && std::abs(step_l) < 1e-12 * best_l) break;
  }
  return {best_t, best_l};
}

// Relative residual scales: the sum of the magnitudes of the balancing terms.
double psi_term_scale(const ProblemParams& p, const FiberScalars& s, double t) {
  return 0.5 * p.a * s.p * t * t + 0.25 * p.lambda * s.p * s.p * t * t * t * t +
         s.q / p.gamma * std::pow(t, p.gamma);
}
double dpsi_term_scale(const ProblemParams& p, const FiberScalars& s, double t) {
  return t * (p.a * s.p + p.lambda * s.p * s.p * t * t +
              s.q * std::pow(t, p.gamma - 2.0));
}
double ddpsi_term_scale(const ProblemParams& p, const FiberScalars& s, double t) {
  return p.a * s.p + 3.0 * p.lambda * s.p * s.p * t * t +
         (p.gamma - 1.0) * s.q * std::pow(t, p.gamma - 2.0);
}

} // namespace

TEST_CASE("derived constants") {
  const auto c3 = DerivedConstants::from(1.0, 3.0);
  CHECK(rel_err(c3.c_agamma, 0.25) < 1e-15);
  CHECK(rel_err(c3.c0_agamma, 8.0 / 9.0) < 1e-14);
  CHECK(c3.ratio_exponent == doctest::Approx(6.0).epsilon(1e-15));

  const auto c25 = DerivedConstants::from(1.0, 2.5);
  CHECK(rel_err(c25.c_agamma, 0.10546875) < 1e-14); // (1/3)*(3/4)^4
  CHECK(rel_err(c25.c0_agamma, 0.8192) < 1e-14);    // 2*(4/5)^4

  // C_0 < 1 across the admissible gamma range.
  for (double g = 2.01; g < 3.995; g += 0.07)
    CHECK(DerivedConstants::from(2.3, g).c0_agamma < 1.0);
}

TEST_CASE("psi values at pinned points") {
  FiberScalars s{1.0, 1.0};
  CHECK(eval_psi({1.0, 3.0, 0.7}, s, 0.0) == 0.0);
  CHECK(rel_err(eval_psi({1.0, 3.0, 0.25}, s, 2.0), 1.0 / 3.0) < 1e-14);
  CHECK(std::abs(eval_psi({1.0, 3.0, 2.0 / 9.0}, s, 3.0)) < 1e-13);
  CHECK_THROWS_AS(eval_psi({1.0, 3.0, 0.25}, s, -1e-9), std::domain_error);
}

TEST_CASE("psi derivatives at pinned points") {
  FiberScalars s{1.0, 1.0};
  {
    auto [d1, d2] = eval_psi_derivs({1.0, 3.0, 2.0 / 9.0}, s, 3.0);
    CHECK(std::abs(d1) < 1e-13);
    (void)d2;
  }
  {
    auto [d1, d2] = eval_psi_derivs({1.0, 3.0, 0.25}, s, 2.0);
    CHECK(std::abs(d1) < 1e-13);
    CHECK(std::abs(d2) < 1e-13);
  }
  {
    const double tm = (1.0 - std::sqrt(0.2)) / 0.4;
    auto [d1, d2] = eval_psi_derivs({1.0, 3.0, 0.2}, s, tm);
    CHECK(std::abs(d1) < 1e-13);
    CHECK(d2 < 0.0);
  }
  CHECK_THROWS_AS(eval_psi_derivs({1.0, 3.0, 0.25}, s, 0.0), std::domain_error);
}

TEST_CASE("extremal and zero-energy maps, closed forms") {
  FiberScalars unit{1.0, 1.0};
  CHECK(rel_err(lambda_of(1.0, 3.0, unit), 0.25) < 1e-14);
  CHECK(rel_err(lambda_of(1.0, 3.0, {4.0, 8.0}), 0.25) < 1e-13); // 0-homogeneity, c=2
  CHECK(rel_err(lambda_of(1.0, 2.5, unit), 0.10546875) < 1e-13);

  CHECK(rel_err(lambda0_of(1.0, 3.0, unit), 2.0 / 9.0) < 1e-13);
  CHECK(rel_err(lambda0_of(1.0, 2.5, unit), 0.8192 * 0.10546875) < 1e-13);

  CHECK(rel_err(degenerate_point(1.0, 3.0, unit), 2.0) < 1e-14);
  CHECK(rel_err(degenerate_point(1.0, 2.5, unit), 16.0 / 9.0) < 1e-13);
  CHECK(rel_err(degenerate_point(1.0, 3.0, {4.0, 8.0}), 1.0) < 1e-13); // t(u)/c

  const auto z3 = zero_energy_point(1.0, 3.0, unit);
  CHECK(rel_err(z3.t0, 3.0) < 1e-14);
  CHECK(rel_err(z3.lambda0, 2.0 / 9.0) < 1e-13);
}

TEST_CASE("zero-energy point agrees with grid-search oracle at gamma = 2.5") {
  FiberScalars unit{1.0, 1.0};
  const auto z = zero_energy_point(1.0, 2.5, unit);
  CHECK(rel_err(z.lambda0, 0.8192 * 0.10546875) < 1e-13);
  const auto oracle = zero_energy_grid_oracle(1.0, 2.5, unit);
  CHECK(rel_err(z.t0, oracle.t0) < 1e-5);
  CHECK(rel_err(z.lambda0, oracle.lambda0) < 1e-5);
}

TEST_CASE("classification at pinned lambdas") {
  FiberScalars s{1.0, 1.0};
  {
    const auto c = classify_fiber({1.0, 3.0, 0.2}, s);
    REQUIRE(c.kind == FiberKind::TwoCritical);
    CHECK(rel_err(c.t_minus, (1.0 - std::sqrt(0.2)) / 0.4) < 1e-10);
    CHECK(rel_err(c.t_plus, (1.0 + std::sqrt(0.2)) / 0.4) < 1e-10);
    CHECK(c.t_minus < c.t_bracket);
    CHECK(c.t_bracket < c.t_plus);
  }
  CHECK(classify_fiber({1.0, 3.0, 0.25}, s).kind == FiberKind::Degenerate);
  CHECK(classify_fiber({1.0, 3.0, 0.25}, s).t_deg == doctest::Approx(2.0));
  CHECK(classify_fiber({1.0, 3.0, 0.3}, s).kind == FiberKind::Monotone);
  CHECK_THROWS_AS(classify_fiber({1.0, 3.0, 0.0}, s), std::domain_error);
}

TEST_CASE("n0 energy level") {
  CHECK(rel_err(n0_energy({1.0, 3.0, 0.25}), 1.0 / 3.0) < 1e-14);
  CHECK(rel_err(n0_energy({2.0, 3.0, 1.0}), 1.0 / 3.0) < 1e-14);
  // Radial 1/lambda decay.
  double prev = n0_energy({1.0, 3.0, 1.0});
  for (double lam = 2.0; lam < 1e6; lam *= 10.0) {
    const double cur = n0_energy({1.0, 3.0, lam});
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("randomized fiber properties") {
  Rng rng(20240811);
  for (int sample = 0; sample < 300; ++sample) {
    const double a = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const double g = rng.uniform(2.1, 3.9);
    FiberScalars s{std::exp(rng.uniform(std::log(1e-3), std::log(1e3))),
                   std::exp(rng.uniform(std::log(1e-3), std::log(1e3)))};

    const double lam_u = lambda_of(a, g, s);
    const double lam0_u = lambda0_of(a, g, s);
    const double t_u = degenerate_point(a, g, s);

    // Ordering.
    CHECK(lam0_u < lam_u);

    // Zero-energy identity at lambda0.
    const auto z = zero_energy_point(a, g, s);
    ProblemParams at0{a, g, z.lambda0};
    CHECK(std::abs(eval_psi(at0, s, z.t0)) <= 1e-10 * psi_term_scale(at0, s, z.t0));
    CHECK(std::abs(eval_psi_derivs(at0, s, z.t0).first) <=
          1e-10 * dpsi_term_scale(at0, s, z.t0));

    // Degenerate identities at lambda(u).
    ProblemParams atstar{a, g, lam_u};
    auto [d1, d2] = eval_psi_derivs(atstar, s, t_u);
    CHECK(std::abs(d1) <= 1e-10 * dpsi_term_scale(atstar, s, t_u));
    CHECK(std::abs(d2) <= 1e-10 * ddpsi_term_scale(atstar, s, t_u));

    // Bisection bracket point coalesces with the closed form at lambda(u).
    const double tb = detail::g_bracket_point(atstar, s);
    CHECK(rel_err(tb, t_u) < 1e-8);

    // Classification transition, exactly once, on an increasing lambda grid.
    const std::vector<double> fractions{0.4, 0.8, 0.999999999, 1.0, 1.0000000001, 1.3, 3.0};
    int transitions = 0;
    FiberKind prev_kind = FiberKind::TwoCritical;
    for (size_t i = 0; i < fractions.size(); ++i) {
      const auto cls = classify_fiber({a, g, fractions[i] * lam_u}, s);
      if (i == 0) CHECK(cls.kind == FiberKind::TwoCritical);
      if (i + 1 == fractions.size()) CHECK(cls.kind == FiberKind::Monotone);
      if (cls.kind != prev_kind) {
        ++transitions;
        // Only forward moves allowed.
        CHECK(static_cast<int>(cls.kind) > static_cast<int>(prev_kind));
        prev_kind = cls.kind;
      }
    }
    CHECK(transitions == 2); // TwoCritical -> Degenerate -> Monotone

    // Sign structure below lambda(u).
    for (double f : {0.3, 0.9}) {
      ProblemParams below{a, g, f * lam_u};
      const auto cls = classify_fiber(below, s);
      REQUIRE(cls.kind == FiberKind::TwoCritical);
      auto dm = eval_psi_derivs(below, s, cls.t_minus);
      auto dp = eval_psi_derivs(below, s, cls.t_plus);
      CHECK(dm.second < 0.0);
      CHECK(dp.second > 0.0);
      const double value_at_min = eval_psi(below, s, cls.t_plus);
      if (below.lambda < lam0_u * (1.0 - 1e-9)) {
        CHECK(value_at_min < 0.0);
      } else if (below.lambda > lam0_u * (1.0 + 1e-9)) {
        CHECK(value_at_min > 0.0);
      } else {
        CHECK(std::abs(value_at_min) <= 1e-10 * psi_term_scale(below, s, cls.t_plus));
      }
    }
    {
      // At lambda0 exactly the fiber minimum sits at zero energy.
      ProblemParams at_l0{a, g, lam0_u};
      const auto cls = classify_fiber(at_l0, s);
      REQUIRE(cls.kind == FiberKind::TwoCritical);
      const double v = eval_psi(at_l0, s, cls.t_plus);
      CHECK(std::abs(v) <= 1e-10 * psi_term_scale(at_l0, s, cls.t_plus));
    }

    // t_plus decreasing / t_minus increasing in lambda, both -> t(u).
    double prev_tp = 1e300, prev_tm = 0.0;
    for (double f : {0.2, 0.5, 0.8, 0.95, 0.999}) {
      const auto cls = classify_fiber({a, g, f * lam_u}, s);
      REQUIRE(cls.kind == FiberKind::TwoCritical);
      CHECK(cls.t_plus < prev_tp);
      CHECK(cls.t_minus > prev_tm);
      prev_tp = cls.t_plus;
      prev_tm = cls.t_minus;
    }
    CHECK(rel_err(prev_tp, t_u) < 0.15);
    CHECK(rel_err(prev_tm, t_u) < 0.15);

    // 0-homogeneity of lambda_of under (P,Q) -> (c^2 P, c^gamma Q).
    const double c = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    FiberScalars scaled{c * c * s.p, detail::pow_safe(c, g) * s.q};
    CHECK(rel_err(lambda_of(a, g, scaled), lam_u) < 1e-12);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ProblemParams({0.0, 3.0, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(ProblemParams({1.0, 2.0, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(ProblemParams({1.0, 4.0, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(ProblemParams({1.0, 3.0, -0.1}).validate(), ConfigError);
  CHECK_NOTHROW(ProblemParams({1.0, 3.0, 0.0}).validate());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latwave/sandwich.hpp"
#include "oracles.hpp"

using namespace latwave;

namespace {
const ModelParams kStd = validate_params(0.5, 3.0, 0.5, 1.0);

double a1_blocking(double c, double mu, double t) {
  return std::exp(t) + std::exp(-t) - 2.0 - c * t - mu;
}
} // namespace

TEST_CASE("selection satisfies the four assumptions") {
  const SandwichParams sp = select_parameters(kStd, 3.5);
  const auto lr = lambda_roots(kStd, 3.5);

  // (A1)
  CHECK(sp.theta > 0.0);
  CHECK(sp.theta < lr.lambda1);
  const double a1 = a1_blocking(3.5, kStd.mu, sp.theta);
  CHECK(a1 < 0.0);
  // (A2)
  CHECK(sp.rho > 1.0);
  CHECK(sp.rho > kStd.beta / (-a1));
  // (A3)
  CHECK(sp.eta > 1.0);
  CHECK(sp.eta < 1.0 + sp.theta / lr.lambda1);
  CHECK(sp.eta < lr.lambda2 / lr.lambda1);
  CHECK(char_psi(kStd, 3.5, sp.eta * lr.lambda1) < 0.0);
  // (A4)
  CHECK(sp.q > std::exp((1.0 - sp.eta) * lr.lambda1 * sp.xi1));
  CHECK(sp.q > kStd.beta * sp.rho /
                   (-char_psi(kStd, 3.5, sp.eta * lr.lambda1)));
  // kink ordering
  CHECK(sp.xi2 < sp.xi1);
  CHECK(sp.xi1 < 0.0);
  CHECK(sp.xi1 == doctest::Approx(-std::log(sp.rho) / sp.theta));
  CHECK(sp.xi2 ==
        doctest::Approx(-std::log(sp.q) / ((sp.eta - 1.0) * sp.lambda1)));
}

TEST_CASE("the blocking function is negative near zero") {
  // e^t + e^-t - 2 - c t - mu -> -mu as t -> 0+, so (A1) is satisfiable
  CHECK(a1_blocking(3.5, kStd.mu, 1e-10) < 0.0);
  CHECK(a1_blocking(0.1, kStd.mu, 1e-10) < 0.0);
}

TEST_CASE("selection rejects subcritical speeds and bad margins") {
  CHECK_THROWS_AS(select_parameters(kStd, 2.0), SpeedNotSupercritical);
  CHECK_THROWS_AS(select_parameters(kStd, 3.5, 1.0), InvalidArgument);
}

TEST_CASE("upper pair evaluation") {
  const SandwichParams sp = select_parameters(kStd, 3.5);
  auto [p0, q0] = eval_upper(sp, 0.0);
  CHECK(p0 == 1.0);
  CHECK(q0 == 1.0);
  auto [p1, q1] = eval_upper(sp, -5.0);
  CHECK(p1 == 1.0);
  CHECK(q1 == doctest::Approx(std::exp(-5.0 * sp.lambda1)).epsilon(1e-15));
  auto [p2, q2] = eval_upper(sp, -100.0);
  CHECK(q2 < 1e-30); // decays to the disease-free limit
  CHECK(p2 == 1.0);
}

TEST_CASE("lower pair kinks and interior values") {
  const SandwichParams sp = select_parameters(kStd, 3.5);
  // continuity at the kinks
  auto [pl, ql] = eval_lower(sp, sp.xi1);
  CHECK(pl == 0.0);
  CHECK(std::abs(1.0 - sp.rho * std::exp(sp.theta * sp.xi1)) <= 1e-14);
  auto [pl2, ql2] = eval_lower(sp, sp.xi2);
  CHECK(ql2 == 0.0);
  CHECK(std::abs(std::exp(sp.lambda1 * sp.xi2) -
                 sp.q * std::exp(sp.eta * sp.lambda1 * sp.xi2)) <= 1e-14);
  // strictly interior well left of the kinks
  auto [pi, qi] = eval_lower(sp, 2.0 * sp.xi2);
  CHECK(pi > 0.0);
  CHECK(pi < 1.0);
  CHECK(qi > 0.0);
  CHECK(qi < std::exp(sp.lambda1 * 2.0 * sp.xi2));
}

TEST_CASE("pointwise ordering lower <= upper") {
  const SandwichParams sp = select_parameters(kStd, 3.5);
  for (double xi = -60.0; xi <= 60.0; xi += 0.37) {
    const auto lo = eval_lower(sp, xi);
    const auto up = eval_upper(sp, xi);
    CHECK(lo.first <= up.first);
    CHECK(lo.second <= up.second);
    CHECK(lo.first >= 0.0);
    CHECK(lo.second >= 0.0);
  }
}

TEST_CASE("inequality verification on the standard configuration") {
  const SandwichParams sp = select_parameters(kStd, 3.5);
  GridSpec grid;
  grid.lo = -40.0;
  grid.hi = 40.0;
  const InequalityReport rep = verify_inequalities(kStd, 3.5, sp, grid);
  CHECK(rep.pass);
  // i1 is -beta phi_up psi_low: nonpositive by construction
  CHECK(rep.checks[0].worst_residual <= 0.0);
  // i3 is the exact characteristic identity
  CHECK(std::abs(rep.checks[2].worst_residual) <= 1e-12);
  CHECK(rep.excluded_points > 0);
  CHECK_FALSE(rep.wide_sandwich_flag);
}

TEST_CASE("kink exclusion narrower than the step is rejected") {
  const SandwichParams sp = select_parameters(kStd, 3.5);
  GridSpec grid;
  grid.exclusion = 0.001; // below step
  CHECK_THROWS_AS(verify_inequalities(kStd, 3.5, sp, grid), KinkTooClose);
}

TEST_CASE("sign suite over random parameters and speeds") {
  oracles::ParamGen gen(17u);
  std::mt19937 rng(99u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelParams p = gen.next();
    const auto ms = minimal_speed(p);
    const double c = ms.c_star * (1.05 + 1.95 * u(rng));
    const SandwichParams sp = select_parameters(p, c);
    GridSpec grid; // [-50, 50] step 0.01
    const InequalityReport rep = verify_inequalities(p, c, sp, grid);
    CHECK(rep.pass);
  }
}

TEST_CASE("pass status is stable under larger margins") {
  for (double margin : {1.01, 1.5, 3.0}) {
    const SandwichParams spm = select_parameters(kStd, 3.5, margin);
    GridSpec grid;
    const InequalityReport repm = verify_inequalities(kStd, 3.5, spm, grid);
    CHECK(repm.pass);
  }
}

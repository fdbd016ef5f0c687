#include "latwave/sandwich.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace latwave {

namespace {

// (A1) blocking function e^t + e^-t - 2 - c t - mu; negative on (0, theta_hat).
double a1_value(double c, double mu, double t) {
  return std::exp(t) + std::exp(-t) - 2.0 - c * t - mu;
}

double lower_phi_raw(const SandwichParams& sp, double xi) {
  return 1.0 - sp.rho * std::exp(sp.theta * xi);
}

double lower_psi_raw(const SandwichParams& sp, double xi) {
  return std::exp(sp.lambda1 * xi) - sp.q * std::exp(sp.eta * sp.lambda1 * xi);
}

} // namespace

SandwichParams select_parameters(const ModelParams& p, double c,
                                 double margin) {
  if (!(margin > 1.0))
    throw InvalidArgument("select_parameters: margin must exceed 1");
  const LambdaRoots roots = lambda_roots(p, c); // throws if c <= c*
  const double l1 = roots.lambda1;
  const double l2 = roots.lambda2;

  // theta_hat: unique positive root of the (A1) blocking function. It lies
  // beyond asinh(c/2), where the function starts increasing.
  auto g = [&](double t) { return a1_value(c, p.mu, t); };
  double hi = std::asinh(0.5 * c) + 1.0;
  int guard = 0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 200)
      throw SelectionFailed("select_parameters: theta_hat bracket failed");
  }
  const double theta_hat = detail::bisect(g, 1e-12, hi);

  SandwichParams sp;
  sp.c = c;
  sp.margin = margin;
  sp.lambda1 = l1;
  sp.lambda2 = l2;
  sp.theta = 0.5 * std::min(l1, theta_hat);
  const double a1 = a1_value(c, p.mu, sp.theta);
  sp.rho = margin * std::max(1.0, p.beta / (-a1));
  sp.xi1 = -std::log(sp.rho) / sp.theta;
  sp.eta = 1.0 + 0.5 * std::min(sp.theta / l1, l2 / l1 - 1.0);
  const double char_eta = char_psi(p, c, sp.eta * l1);
  if (!(char_eta < 0.0))
    throw SelectionFailed("select_parameters: char_psi(eta lambda1) >= 0");
  sp.q = margin * std::max(std::exp((1.0 - sp.eta) * l1 * sp.xi1),
                           p.beta * sp.rho / (-char_eta));
  sp.xi2 = -std::log(sp.q) / ((sp.eta - 1.0) * l1);

  // Re-check (A1)-(A4) and the kink ordering by direct evaluation.
  const bool a1_ok = sp.theta > 0.0 && sp.theta < l1 && a1 < 0.0;
  const bool a2_ok = sp.rho > std::max(1.0, p.beta / (-a1)) * (1.0 - 1e-14);
  const bool a3_ok = sp.eta > 1.0 &&
                     sp.eta < std::min(1.0 + sp.theta / l1, l2 / l1) &&
                     char_eta < 0.0;
  const bool a4_ok =
      sp.q > std::max(std::exp((1.0 - sp.eta) * l1 * sp.xi1),
                      p.beta * sp.rho / (-char_eta)) *
                 (1.0 - 1e-14);
  const bool order_ok = sp.xi2 < sp.xi1 && sp.xi1 < 0.0;
  if (!(a1_ok && a2_ok && a3_ok && a4_ok && order_ok))
    throw SelectionFailed(
        "select_parameters: invariant re-check failed (A1=" +
        std::to_string(a1_ok) + " A2=" + std::to_string(a2_ok) +
        " A3=" + std::to_string(a3_ok) + " A4=" + std::to_string(a4_ok) +
        " order=" + std::to_string(order_ok) + ")");
  return sp;
}

std::pair<double, double> eval_upper(const SandwichParams& sp, double xi) {
  return {1.0, std::exp(sp.lambda1 * xi)};
}

std::pair<double, double> eval_lower(const SandwichParams& sp, double xi) {
  const double phi = xi >= sp.xi1 ? 0.0 : std::max(0.0, lower_phi_raw(sp, xi));
  const double psi = xi >= sp.xi2 ? 0.0 : std::max(0.0, lower_psi_raw(sp, xi));
  return {phi, psi};
}

InequalityReport verify_inequalities(const ModelParams& p, double c,
                                     const SandwichParams& sp,
                                     const GridSpec& grid) {
  if (!(grid.exclusion >= grid.step))
    throw KinkTooClose(
        "verify_inequalities: kink exclusion radius must be >= one grid step");
  const double sign_slack = 1e-12;

  // Closed-form one-sided derivatives away from the kinks.
  auto upper_psi = [&](double xi) { return std::exp(sp.lambda1 * xi); };
  auto lower_phi = [&](double xi) { return eval_lower(sp, xi).first; };
  auto lower_psi = [&](double xi) { return eval_lower(sp, xi).second; };
  auto lower_phi_d = [&](double xi) {
    return xi < sp.xi1 ? -sp.rho * sp.theta * std::exp(sp.theta * xi) : 0.0;
  };
  auto lower_psi_d = [&](double xi) {
    if (xi >= sp.xi2) return 0.0;
    return sp.lambda1 * std::exp(sp.lambda1 * xi) -
           sp.q * sp.eta * sp.lambda1 * std::exp(sp.eta * sp.lambda1 * xi);
  };

  InequalityReport rep;
  rep.xi1 = sp.xi1;
  rep.xi2 = sp.xi2;
  rep.excluded_points = 0;
  rep.wide_sandwich_flag = sp.xi2 < -100.0;
  // worst_residual holds the extremal scaled residual: the maximum for the
  // <=0 conditions (i1, i3) and the minimum for the >=0 conditions (i2, i4).
  double worst_excess[4];
  for (int j = 0; j < 4; ++j) {
    rep.checks[j] = InequalityCheck{0.0, grid.lo, 0, true};
    worst_excess[j] = -std::numeric_limits<double>::infinity();
  }

  const long n = static_cast<long>(std::floor((grid.hi - grid.lo) / grid.step + 0.5)) + 1;
  for (long k = 0; k < n; ++k) {
    const double xi = grid.lo + k * grid.step;
    if (std::abs(xi - sp.xi1) < grid.exclusion ||
        std::abs(xi - sp.xi2) < grid.exclusion) {
      ++rep.excluded_points;
      continue;
    }
    const double scale = std::max(1.0, upper_psi(xi));

    const double pb = 1.0;                // upper phi
    const double qb = upper_psi(xi);      // upper psi
    const double pl = lower_phi(xi);
    const double ql = lower_psi(xi);

    // i1: D[phi_up] - c phi_up' + mu(1 - phi_up) - beta phi_up psi_low <= 0
    const double i1 = -p.beta * pb * ql; // difference and reaction terms vanish
    // i2: D[phi_low] - c phi_low' + mu(1 - phi_low) - beta phi_low psi_up >= 0
    const double i2 = (lower_phi(xi + 1.0) + lower_phi(xi - 1.0) - 2.0 * pl) -
                      c * lower_phi_d(xi) + p.mu * (1.0 - pl) -
                      p.beta * pl * qb;
    // i3: d D[psi_up] - c psi_up' - (mu+gamma) psi_up + beta phi_up psi_up <= 0
    const double i3 = p.d * (upper_psi(xi + 1.0) + upper_psi(xi - 1.0) -
                             2.0 * qb) -
                      c * sp.lambda1 * qb - (p.mu + p.gamma) * qb +
                      p.beta * pb * qb;
    // i4: d D[psi_low] - c psi_low' - (mu+gamma) psi_low + beta phi_low psi_low >= 0
    const double i4 = p.d * (lower_psi(xi + 1.0) + lower_psi(xi - 1.0) -
                             2.0 * ql) -
                      c * lower_psi_d(xi) - (p.mu + p.gamma) * ql +
                      p.beta * pl * ql;

    const double vals[4] = {i1 / scale, i2 / scale, i3 / scale, i4 / scale};
    // i1, i3 must be <= 0; i2, i4 must be >= 0. excess > 0 means violation.
    const double excess[4] = {vals[0], -vals[1], vals[2], -vals[3]};
    for (int j = 0; j < 4; ++j) {
      ++rep.checks[j].points_checked;
      if (excess[j] > worst_excess[j]) {
        worst_excess[j] = excess[j];
        rep.checks[j].worst_residual = vals[j];
        rep.checks[j].worst_location = xi;
      }
      if (excess[j] > sign_slack) rep.checks[j].pass = false;
    }
  }
  rep.pass = rep.checks[0].pass && rep.checks[1].pass && rep.checks[2].pass &&
             rep.checks[3].pass;
  return rep;
}

} // namespace latwave

#include "latwave/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace latwave {

namespace detail {

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter) {
  static const double frac = (3.0 - std::sqrt(5.0)) / 2.0;
  double x1 = a + frac * (b - a);
  double x2 = b - frac * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + frac * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = b - frac * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double xtol, int max_iter) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw ToleranceNotReached("bisect: endpoints do not bracket a sign change");
  for (int it = 0; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break; // floating point exhaustion
    double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if ((b - a) <= xtol) break;
  }
  return 0.5 * (a + b);
}

} // namespace detail

ModelParams validate_params(double mu, double beta, double gamma, double d) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw NonPositiveParameter(std::string(name) + " must be positive, got " +
                                 std::to_string(v));
  };
  positive(mu, "mu");
  positive(beta, "beta");
  positive(gamma, "gamma");
  positive(d, "d");
  if (!(beta > mu + gamma))
    throw SubcriticalTransmission(
        "sigma <= 1: requires beta > mu + gamma (beta=" + std::to_string(beta) +
        ", mu+gamma=" + std::to_string(mu + gamma) + ")");
  return ModelParams{mu, beta, gamma, d};
}

EndemicState endemic_state(const ModelParams& p) {
  const double sigma = p.sigma();
  return EndemicState{1.0 / sigma, (p.mu / p.beta) * (sigma - 1.0)};
}

double char_psi(const ModelParams& p, double c, double lambda) {
  return p.d * (std::exp(lambda) + std::exp(-lambda) - 2.0) - c * lambda +
         p.beta - p.mu - p.gamma;
}

double dispersion_quotient(const ModelParams& p, double lambda) {
  return (p.d * (std::exp(lambda) + std::exp(-lambda) - 2.0) + p.beta - p.mu -
          p.gamma) /
         lambda;
}

MinimalSpeed minimal_speed(const ModelParams& p, double tol) {
  if (!(tol > 0.0)) throw ToleranceNotReached("minimal_speed: tol must be > 0");
  auto q = [&p](double lam) { return dispersion_quotient(p, lam); };

  // Expand a doubling ladder until the quotient increases past the minimum.
  // The quotient tends to +inf at both ends of (0, inf) and is unimodal,
  // so [lo, hi] encloses the minimizer once q(hi) >= q(hi/2).
  const double lo = 1e-6;
  double m = 1.0;
  double hi = 2.0;
  double qm = q(m);
  double qhi = q(hi);
  int guard = 0;
  while (qhi < qm) {
    m = hi;
    qm = qhi;
    hi *= 2.0;
    qhi = q(hi);
    if (++guard > 60)
      throw ToleranceNotReached("minimal_speed: bracket expansion failed");
  }
  const double lambda_star =
      detail::golden_min(q, lo, hi, tol * (1.0 + std::abs(hi)) * 1e-2);
  const double c_star = q(lambda_star);

  // Post: the quotient at lambda_star*(1 +/- 10 tol) does not undercut c*.
  const double slack = 1e-12 * (1.0 + std::abs(c_star));
  if (q(lambda_star * (1.0 + 10.0 * tol)) < c_star - slack ||
      q(lambda_star * (1.0 - 10.0 * tol)) < c_star - slack)
    throw ToleranceNotReached("minimal_speed: minimizer check failed");
  return MinimalSpeed{c_star, lambda_star};
}

LambdaRoots lambda_roots(const ModelParams& p, double c, double tol) {
  const MinimalSpeed ms = minimal_speed(p);
  if (!(c > ms.c_star + tol))
    throw SpeedNotSupercritical("lambda_roots: need c > c_star (c=" +
                                std::to_string(c) +
                                ", c_star=" + std::to_string(ms.c_star) + ")");
  auto f = [&](double lam) { return char_psi(p, c, lam); };
  // char_psi > 0 near 0+ (value beta-mu-gamma) and < 0 at lambda_star.
  const double lambda1 = detail::bisect(f, 1e-12, ms.lambda_star);
  double hi = ms.lambda_star;
  int guard = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 200)
      throw ToleranceNotReached("lambda_roots: upper bracket failed");
  }
  const double lambda2 = detail::bisect(f, ms.lambda_star, hi);

  const double scale = tol * (1.0 + std::abs(c));
  if (std::abs(f(lambda1)) > scale || std::abs(f(lambda2)) > scale)
    throw ToleranceNotReached("lambda_roots: residual above tolerance");
  return LambdaRoots{lambda1, lambda2};
}

OmegaRoots omega_roots(const ModelParams& p, double c, double tol) {
  if (!(c > 0.0)) throw NonPositiveParameter("omega_roots: c must be > 0");
  auto g = [&](double w) {
    return p.d * (std::exp(w) + std::exp(-w) - 2.0) - c * w - p.mu - p.gamma;
  };
  // g(0) = -(mu+gamma) < 0; the exponential dominates both ways out.
  double hi = 1.0;
  int guard = 0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw ToleranceNotReached("omega_roots: plus bracket");
  }
  double lo = -1.0;
  guard = 0;
  while (g(lo) < 0.0) {
    lo *= 2.0;
    if (++guard > 200) throw ToleranceNotReached("omega_roots: minus bracket");
  }
  const double omega_plus = detail::bisect(g, 0.0, hi);
  const double omega_minus = detail::bisect(g, lo, 0.0);
  const double scale = tol * (1.0 + std::abs(c));
  if (std::abs(g(omega_plus)) > scale || std::abs(g(omega_minus)) > scale)
    throw ToleranceNotReached("omega_roots: residual above tolerance");
  return OmegaRoots{omega_minus, omega_plus};
}

Dispersion analyze_dispersion(const ModelParams& p, double tol) {
  const EndemicState eq = endemic_state(p);
  const MinimalSpeed ms = minimal_speed(p, tol);
  Dispersion out;
  out.sigma = p.sigma();
  out.s_star = eq.s_star;
  out.e_star = eq.e_star;
  out.c_star = ms.c_star;
  out.lambda_star = ms.lambda_star;
  return out;
}

Dispersion analyze_dispersion(const ModelParams& p, double speed, double tol) {
  Dispersion out = analyze_dispersion(p, tol);
  const LambdaRoots roots = lambda_roots(p, speed);
  out.speed = speed;
  out.lambda1 = roots.lambda1;
  out.lambda2 = roots.lambda2;
  return out;
}

NonexistenceCertificate certify_nonexistence(const ModelParams& p, double c) {
  const MinimalSpeed ms = minimal_speed(p);
  // Beyond this cap the exponential term dominates c*lambda, so the global
  // minimum over lambda > 0 lies inside (0, cap].
  const double cap = std::max(10.0, 3.0 * (std::abs(c) + p.beta) / p.d);
  const double step = 1e-4;
  double best = std::numeric_limits<double>::infinity();
  double best_lam = step;
  for (double lam = step; lam <= cap; lam += step) {
    const double v = char_psi(p, c, lam);
    if (v < best) {
      best = v;
      best_lam = lam;
    }
  }
  const double a = std::max(1e-12, best_lam - step);
  const double b = std::min(cap, best_lam + step);
  const double lam_ref = detail::golden_min(
      [&](double lam) { return char_psi(p, c, lam); }, a, b, 1e-13);
  const double v_ref = char_psi(p, c, lam_ref);
  if (v_ref < best) {
    best = v_ref;
    best_lam = lam_ref;
  }
  NonexistenceCertificate cert;
  cert.c = c;
  cert.c_star = ms.c_star;
  cert.min_char_value = best;
  cert.argmin_lambda = best_lam;
  cert.certified = (best > 0.0) && (c < ms.c_star);
  return cert;
}

} // namespace latwave

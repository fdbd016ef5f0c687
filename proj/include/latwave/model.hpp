#ifndef LATWAVE_MODEL_HPP
#define LATWAVE_MODEL_HPP

#include <functional>
#include <optional>

#include "latwave/errors.hpp"

namespace latwave {

/// Epidemic/migration constants of the lattice SIR model. The susceptible
/// migration coefficient is normalized to 1; `d` is the infective one.
/// Valid instances satisfy mu, beta, gamma, d > 0 and sigma = beta/(mu+gamma) > 1.
struct ModelParams {
  double mu;
  double beta;
  double gamma;
  double d;

  double sigma() const { return beta / (mu + gamma); }
};

/// Validates raw constants, throws NonPositiveParameter or
/// SubcriticalTransmission (sigma <= 1).
ModelParams validate_params(double mu, double beta, double gamma, double d);

/// Endemic equilibrium (s*, e*) = (1/sigma, (mu/beta)(sigma - 1)).
struct EndemicState {
  double s_star;
  double e_star;
};

EndemicState endemic_state(const ModelParams& p);

/// Characteristic function of the infective tail,
///   d (e^lambda + e^-lambda - 2) - c lambda + beta - mu - gamma,
/// evaluated as written. Negative on (lambda1, lambda2) when c > c*.
double char_psi(const ModelParams& p, double c, double lambda);

/// Linear-spreading quotient whose infimum over lambda > 0 defines c*.
double dispersion_quotient(const ModelParams& p, double lambda);

struct MinimalSpeed {
  double c_star;
  double lambda_star;
};

/// Minimizes the dispersion quotient by bracket expansion plus golden-section
/// search. Throws ToleranceNotReached if the bracket cannot be isolated.
MinimalSpeed minimal_speed(const ModelParams& p, double tol = 1e-8);

struct LambdaRoots {
  double lambda1;
  double lambda2;
};

/// Both positive roots of char_psi(., c) for c > c*. Bisection splits at
/// lambda_star; throws SpeedNotSupercritical when c <= c* + tol.
LambdaRoots lambda_roots(const ModelParams& p, double c, double tol = 1e-10);

struct OmegaRoots {
  double omega_minus;
  double omega_plus;
};

/// Roots of d (e^w + e^-w - 2) = c w + mu + gamma, one negative and one
/// positive for any c > 0 (tail diagnostics behind the front).
OmegaRoots omega_roots(const ModelParams& p, double c, double tol = 1e-10);

/// Dispersion summary: sigma, endemic state, minimal speed, and optionally
/// the characteristic roots attached for a supercritical speed.
struct Dispersion {
  double sigma;
  double s_star;
  double e_star;
  double c_star;
  double lambda_star;
  std::optional<double> speed;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
};

Dispersion analyze_dispersion(const ModelParams& p, double tol = 1e-8);
Dispersion analyze_dispersion(const ModelParams& p, double speed, double tol);

/// Computable content of the non-existence direction: for c < c*, the
/// characteristic function has no positive root, so its global minimum over
/// lambda > 0 is positive.
struct NonexistenceCertificate {
  double c;
  double c_star;
  double min_char_value;
  double argmin_lambda;
  bool certified;
};

NonexistenceCertificate certify_nonexistence(const ModelParams& p, double c);

namespace detail {

/// Golden-section minimization on a bracketed interval [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter = 400);

/// Bisection on [a, b] with f(a), f(b) of opposite sign; runs to floating
/// point exhaustion or xtol, whichever first.
double bisect(const std::function<double(double)>& f, double a, double b,
              double xtol = 0.0, int max_iter = 400);

} // namespace detail

} // namespace latwave

#endif

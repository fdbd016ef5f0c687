#ifndef LATWAVE_SANDWICH_HPP
#define LATWAVE_SANDWICH_HPP

#include <array>
#include <utility>

#include "latwave/model.hpp"

namespace latwave {

/// Constants of the comparison-function quadruple
///   upper:  phi = 1,                    psi = e^{lambda1 xi}
///   lower:  phi = max(0, 1 - rho e^{theta xi}),
///           psi = max(0, e^{lambda1 xi} - q e^{eta lambda1 xi}),
/// selected in sequence so that the four one-sided differential inequalities
/// hold. Kinks sit at xi1 = -ln(rho)/theta and xi2 = -ln(q)/((eta-1) lambda1)
/// with xi2 < xi1 < 0.
struct SandwichParams {
  double theta;
  double rho;
  double eta;
  double q;
  double xi1;
  double xi2;
  double lambda1;
  double lambda2;
  double c;
  double margin;
};

/// Deterministic selection:
///   theta = min(lambda1, theta_hat)/2 with theta_hat the positive root of
///           e^t + e^-t - 2 - c t - mu,
///   rho   = margin * max{1, beta / -(e^theta+e^-theta-2-c theta-mu)},
///   eta   = midpoint rule 1 + (1/2) min{theta/lambda1, lambda2/lambda1 - 1},
///   q     = margin * max{e^{(1-eta) lambda1 xi1}, beta rho / -char(eta lambda1)}.
/// Re-checks every invariant after selection; throws SelectionFailed if any
/// fails, SpeedNotSupercritical if c <= c*.
SandwichParams select_parameters(const ModelParams& p, double c,
                                 double margin = 1.01);

/// Upper pair (1, e^{lambda1 xi}).
std::pair<double, double> eval_upper(const SandwichParams& sp, double xi);

/// Lower pair with exact kinks at xi1, xi2.
std::pair<double, double> eval_lower(const SandwichParams& sp, double xi);

/// Finite verification grid; points within `exclusion` of a kink are skipped
/// (the inequalities are only required away from the kinks).
struct GridSpec {
  double lo = -50.0;
  double hi = 50.0;
  double step = 0.01;
  double exclusion = 0.01;
};

struct InequalityCheck {
  double worst_residual;     // scaled by max(1, e^{lambda1 xi})
  double worst_location;
  long points_checked;
  bool pass;
};

/// Report of the four sign conditions. Residuals are scaled by
/// max(1, e^{lambda1 xi}) so the exact-identity case (i3) stays meaningful
/// where the upper psi is exponentially large. Sign slack is 1e-12.
struct InequalityReport {
  std::array<InequalityCheck, 4> checks; // i1..i4
  double xi1;
  double xi2;
  long excluded_points;
  bool pass;
  bool wide_sandwich_flag; // xi2 < -100: sandwich too wide to be useful
};

/// Evaluates the four inequalities with closed-form derivatives and exact
/// unit shifts at every grid point. Sign conventions: i1, i3 require
/// residual <= 0; i2, i4 require residual >= 0.
InequalityReport verify_inequalities(const ModelParams& p, double c,
                                     const SandwichParams& sp,
                                     const GridSpec& grid);

} // namespace latwave

#endif

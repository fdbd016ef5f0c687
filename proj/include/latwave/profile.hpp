#ifndef LATWAVE_PROFILE_HPP
#define LATWAVE_PROFILE_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "latwave/model.hpp"
#include "latwave/sandwich.hpp"

namespace latwave {

using Eigen::ArrayXd;

/// Uniform grid on [-l, l] with step h = 1/m, so the +-1 shifts of the wave
/// system map node-to-node (offset +-m).
struct Grid {
  double l;
  int m;
  long segments; // 2 l m

  static Grid make(double l, int m);

  double h() const { return 1.0 / m; }
  long size() const { return segments + 1; }
  double xi(long j) const { return -l + j * h(); }
};

/// Discretized wave profile pair with the truncation extension rules of the
/// boundary value problem: the upper solution pair to the left of -l and
/// constant continuation to the right of l.
struct Profile {
  Grid grid;
  ArrayXd phi;
  ArrayXd psi;
  double left_decay; // tail exponent lambda1 of the left extension of psi

  double phi_at(long j) const {
    if (j < 0) return 1.0;
    if (j >= grid.size()) return phi[grid.size() - 1];
    return phi[j];
  }
  double psi_at(long j) const {
    if (j < 0) return std::exp(left_decay * grid.xi(j));
    if (j >= grid.size()) return psi[grid.size() - 1];
    return psi[j];
  }
  /// Linear interpolation in xi, extension-aware.
  double interp_phi(double x) const;
  double interp_psi(double x) const;
};

struct TruncatedProblem {
  ModelParams params;
  double c;
  SandwichParams sp;
  Grid grid;
  double alpha;        // > max{2 + mu + beta e^{lambda1 l}, 2d + mu + gamma}
  double alpha_margin;
};

/// Validates l > -xi2 and grid integrality, then fixes
/// alpha = alpha_margin * max{2 + mu + beta e^{lambda1 l}, 2d + mu + gamma}.
TruncatedProblem build_problem(const ModelParams& p, double c,
                               const SandwichParams& sp, double l, int m,
                               double alpha_margin = 1.01);

/// Reaction-shift operators with the weight alpha folded in:
///   H1 = alpha phi + D[phi] + mu (1 - phi) - beta phi psi
///   H2 = alpha psi + d D[psi] - (mu+gamma) psi + beta phi psi
/// evaluated node-exactly with the extension rules.
std::pair<ArrayXd, ArrayXd> apply_H(const TruncatedProblem& problem,
                                    const Profile& prof);

/// Exponentially weighted integral operator: solves c u' + alpha u = H_i
/// from the left boundary data by exact variation of constants with H
/// interpolated piecewise-quadratically per cell (robust for any alpha h / c).
/// If the input lies inside the comparison sandwich, the output is required
/// to stay inside up to 10 h^2 per unit value, else SandwichViolation.
Profile apply_F(const TruncatedProblem& problem, const Profile& prof);

struct SolveReport {
  long iterations = 0;
  double final_gap = 0.0;             // sup distance of successive iterates at stop
  double fixed_point_residual = 0.0;  // ||apply_F(prof) - prof||_sup
  double ode_residual = 0.0;          // centered-difference residual of the wave system
  bool converged = false;
  double wall_seconds = 0.0;
  // bracketing (ordered coupled sweeps) stage
  long bracket_sweeps = 0;
  double bracket_gap = 0.0;           // upper-lower sup gap when bracketing stopped
  double ordering_violation = 0.0;    // worst scaled ordering violation observed
  double containment_violation = 0.0; // worst scaled sandwich-containment violation
};

/// Coupled ordered iteration from the sandwich bounds (mixed quasi-monotone
/// update order), followed by a damped fixed-point stage on the midpoint that
/// drives the iterates to a fixed point of the integral operator. Ordering of
/// the coupled stage is asserted to 10 eps scale. Throws MaxIterExceeded /
/// MonotonicityBroken / SandwichViolation.
std::pair<Profile, SolveReport> monotone_iterate(const TruncatedProblem& problem,
                                                 double tol = 1e-6,
                                                 long max_iter = 5000);

struct TailDiagnostics {
  double harnack_max_ratio;
  double harnack_bound; // C(M) = max{e^M, 2M(2M e^M - 1)}
  double harnack_M;
  bool harnack_ok;
  double fitted_left_decay;
  double lambda1;
  double left_decay_rel_err;
  double logderiv_left;
  double logderiv_right;
  double sup_psi;
};

struct EndpointDiagnostics {
  double window;
  double phi_min, phi_max, psi_min, psi_max; // over [l - window, l]
  bool phi_bracket_ok; // min <= s* <= max with 5% slack
  bool psi_bracket_ok;
  double trailing_variation_phi;
  double trailing_variation_psi;
  double endpoint_phi, endpoint_psi;
  double endpoint_rel_err; // vs (s*, e*)
  bool endpoint_near_endemic;
  double epsilon_hat; // largest eps with psi <= eps => psi' > 0 (centered)
};

struct WaveProfile {
  Profile profile;
  double c;
  SandwichParams sp;
  SolveReport report;
  TailDiagnostics tail;
  EndpointDiagnostics endpoint;
};

TailDiagnostics tail_diagnostics(const Profile& prof, const ModelParams& p,
                                 double c, const SandwichParams& sp);

EndpointDiagnostics endpoint_diagnostics(const Profile& prof,
                                         const ModelParams& p,
                                         double window = 10.0,
                                         double flat_tol = 0.02);

/// Full pipeline: select_parameters -> build_problem -> monotone_iterate ->
/// diagnostics.
WaveProfile solve_wave(const ModelParams& p, double c, double l, int m,
                       double tol = 1e-6, long max_iter = 5000,
                       double margin = 1.01);

struct MinimalWaveResult {
  WaveProfile wave;      // solve at the last (smallest) delta
  double c_star;
  std::vector<double> deltas;
  std::vector<double> speeds;
  std::vector<double> shifts;     // normalization shift per solve
  std::vector<double> distances;  // successive shifted sup-distances
  double epsilon_hat;
  double window;
  bool cauchy;
};

/// Minimal-speed wave by a decreasing supercritical speed sequence
/// c_k = c* (1 + delta_k); profiles are shifted so psi(0) = epsilon_hat and
/// compared in sup norm on [-window, window]. Throws SequenceNotCauchy if the
/// distances fail to decrease below cauchy_tol (default 0.05 e*).
MinimalWaveResult solve_minimal_wave(
    const ModelParams& p, double l, int m, double tol = 1e-6,
    const std::vector<double>& deltas = {0.1, 0.05, 0.025, 0.0125},
    double window = 20.0, double cauchy_tol = -1.0, long max_iter = 5000);

/// Centered-difference residual of the wave system on interior nodes.
double ode_residual_sup(const ModelParams& p, double c, const Profile& prof);

} // namespace latwave

#endif

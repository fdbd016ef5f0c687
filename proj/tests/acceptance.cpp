// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Tolerances and thresholds are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "latwave/lattice.hpp"
#include "latwave/model.hpp"
#include "latwave/profile.hpp"
#include "latwave/sandwich.hpp"
#include "oracles.hpp"

using namespace latwave;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(int idx, const char* name, bool pass, const std::string& detail,
            double secs, double budget) {
  const bool ok = pass && secs < budget;
  if (!ok) ++failures;
  std::printf("[%s] criterion %d: %s  (%s; %.2fs, budget %.0fs)\n",
              ok ? "PASS" : "FAIL", idx, name, detail.c_str(), secs, budget);
  std::fflush(stdout);
}

std::vector<ModelParams> parameter_sets() {
  std::vector<ModelParams> sets;
  sets.push_back(validate_params(0.5, 3.0, 0.5, 1.0)); // standard
  oracles::ParamGen gen(20250808u);
  for (int k = 0; k < 5; ++k) sets.push_back(gen.next());
  return sets;
}

void criterion_1_dispersion() {
  Timer timer;
  bool pass = true;
  std::string detail;
  const auto sets = parameter_sets();
  double worst_rel = 0.0;
  for (const ModelParams& p : sets) {
    const auto ms = minimal_speed(p);
    const auto orc = oracles::minimal_speed_grid(p, 1e-6, 8.0, 1e-5);
    worst_rel = std::max(worst_rel,
                         std::abs(ms.c_star - orc.c_star) / orc.c_star);
  }
  pass = pass && worst_rel <= 1e-8;
  // standard set against the dense 1e-6 scan
  const auto ms0 = minimal_speed(sets[0]);
  const auto dense = oracles::minimal_speed_grid(sets[0], 1e-6, 4.0, 1e-6);
  pass = pass && std::abs(ms0.c_star - dense.c_star) <= 1e-8 * dense.c_star;
  pass = pass && std::abs(ms0.c_star - 3.0178) <= 1e-3;
  detail = "worst oracle rel err " + std::to_string(worst_rel) +
           ", standard c* = " + std::to_string(ms0.c_star);
  report(1, "dispersion correctness", pass, detail, timer.seconds(), 1.0);
}

void criterion_2_roots() {
  Timer timer;
  bool pass = true;
  double worst = 0.0;
  const auto sets = parameter_sets();
  for (const ModelParams& p : sets) {
    const auto ms = minimal_speed(p);
    for (double f : {1.1, 1.5, 2.0}) {
      const double c = f * ms.c_star;
      const auto lr = lambda_roots(p, c);
      const double bound = 1e-10 * (1.0 + c);
      worst = std::max({worst, std::abs(char_psi(p, c, lr.lambda1)) / bound,
                        std::abs(char_psi(p, c, lr.lambda2)) / bound});
      if (std::abs(char_psi(p, c, lr.lambda1)) > bound) pass = false;
      if (std::abs(char_psi(p, c, lr.lambda2)) > bound) pass = false;
      if (!(char_psi(p, c, 0.5 * (lr.lambda1 + lr.lambda2)) < 0.0)) pass = false;
    }
  }
  report(2, "characteristic roots", pass,
         "worst residual/bound " + std::to_string(worst), timer.seconds(), 1.0);
}

void criterion_3_sandwich() {
  Timer timer;
  bool pass = true;
  double worst_i3 = 0.0;
  const auto sets = parameter_sets();
  for (const ModelParams& p : sets) {
    const auto ms = minimal_speed(p);
    for (double f : {1.1, 1.5, 2.0}) {
      const double c = f * ms.c_star;
      const SandwichParams sp = select_parameters(p, c);
      GridSpec grid; // [-50, 50], step 0.01, kink exclusion one step
      const InequalityReport rep = verify_inequalities(p, c, sp, grid);
      if (!rep.pass) pass = false;
      // independent absolute check of the exact identity (i3), scaled per
      // unit value of the upper psi
      for (double xi = -50.0; xi <= 50.0; xi += 0.01) {
        const double e = std::exp(sp.lambda1 * xi);
        const double i3 =
            p.d * (std::exp(sp.lambda1 * (xi + 1.0)) +
                   std::exp(sp.lambda1 * (xi - 1.0)) - 2.0 * e) -
            c * sp.lambda1 * e - (p.mu + p.gamma) * e + p.beta * e;
        worst_i3 = std::max(worst_i3, std::abs(i3) / std::max(1.0, e));
      }
    }
  }
  pass = pass && worst_i3 <= 1e-12;
  report(3, "sandwich sign suite", pass,
         "worst |i3| " + std::to_string(worst_i3), timer.seconds(), 5.0);
}

WaveProfile criterion_4_solver(const ModelParams& std_params) {
  Timer timer;
  bool pass = true;
  std::string detail;
  WaveProfile wp = solve_wave(std_params, 3.5, 40.0, 20, 1e-6, 5000);
  const SolveReport& r = wp.report;
  pass = pass && r.converged && r.iterations <= 5000;
  pass = pass && r.ordering_violation <=
                     10.0 * std::numeric_limits<double>::epsilon();
  pass = pass && r.ode_residual <= 5e-3;
  const WaveProfile fine = solve_wave(std_params, 3.5, 40.0, 40, 1e-6, 5000);
  const double factor = r.ode_residual / fine.report.ode_residual;
  pass = pass && factor >= 2.8;
  detail = "iters " + std::to_string(r.iterations) + ", ode residual " +
           std::to_string(r.ode_residual) + ", refinement factor " +
           std::to_string(factor);
  report(4, "monotone solver convergence", pass, detail, timer.seconds(), 60.0);
  return wp;
}

void criterion_5_structure(const WaveProfile& wp) {
  Timer timer;
  bool pass = true;
  const Profile& prof = wp.profile;
  for (long j = 1; j + 1 < prof.grid.size(); ++j) {
    if (!(prof.phi[j] > 0.0 && prof.phi[j] < 1.0 && prof.psi[j] > 0.0)) {
      pass = false;
      break;
    }
  }
  pass = pass && wp.tail.left_decay_rel_err <= 0.02;
  pass = pass && wp.tail.harnack_max_ratio <= wp.tail.harnack_bound;
  pass = pass && wp.endpoint.phi_bracket_ok && wp.endpoint.psi_bracket_ok;
  const std::string detail =
      "decay rel err " + std::to_string(wp.tail.left_decay_rel_err) +
      ", harnack " + std::to_string(wp.tail.harnack_max_ratio) + " <= " +
      std::to_string(wp.tail.harnack_bound);
  report(5, "profile structure", pass, detail, timer.seconds(), 60.0);
}

void criterion_6_minimal(const ModelParams& p) {
  Timer timer;
  bool pass = true;
  std::string detail;
  try {
    const auto res = solve_minimal_wave(p, 40.0, 20, 1e-6);
    for (std::size_t k = 1; k < res.distances.size(); ++k)
      if (!(res.distances[k] < res.distances[k - 1])) pass = false;
    const double bound = 0.05 * endemic_state(p).e_star;
    pass = pass && !res.distances.empty() && res.distances.back() <= bound;
    detail = "distances";
    for (double d : res.distances) detail += " " + std::to_string(d);
    detail += " (bound " + std::to_string(bound) + ")";
  } catch (const Error& e) {
    pass = false;
    detail = e.what();
  }
  report(6, "minimal-speed wave sequence", pass, detail, timer.seconds(), 300.0);
}

void criterion_7_simulation(const ModelParams& p) {
  Timer timer;
  bool pass = true;
  std::string detail;
  const EndemicState eq = endemic_state(p);
  const auto ms = minimal_speed(p);
  try {
    LatticeState st = init_state(1500, LeftBlock{eq.e_star, 100});
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.T = 300.0;
    cfg.record_stride = 100;
    const auto recs = integrate(p, st, cfg);
    const auto ft = track_front(recs, eq.e_star / 2.0);
    const double rel = std::abs(ft.fitted_speed - ms.c_star) / ms.c_star;
    pass = pass && rel <= 0.05;
    // no-slower-wave consistency: the measured spread is never below 0.95 c*
    pass = pass && ft.fitted_speed >= 0.95 * ms.c_star;
    detail = "front speed " + std::to_string(ft.fitted_speed) + " vs c* " +
             std::to_string(ms.c_star) + " (rel " + std::to_string(rel) + ")";
  } catch (const Error& e) {
    pass = false;
    detail = e.what();
  }

  // equilibrium drift over T = 100
  LatticeState st;
  st.N = 50;
  st.s = ArrayXd::Constant(101, eq.s_star);
  st.i = ArrayXd::Constant(101, eq.e_star);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 100.0;
  cfg.record_stride = 1000;
  const auto recs = integrate(p, st, cfg);
  double drift = 0.0;
  for (const auto& r : recs) {
    drift = std::max(drift, (r.s - eq.s_star).abs().maxCoeff());
    drift = std::max(drift, (r.i - eq.e_star).abs().maxCoeff());
  }
  pass = pass && drift <= 1e-12;
  detail += ", eq drift " + std::to_string(drift);
  report(7, "simulation vs dispersion", pass, detail, timer.seconds(), 180.0);
}

void criterion_8_transport(const ModelParams& p, const WaveProfile& wp) {
  Timer timer;
  bool pass = true;
  std::string detail;
  try {
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.T = 50.0;
    cfg.record_stride = 100;
    const ShapeCheck sc = wave_shape_check(p, wp.profile, 3.5, 1200, cfg);
    const double bound = 0.05 * endemic_state(p).e_star;
    pass = sc.drift_rel_err <= 0.05 && sc.max_distance <= bound;
    detail = "drift " + std::to_string(sc.drift_rate) + " (rel err " +
             std::to_string(sc.drift_rel_err) + "), shape distance " +
             std::to_string(sc.max_distance);
  } catch (const Error& e) {
    pass = false;
    detail = e.what();
  }
  report(8, "wave transport", pass, detail, timer.seconds(), 120.0);
}

void criterion_9_certificate(const ModelParams& p) {
  Timer timer;
  bool pass = true;
  const auto ms = minimal_speed(p);
  for (double f : {0.5, 0.8, 0.95})
    if (!certify_nonexistence(p, f * ms.c_star).certified) pass = false;
  for (double f : {1.0, 1.05})
    if (certify_nonexistence(p, f * ms.c_star).certified) pass = false;

  // the certification flips exactly once, within one step of c*
  const double step = 0.01 * ms.c_star;
  double last_true = 0.0, first_false = 0.0;
  int flips = 0;
  bool prev = true;
  for (double c = 0.5 * ms.c_star; c <= 1.06 * ms.c_star; c += step) {
    const bool cert = certify_nonexistence(p, c).certified;
    if (cert) last_true = c;
    if (!cert && first_false == 0.0) first_false = c;
    if (cert != prev) ++flips;
    prev = cert;
  }
  pass = pass && flips == 1;
  pass = pass && std::abs(last_true - ms.c_star) <= step * 1.0001 + 1e-12;
  pass = pass && first_false >= ms.c_star - 1e-12;
  const std::string detail = "flip between " + std::to_string(last_true) +
                             " and " + std::to_string(first_false) + ", c* " +
                             std::to_string(ms.c_star);
  report(9, "non-existence certificate", pass, detail, timer.seconds(), 2.0);
}

} // namespace

int main() {
  const ModelParams std_params = validate_params(0.5, 3.0, 0.5, 1.0);
  criterion_1_dispersion();
  criterion_2_roots();
  criterion_3_sandwich();
  const WaveProfile wp = criterion_4_solver(std_params);
  criterion_5_structure(wp);
  criterion_6_minimal(std_params);
  criterion_7_simulation(std_params);
  criterion_8_transport(std_params, wp);
  criterion_9_certificate(std_params);
  if (failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}

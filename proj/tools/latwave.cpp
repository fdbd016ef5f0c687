// latwave: dispersion analysis, comparison-function verification, wave-profile
// solving, lattice simulation, and non-existence certification for the
// two-component epidemic lattice model.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "latwave/lattice.hpp"
#include "latwave/model.hpp"
#include "latwave/profile.hpp"
#include "latwave/report.hpp"
#include "latwave/sandwich.hpp"

namespace fs = std::filesystem;
using namespace latwave;

namespace {

struct Options {
  double mu = 0.5;
  double beta = 3.0;
  double gamma = 0.5;
  double d = 1.0;
  std::string speed;      // value, or comma list for certify
  bool minimal = false;
  double l = 40.0;
  int m = 20;
  double tol = 1e-6;
  double margin = 1.01;
  long N = 1500;
  double dt = 0.01;
  double T = 300.0;
  double level = -1.0;    // < 0: use e*/2
  std::string from_profile;
  bool check_shape = false;
  std::string out = "out";
  std::string config;
  std::string format = "both";
  bool simulate = false;  // sweep only
  // sweep grids reuse the parameter flag names as comma lists
  std::string mu_list = "0.5";
  std::string beta_list = "3";
  std::string gamma_list = "0.5";
  std::string d_list = "1";
};

// Registered flags of the active subcommand: flat config key (long flag name
// without dashes) -> CLI option and a setter into Options.
struct Binding {
  CLI::Option* opt;
  std::function<void(Options&, const std::string&)> set;
};
using Bindings = std::map<std::string, Binding>;

// The bind_* helpers capture the Options field by reference; the instance
// lives for the whole of main().
void bind_double(Bindings& b, CLI::App* cmd, const char* flag, double& field,
                 const char* help) {
  CLI::Option* opt = cmd->add_option(flag, field, help);
  std::string key;
  for (const char* ch = flag; *ch; ++ch)
    if (*ch != '-') key += *ch;
  b[key] = {opt, [&field](Options&, const std::string& v) { field = std::stod(v); }};
}

void bind_long(Bindings& b, CLI::App* cmd, const char* flag, long& field,
               const char* help) {
  CLI::Option* opt = cmd->add_option(flag, field, help);
  std::string key;
  for (const char* ch = flag; *ch; ++ch)
    if (*ch != '-') key += *ch;
  b[key] = {opt, [&field](Options&, const std::string& v) { field = std::stol(v); }};
}

void bind_int(Bindings& b, CLI::App* cmd, const char* flag, int& field,
              const char* help) {
  CLI::Option* opt = cmd->add_option(flag, field, help);
  std::string key;
  for (const char* ch = flag; *ch; ++ch)
    if (*ch != '-') key += *ch;
  b[key] = {opt, [&field](Options&, const std::string& v) { field = std::stoi(v); }};
}

void bind_string(Bindings& b, CLI::App* cmd, const char* flag,
                 std::string& field, const char* help) {
  CLI::Option* opt = cmd->add_option(flag, field, help);
  std::string key;
  for (const char* ch = flag; *ch; ++ch)
    if (*ch != '-') key += *ch;
  b[key] = {opt, [&field](Options&, const std::string& v) { field = v; }};
}

void bind_flag(Bindings& b, CLI::App* cmd, const char* flag, bool& field,
               const char* help) {
  CLI::Option* opt = cmd->add_flag(flag, field, help);
  std::string key;
  for (const char* ch = flag; *ch; ++ch)
    if (*ch != '-') key += *ch;
  b[key] = {opt, [&field](Options&, const std::string& v) {
              if (v == "true" || v == "1")
                field = true;
              else if (v == "false" || v == "0")
                field = false;
              else
                throw InvalidArgument("config: bad boolean value '" + v + "'");
            }};
}

// Precedence: CLI flags override config-file values override defaults.
// Unknown config keys are rejected.
void apply_config(Options& o, const Bindings& bindings) {
  if (o.config.empty()) return;
  const auto kv = parse_config_file(o.config);
  for (const auto& [key, value] : kv) {
    if (key == "config")
      throw InvalidArgument("config file may not set 'config'");
    const auto it = bindings.find(key);
    if (it == bindings.end())
      throw InvalidArgument("config file: unknown key '" + key + "'");
    if (it->second.opt->count() > 0) continue; // explicit flag wins
    it->second.set(o, value);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

bool want_json(const Options& o) { return o.format != "csv"; }
bool want_csv(const Options& o) { return o.format != "json"; }

void ensure_outdir(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create output directory: " + o.out);
}

ModelParams params_of(const Options& o) {
  return validate_params(o.mu, o.beta, o.gamma, o.d);
}

int cmd_dispersion(const Options& o) {
  const ModelParams p = params_of(o);
  Dispersion disp;
  if (!o.speed.empty())
    disp = analyze_dispersion(p, std::stod(o.speed), 1e-8);
  else
    disp = analyze_dispersion(p, 1e-8);
  const Json j = to_json(disp);
  std::printf("sigma = %.6g, (s*, e*) = (%.6g, %.6g)\n", disp.sigma,
              disp.s_star, disp.e_star);
  std::printf("c* = %.10g at lambda* = %.10g\n", disp.c_star, disp.lambda_star);
  if (disp.lambda1)
    std::printf("c = %.6g: lambda1 = %.10g, lambda2 = %.10g\n", *disp.speed,
                *disp.lambda1, *disp.lambda2);
  std::cout << j.dump() << "\n";
  if (want_json(o)) {
    ensure_outdir(o);
    write_text_file(o.out + "/dispersion.json", j.dump() + "\n");
  }
  return 0;
}

int cmd_sandwich(const Options& o) {
  const ModelParams p = params_of(o);
  if (o.speed.empty()) throw InvalidArgument("sandwich: --speed is required");
  const double c = std::stod(o.speed);
  const SandwichParams sp = select_parameters(p, c, o.margin);
  GridSpec grid;
  const InequalityReport rep = verify_inequalities(p, c, sp, grid);
  Json j = Json::object();
  j.set("sandwich", to_json(sp));
  j.set("report", to_json(rep));
  std::printf("xi1 = %.6g, xi2 = %.6g (xi2 < xi1 < 0)\n", sp.xi1, sp.xi2);
  std::printf("inequalities %s\n", rep.pass ? "pass" : "FAIL");
  std::cout << j.dump() << "\n";
  if (want_json(o)) {
    ensure_outdir(o);
    write_text_file(o.out + "/sandwich.json", j.dump() + "\n");
  }
  return rep.pass ? 0 : 2;
}

int cmd_solve(const Options& o) {
  const ModelParams p = params_of(o);
  if (!o.minimal && o.speed.empty())
    throw InvalidArgument("solve: one of --speed or --minimal is required");
  if (o.minimal && !o.speed.empty())
    throw InvalidArgument("solve: --speed and --minimal are exclusive");
  ensure_outdir(o);

  if (o.minimal) {
    const MinimalWaveResult res = solve_minimal_wave(p, o.l, o.m, o.tol);
    Json seq = Json::object();
    seq.set("c_star", res.c_star).set("epsilon_hat", res.epsilon_hat);
    Json deltas = Json::array(), speeds = Json::array(), shifts = Json::array(),
         dists = Json::array();
    for (double v : res.deltas) deltas.push(v);
    for (double v : res.speeds) speeds.push(v);
    for (double v : res.shifts) shifts.push(v);
    for (double v : res.distances) dists.push(v);
    seq.set("deltas", deltas)
        .set("speeds", speeds)
        .set("shifts", shifts)
        .set("cauchy_distances", dists)
        .set("window", res.window)
        .set("cauchy", res.cauchy);
    if (want_json(o)) {
      write_text_file(o.out + "/minimal_summary.json", seq.dump() + "\n");
      write_text_file(o.out + "/solve_report.json",
                      to_json(res.wave.report).dump() + "\n");
      Json diag = Json::object();
      diag.set("tail", to_json(res.wave.tail));
      diag.set("endpoint", to_json(res.wave.endpoint));
      write_text_file(o.out + "/diagnostics.json", diag.dump() + "\n");
    }
    if (want_csv(o)) write_profile_csv(o.out + "/profile.csv", res.wave.profile);
    std::cout << seq.dump() << "\n";
    std::printf("minimal wave: c -> %.8g, last distance %.4g\n",
                res.speeds.back(), res.distances.back());
    return 0;
  }

  const double c = std::stod(o.speed);
  const WaveProfile wp = solve_wave(p, c, o.l, o.m, o.tol, 5000, o.margin);
  if (want_csv(o)) write_profile_csv(o.out + "/profile.csv", wp.profile);
  if (want_json(o)) {
    write_text_file(o.out + "/solve_report.json",
                    to_json(wp.report).dump() + "\n");
    Json diag = Json::object();
    diag.set("tail", to_json(wp.tail));
    diag.set("endpoint", to_json(wp.endpoint));
    write_text_file(o.out + "/diagnostics.json", diag.dump() + "\n");
  }
  std::cout << to_json(wp.report).dump() << "\n";
  std::printf("solve: converged=%d iterations=%ld ode_residual=%.4g\n",
              wp.report.converged ? 1 : 0, wp.report.iterations,
              wp.report.ode_residual);
  return wp.report.converged ? 0 : 2;
}

int cmd_simulate(const Options& o) {
  const ModelParams p = params_of(o);
  const EndemicState eq = endemic_state(p);
  ensure_outdir(o);

  SimConfig cfg;
  cfg.dt = o.dt;
  cfg.T = o.T;
  cfg.record_stride = std::max<long>(1, std::lround(1.0 / o.dt));
  cfg.level = o.level > 0.0 ? o.level : eq.e_star / 2.0;

  std::optional<Profile> prof;
  if (!o.from_profile.empty()) prof = read_profile_csv(o.from_profile);

  Json summary = Json::object();
  const MinimalSpeed ms = minimal_speed(p);

  if (!prof) {
    LatticeState st =
        init_state(o.N, LeftBlock{eq.e_star, std::min<long>(100, o.N / 4)});
    const auto recordings = integrate(p, st, cfg);
    if (want_csv(o)) write_trajectory_csv(o.out + "/trajectory.csv", recordings);
    const FrontTrace ft =
        track_front(recordings, cfg.level, cfg.fit_window_fraction);
    if (want_csv(o)) write_front_csv(o.out + "/front.csv", ft);
    const double rel = std::abs(ft.fitted_speed - ms.c_star) / ms.c_star;
    summary.set("fitted_speed", ft.fitted_speed)
        .set("fit_stderr", ft.fit_stderr)
        .set("c_star", ms.c_star)
        .set("relative_error", rel)
        .set("level", ft.level)
        .set("monotone_fraction", ft.monotone_fraction);
    std::printf("front speed %.6g vs c* %.6g (relative error %.3g)\n",
                ft.fitted_speed, ms.c_star, rel);
  } else {
    // A profile-initialized run carries the endemic state on the right, so
    // threshold front tracking is meaningless; run the shape check instead.
    if (o.check_shape) {
      if (o.speed.empty())
        throw InvalidArgument("simulate: --check-shape requires --speed");
      const ShapeCheck sc =
          wave_shape_check(p, *prof, std::stod(o.speed), o.N, cfg);
      if (want_json(o))
        write_text_file(o.out + "/shape_check.json", to_json(sc).dump() + "\n");
      summary.set("c_star", ms.c_star)
          .set("drift_rate", sc.drift_rate)
          .set("drift_rel_err", sc.drift_rel_err)
          .set("max_shape_distance", sc.max_distance);
      std::printf("shape drift %.6g vs c %.6g, max distance %.4g\n",
                  sc.drift_rate, std::stod(o.speed), sc.max_distance);
    } else {
      LatticeState st = init_state(o.N, *prof);
      const auto recordings = integrate(p, st, cfg);
      if (want_csv(o))
        write_trajectory_csv(o.out + "/trajectory.csv", recordings);
      summary.set("c_star", ms.c_star).set("front", "profile-initialized run");
    }
  }
  if (want_json(o))
    write_text_file(o.out + "/summary.json", summary.dump() + "\n");
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_certify(const Options& o) {
  const ModelParams p = params_of(o);
  if (o.speed.empty())
    throw InvalidArgument("certify: --speed is required (value or comma list)");
  const std::vector<double> speeds = parse_list(o.speed);
  if (speeds.empty()) throw InvalidArgument("certify: empty speed list");
  Json arr = Json::array();
  NonexistenceCertificate last{};
  for (double c : speeds) {
    last = certify_nonexistence(p, c);
    arr.push(to_json(last));
    std::printf("c = %.8g: certified = %s (min char value %.6g)\n", c,
                last.certified ? "true" : "false", last.min_char_value);
  }
  const Json out_json =
      speeds.size() == 1 ? to_json(last)
                         : Json::object().set("certificates", arr);
  std::cout << out_json.dump() << "\n";
  if (want_json(o)) {
    ensure_outdir(o);
    write_text_file(o.out + "/certificate.json", out_json.dump() + "\n");
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const std::vector<double> mus = parse_list(o.mu_list);
  const std::vector<double> betas = parse_list(o.beta_list);
  const std::vector<double> gammas = parse_list(o.gamma_list);
  const std::vector<double> ds = parse_list(o.d_list);
  ensure_outdir(o);

  struct Point {
    double mu, beta, gamma, d;
  };
  std::vector<Point> pts;
  for (double mu : mus)
    for (double beta : betas)
      for (double gamma : gammas)
        for (double d : ds) pts.push_back({mu, beta, gamma, d});

  struct Row {
    Point pt;
    bool ok = false;
    Dispersion disp{};
    double measured = 0.0, rel = 0.0;
    bool simulated = false;
    std::string error;
  };

  auto eval_point = [&](const Point& pt) {
    Row row;
    row.pt = pt;
    try {
      const ModelParams p = validate_params(pt.mu, pt.beta, pt.gamma, pt.d);
      row.disp = analyze_dispersion(p, 1e-8);
      if (o.simulate) {
        const EndemicState eq = endemic_state(p);
        SimConfig cfg;
        cfg.dt = std::min(o.dt, 0.9 * max_stable_dt(p));
        cfg.T = o.T;
        cfg.record_stride = std::max<long>(1, std::lround(1.0 / cfg.dt));
        cfg.level = eq.e_star / 2.0;
        LatticeState st =
            init_state(o.N, LeftBlock{eq.e_star, std::min<long>(100, o.N / 4)});
        const auto recs = integrate(p, st, cfg);
        const FrontTrace ft =
            track_front(recs, cfg.level, cfg.fit_window_fraction);
        row.measured = ft.fitted_speed;
        row.rel = std::abs(ft.fitted_speed - row.disp.c_star) / row.disp.c_star;
        row.simulated = true;
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };

  // Independent points; evaluate concurrently, merge in grid order.
  std::vector<std::future<Row>> futures;
  futures.reserve(pts.size());
  for (const auto& pt : pts)
    futures.push_back(std::async(std::launch::async, eval_point, pt));

  std::string csv = "mu,beta,gamma,d,sigma,s_star,e_star,c_star,lambda_star";
  if (o.simulate) csv += ",measured_speed,relative_error";
  csv += ",error\n";
  for (auto& fut : futures) {
    const Row row = fut.get();
    csv += format_double(row.pt.mu) + "," + format_double(row.pt.beta) + "," +
           format_double(row.pt.gamma) + "," + format_double(row.pt.d) + ",";
    if (row.ok) {
      csv += format_double(row.disp.sigma) + "," +
             format_double(row.disp.s_star) + "," +
             format_double(row.disp.e_star) + "," +
             format_double(row.disp.c_star) + "," +
             format_double(row.disp.lambda_star);
      if (o.simulate) {
        if (row.simulated)
          csv += "," + format_double(row.measured) + "," + format_double(row.rel);
        else
          csv += ",,";
      }
      csv += ",";
    } else {
      csv += ",,,,";
      if (o.simulate) csv += ",,";
      csv += ",";
      std::string msg = row.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      csv += msg;
    }
    csv += "\n";
  }
  write_text_file(o.out + "/sweep.csv", csv);
  std::printf("sweep: %zu points -> %s/sweep.csv\n", pts.size(), o.out.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"traveling waves and simulation for the epidemic lattice model"};
  app.require_subcommand(1);
  Options o;
  std::map<CLI::App*, Bindings> table;

  auto add_model = [&](CLI::App* cmd) {
    Bindings& b = table[cmd];
    bind_double(b, cmd, "--mu", o.mu, "inflow/death rate");
    bind_double(b, cmd, "--beta", o.beta, "transmission rate");
    bind_double(b, cmd, "--gamma", o.gamma, "removal rate");
    bind_double(b, cmd, "--d", o.d, "infective migration coefficient");
  };
  auto add_common = [&](CLI::App* cmd) {
    Bindings& b = table[cmd];
    bind_string(b, cmd, "--out", o.out, "output directory");
    cmd->add_option("--config", o.config, "key=value config file");
    bind_string(b, cmd, "--format", o.format, "json, csv, or both");
  };

  CLI::App* disp =
      app.add_subcommand("dispersion", "sigma, endemic state, c*, tail roots");
  add_model(disp);
  bind_string(table[disp], disp, "--speed", o.speed,
              "attach lambda1/lambda2 for this speed");
  bind_double(table[disp], disp, "--tol", o.tol, "minimizer tolerance");
  add_common(disp);

  CLI::App* sand = app.add_subcommand(
      "sandwich", "select comparison functions and verify the inequalities");
  add_model(sand);
  bind_string(table[sand], sand, "--speed", o.speed, "wave speed (> c*)");
  bind_double(table[sand], sand, "--margin", o.margin,
              "strict-inequality margin (> 1)");
  add_common(sand);

  CLI::App* solve =
      app.add_subcommand("solve", "solve the truncated wave problem");
  add_model(solve);
  bind_string(table[solve], solve, "--speed", o.speed, "wave speed (> c*)");
  bind_flag(table[solve], solve, "--minimal", o.minimal,
            "minimal-speed wave via the delta sequence");
  bind_double(table[solve], solve, "--l", o.l, "truncation half-width");
  bind_int(table[solve], solve, "--m", o.m, "grid subdivisions per unit");
  bind_double(table[solve], solve, "--tol", o.tol, "iteration tolerance");
  bind_double(table[solve], solve, "--margin", o.margin, "selection margin (> 1)");
  add_common(solve);

  CLI::App* sim =
      app.add_subcommand("simulate", "time-integrate the lattice system");
  add_model(sim);
  bind_long(table[sim], sim, "--N", o.N, "lattice half-width");
  bind_double(table[sim], sim, "--dt", o.dt, "time step");
  bind_double(table[sim], sim, "--T", o.T, "horizon");
  bind_double(table[sim], sim, "--level", o.level, "front threshold (default e*/2)");
  bind_string(table[sim], sim, "--from-profile", o.from_profile,
              "initialize from profile CSV");
  bind_flag(table[sim], sim, "--check-shape", o.check_shape,
            "traveling-shape preservation check");
  bind_string(table[sim], sim, "--speed", o.speed, "wave speed for --check-shape");
  add_common(sim);

  CLI::App* cert = app.add_subcommand("certify", "non-existence certificate");
  add_model(cert);
  bind_string(table[cert], cert, "--speed", o.speed,
              "speed or comma-separated speed grid");
  add_common(cert);

  CLI::App* sweep =
      app.add_subcommand("sweep", "dispersion over a parameter grid");
  bind_string(table[sweep], sweep, "--mu", o.mu_list, "comma list");
  bind_string(table[sweep], sweep, "--beta", o.beta_list, "comma list");
  bind_string(table[sweep], sweep, "--gamma", o.gamma_list, "comma list");
  bind_string(table[sweep], sweep, "--d", o.d_list, "comma list");
  bind_flag(table[sweep], sweep, "--simulate", o.simulate,
            "add measured front speed per point");
  bind_long(table[sweep], sweep, "--N", o.N, "lattice half-width for --simulate");
  bind_double(table[sweep], sweep, "--dt", o.dt, "time step for --simulate");
  bind_double(table[sweep], sweep, "--T", o.T, "horizon for --simulate");
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    apply_config(o, table[active]);
    if (active == disp) return cmd_dispersion(o);
    if (active == sand) return cmd_sandwich(o);
    if (active == solve) return cmd_solve(o);
    if (active == sim) return cmd_simulate(o);
    if (active == cert) return cmd_certify(o);
    if (active == sweep) return cmd_sweep(o);
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::Validation: return 1;
      case ErrorKind::Numerical: return 2;
      case ErrorKind::Io: return 3;
    }
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

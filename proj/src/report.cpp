#include "latwave/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace latwave {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  out += '"';
  return out;
}

} // namespace

Json& Json::set(const std::string& key, double v) {
  members_.emplace_back(key, format_double(v));
  member_is_composite_.push_back(0);
  return *this;
}
Json& Json::set(const std::string& key, long v) {
  members_.emplace_back(key, std::to_string(v));
  member_is_composite_.push_back(0);
  return *this;
}
Json& Json::set(const std::string& key, bool v) {
  members_.emplace_back(key, v ? "true" : "false");
  member_is_composite_.push_back(0);
  return *this;
}
Json& Json::set(const std::string& key, const std::string& v) {
  members_.emplace_back(key, escape(v));
  member_is_composite_.push_back(0);
  return *this;
}
Json& Json::set(const std::string& key, const Json& v) {
  members_.emplace_back(key, v.dump(0));
  member_is_composite_.push_back(1);
  return *this;
}
Json& Json::push(double v) {
  items_.push_back(format_double(v));
  item_is_composite_.push_back(0);
  return *this;
}
Json& Json::push(const Json& v) {
  items_.push_back(v.dump(0));
  item_is_composite_.push_back(1);
  return *this;
}

void Json::render(std::string& out, int, int) const {
  if (kind_ == Kind::Object) {
    out += '{';
    for (std::size_t k = 0; k < members_.size(); ++k) {
      if (k) out += ", ";
      out += escape(members_[k].first);
      out += ": ";
      out += members_[k].second;
    }
    out += '}';
  } else {
    out += '[';
    for (std::size_t k = 0; k < items_.size(); ++k) {
      if (k) out += ", ";
      out += items_[k];
    }
    out += ']';
  }
}

std::string Json::dump(int indent) const {
  std::string flat;
  render(flat, 0, 0);
  if (indent <= 0) return flat;
  // Pretty print: newline per top-level member for readability.
  if (kind_ != Kind::Object) return flat;
  std::string out = "{\n";
  const std::string pad(indent, ' ');
  for (std::size_t k = 0; k < members_.size(); ++k) {
    out += pad + escape(members_[k].first) + ": " + members_[k].second;
    out += (k + 1 < members_.size()) ? ",\n" : "\n";
  }
  out += "}";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << content;
  if (!f) throw IoError("write failed: " + path);
}

void write_profile_csv(const std::string& path, const Profile& prof) {
  std::string out = "xi,phi,psi\n";
  for (long j = 0; j < prof.grid.size(); ++j) {
    out += format_double(prof.grid.xi(j));
    out += ',';
    out += format_double(prof.phi[j]);
    out += ',';
    out += format_double(prof.psi[j]);
    out += '\n';
  }
  write_text_file(path, out);
}

Profile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("xi,phi,psi", 0) != 0)
    throw IoError("bad profile CSV header in " + path);
  std::vector<double> xs, ps, qs;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, tok, ',')) throw IoError("bad CSV row: " + line);
      v[k] = std::stod(tok);
    }
    xs.push_back(v[0]);
    ps.push_back(v[1]);
    qs.push_back(v[2]);
  }
  if (xs.size() < 3) throw IoError("profile CSV too short: " + path);
  const double l = -xs.front();
  if (std::abs(xs.back() - l) > 1e-9)
    throw IoError("profile CSV is not on a symmetric grid: " + path);
  const double h = (xs.back() - xs.front()) / (xs.size() - 1);
  const int m = static_cast<int>(std::lround(1.0 / h));
  Profile prof;
  prof.grid = Grid::make(l, m);
  if (prof.grid.size() != static_cast<long>(xs.size()))
    throw IoError("profile CSV node count mismatch: " + path);
  prof.phi = Eigen::Map<ArrayXd>(ps.data(), ps.size());
  prof.psi = Eigen::Map<ArrayXd>(qs.data(), qs.size());
  // Tail exponent of the left extension, recovered from the boundary value.
  prof.left_decay = prof.psi[0] > 0.0 ? -std::log(prof.psi[0]) / l : 1.0;
  return prof;
}

void write_front_csv(const std::string& path, const FrontTrace& ft) {
  std::string out = "t,position\n";
  for (std::size_t k = 0; k < ft.times.size(); ++k) {
    out += format_double(ft.times[k]);
    out += ',';
    out += format_double(ft.positions[k]);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<LatticeState>& recordings) {
  const bool has_r = !recordings.empty() && recordings.front().r.has_value();
  std::string out = has_r ? "t,n,s,i,r\n" : "t,n,s,i\n";
  for (const auto& st : recordings) {
    for (long n = -st.N; n <= st.N; ++n) {
      const long j = st.index(n);
      out += format_double(st.t);
      out += ',';
      out += std::to_string(n);
      out += ',';
      out += format_double(st.s[j]);
      out += ',';
      out += format_double(st.i[j]);
      if (has_r) {
        out += ',';
        out += format_double((*st.r)[j]);
      }
      out += '\n';
    }
  }
  write_text_file(path, out);
}

Json to_json(const Dispersion& d) {
  Json j = Json::object();
  j.set("sigma", d.sigma)
      .set("s_star", d.s_star)
      .set("e_star", d.e_star)
      .set("c_star", d.c_star)
      .set("lambda_star", d.lambda_star);
  if (d.speed) {
    j.set("speed", *d.speed);
    j.set("lambda1", *d.lambda1);
    j.set("lambda2", *d.lambda2);
  }
  return j;
}

Json to_json(const NonexistenceCertificate& cert) {
  return Json::object()
      .set("c", cert.c)
      .set("c_star", cert.c_star)
      .set("min_char_value", cert.min_char_value)
      .set("argmin_lambda", cert.argmin_lambda)
      .set("certified", cert.certified);
}

Json to_json(const SandwichParams& sp) {
  return Json::object()
      .set("theta", sp.theta)
      .set("rho", sp.rho)
      .set("eta", sp.eta)
      .set("q", sp.q)
      .set("xi1", sp.xi1)
      .set("xi2", sp.xi2)
      .set("lambda1", sp.lambda1)
      .set("lambda2", sp.lambda2)
      .set("c", sp.c)
      .set("margin", sp.margin);
}

Json to_json(const InequalityReport& rep) {
  Json j = Json::object();
  const char* names[4] = {"i1", "i2", "i3", "i4"};
  for (int k = 0; k < 4; ++k) {
    j.set(names[k], Json::object()
                        .set("worst_residual", rep.checks[k].worst_residual)
                        .set("worst_location", rep.checks[k].worst_location)
                        .set("points_checked", rep.checks[k].points_checked)
                        .set("pass", rep.checks[k].pass));
  }
  j.set("xi1", rep.xi1)
      .set("xi2", rep.xi2)
      .set("excluded_points", rep.excluded_points)
      .set("wide_sandwich_flag", rep.wide_sandwich_flag)
      .set("pass", rep.pass);
  return j;
}

Json to_json(const SolveReport& rep) {
  return Json::object()
      .set("iterations", rep.iterations)
      .set("final_gap", rep.final_gap)
      .set("fixed_point_residual", rep.fixed_point_residual)
      .set("ode_residual", rep.ode_residual)
      .set("converged", rep.converged)
      .set("wall_seconds", rep.wall_seconds)
      .set("bracket_sweeps", rep.bracket_sweeps)
      .set("bracket_gap", rep.bracket_gap)
      .set("ordering_violation", rep.ordering_violation)
      .set("containment_violation", rep.containment_violation);
}

Json to_json(const TailDiagnostics& td) {
  return Json::object()
      .set("harnack_max_ratio", td.harnack_max_ratio)
      .set("harnack_bound", td.harnack_bound)
      .set("harnack_M", td.harnack_M)
      .set("harnack_ok", td.harnack_ok)
      .set("fitted_left_decay", td.fitted_left_decay)
      .set("lambda1", td.lambda1)
      .set("left_decay_rel_err", td.left_decay_rel_err)
      .set("logderiv_left", td.logderiv_left)
      .set("logderiv_right", td.logderiv_right)
      .set("sup_psi", td.sup_psi);
}

Json to_json(const EndpointDiagnostics& ed) {
  return Json::object()
      .set("window", ed.window)
      .set("phi_min", ed.phi_min)
      .set("phi_max", ed.phi_max)
      .set("psi_min", ed.psi_min)
      .set("psi_max", ed.psi_max)
      .set("phi_bracket_ok", ed.phi_bracket_ok)
      .set("psi_bracket_ok", ed.psi_bracket_ok)
      .set("trailing_variation_phi", ed.trailing_variation_phi)
      .set("trailing_variation_psi", ed.trailing_variation_psi)
      .set("endpoint_phi", ed.endpoint_phi)
      .set("endpoint_psi", ed.endpoint_psi)
      .set("endpoint_rel_err", ed.endpoint_rel_err)
      .set("endpoint_near_endemic", ed.endpoint_near_endemic)
      .set("epsilon_hat", ed.epsilon_hat);
}

Json to_json(const ShapeCheck& sc) {
  Json shifts = Json::array();
  Json dists = Json::array();
  Json times = Json::array();
  for (std::size_t k = 0; k < sc.times.size(); ++k) {
    times.push(sc.times[k]);
    shifts.push(sc.shifts[k]);
    dists.push(sc.distances[k]);
  }
  return Json::object()
      .set("c", sc.c)
      .set("drift_rate", sc.drift_rate)
      .set("drift_rel_err", sc.drift_rel_err)
      .set("max_distance", sc.max_distance)
      .set("times", times)
      .set("shifts", shifts)
      .set("distances", dists);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::string body = line.substr(b, e - b + 1);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config " + path + ":" + std::to_string(lineno) +
                            ": expected key=value");
    std::string key = body.substr(0, eq);
    std::string val = body.substr(eq + 1);
    const auto ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke == std::string::npos ? 0 : ke + 1);
    const auto vb = val.find_first_not_of(" \t");
    val = vb == std::string::npos ? "" : val.substr(vb);
    if (key.empty())
      throw InvalidArgument("config " + path + ":" + std::to_string(lineno) +
                            ": empty key");
    out[key] = val;
  }
  return out;
}

} // namespace latwave

#ifndef LATWAVE_REPORT_HPP
#define LATWAVE_REPORT_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "latwave/lattice.hpp"
#include "latwave/model.hpp"
#include "latwave/profile.hpp"
#include "latwave/sandwich.hpp"

namespace latwave {

/// Insertion-ordered JSON value with doubles fixed at 17 significant digits,
/// so identical runs produce byte-identical output.
class Json {
public:
  static Json object() { return Json(Kind::Object); }
  static Json array() { return Json(Kind::Array); }

  Json& set(const std::string& key, double v);
  Json& set(const std::string& key, long v);
  Json& set(const std::string& key, int v) { return set(key, static_cast<long>(v)); }
  Json& set(const std::string& key, bool v);
  Json& set(const std::string& key, const std::string& v);
  Json& set(const std::string& key, const char* v) { return set(key, std::string(v)); }
  Json& set(const std::string& key, const Json& v);

  Json& push(double v);
  Json& push(const Json& v);

  std::string dump(int indent = 2) const;

private:
  enum class Kind { Object, Array };
  explicit Json(Kind k) : kind_(k) {}
  void render(std::string& out, int indent, int depth) const;

  Kind kind_;
  std::vector<std::pair<std::string, std::string>> members_; // pre-rendered
  std::vector<std::string> items_;
  std::vector<int> member_is_composite_;
  std::vector<int> item_is_composite_;
};

std::string format_double(double v); // %.17g

void write_text_file(const std::string& path, const std::string& content);

/// Profile CSV: header `xi,phi,psi`, one node per row, 17 significant digits.
void write_profile_csv(const std::string& path, const Profile& prof);
Profile read_profile_csv(const std::string& path);

/// FrontTrace CSV: `t,position`.
void write_front_csv(const std::string& path, const FrontTrace& ft);

/// Trajectory CSV in long format: `t,n,s,i[,r]`.
void write_trajectory_csv(const std::string& path,
                          const std::vector<LatticeState>& recordings);

Json to_json(const Dispersion& d);
Json to_json(const NonexistenceCertificate& cert);
Json to_json(const SandwichParams& sp);
Json to_json(const InequalityReport& rep);
Json to_json(const SolveReport& rep);
Json to_json(const TailDiagnostics& td);
Json to_json(const EndpointDiagnostics& ed);
Json to_json(const ShapeCheck& sc);

/// Flat key=value config file; keys are long flag names without dashes.
/// Lines starting with '#' and blank lines are skipped. Unknown keys are the
/// caller's to reject (it owns the key set).
std::map<std::string, std::string> parse_config_file(const std::string& path);

} // namespace latwave

#endif

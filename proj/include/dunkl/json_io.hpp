#pragma once

// JSON documents and CSV tables for the library's results, and atomic file output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "dunkl/asymptotics.hpp"
#include "dunkl/errors.hpp"
#include "dunkl/geometry.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/report.hpp"
#include "dunkl/root_system.hpp"

namespace dunkl {

using json = nlohmann::json;

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const std::vector<Eigen::VectorXd>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

inline json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

/// Group-element index -> [re, im].
inline json to_json(const OrbitVector& v) {
  json o = json::object();
  for (std::size_t g = 0; g < v.size(); ++g) o[std::to_string(g)] = complex_json(v[g]);
  return o;
}

inline json multiplicities_json(const RootSystem& rs) {
  json o = json::object();
  for (std::size_t i = 0; i < rs.orbit_names.size(); ++i) o[rs.orbit_names[i]] = rs.orbit_k[i];
  return o;
}

inline json to_json(const RootSystem& rs) {
  std::vector<Eigen::VectorXd> simple;
  for (int i = 0; i < rs.rank(); ++i) simple.push_back(rs.simple_root(i));
  json orbit = json::array();
  for (std::size_t a = 0; a < rs.num_positive(); ++a) orbit.push_back(rs.orbit_names[rs.root_orbit[a]]);
  return {{"family", family_name(rs.family)},
          {"label", rs.label()},
          {"rank", rs.rank()},
          {"positive_roots", to_json(rs.positive_roots)},
          {"root_orbits", orbit},
          {"simple_roots", to_json(simple)},
          {"multiplicities", multiplicities_json(rs)},
          {"gamma_k", rs.gamma()}};
}

inline json group_words_json(const ReflectionGroup& grp) {
  json a = json::array();
  for (const auto& e : grp.elements()) a.push_back(e.word);
  return a;
}

inline json to_json(const VerificationReport& r, bool with_runtime) {
  json j = {{"check", r.check_name}, {"seed", r.seed},       {"samples", r.sample_count}, {"sup", r.empirical_sup},
            {"sup_base", r.sup_base}, {"arg_sup", r.arg_sup}, {"margin", r.margin},       {"pass", r.pass},
            {"details", r.details}};
  if (with_runtime) j["runtime_ms"] = r.runtime_ms;
  return j;
}

/// Report plus the root-system fields of the report schema.
inline json report_json(const VerificationReport& r, const RootSystem& rs, bool with_runtime) {
  json j = to_json(r, with_runtime);
  j["family"] = rs.label();
  j["k"] = multiplicities_json(rs);
  j["gamma_k"] = rs.gamma();
  return j;
}

inline json to_json(const CoveringResult& c) {
  return {{"p0", c.p0},
          {"generators", to_json(c.polytope.generators())},
          {"margin", c.margin},
          {"estimated_min", c.estimated_min},
          {"mesh", c.mesh},
          {"samples", c.samples}};
}

inline json to_json(const LimitEstimate& e) {
  return {{"v", to_json(e.v)},
          {"norm_v", e.v.values.norm()},
          {"tol", e.tol},
          {"converged", e.converged},
          {"t_final", e.t_final},
          {"last_change", e.last_change},
          {"steps", e.steps}};
}

/// t, Re F_g, Im F_g for every g, then the extrapolated limit columns (empty until defined).
inline std::string convergence_csv(const LimitEstimate& e) {
  std::string out = "t";
  const auto m = e.v.size();
  for (std::size_t g = 0; g < m; ++g) out += ",re_F" + std::to_string(g) + ",im_F" + std::to_string(g);
  for (std::size_t g = 0; g < m; ++g) out += ",re_v" + std::to_string(g) + ",im_v" + std::to_string(g);
  out += "\n";
  for (const auto& row : e.table) {
    out += json(row.t).dump();
    for (Eigen::Index g = 0; g < row.F.size(); ++g)
      out += "," + json(row.F[g].real()).dump() + "," + json(row.F[g].imag()).dump();
    for (std::size_t g = 0; g < m; ++g) {
      if (row.has_extrapolation) {
        const cd v = row.extrapolated[static_cast<Eigen::Index>(g)];
        out += "," + json(v.real()).dump() + "," + json(v.imag()).dump();
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

/// Writes `content` to `path` through a temporary file and a rename; "-" is stdout.
inline void write_atomic(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

} // namespace dunkl

// dunkl: command-line front end.
//
//   dunkl rootsys --family b2 --k 1,1
//   dunkl eval --family b2 --k 1,1 --x 1,0.3 --y 0.8,0.2 --t 2
//   dunkl verify --which ez --samples 10000 --seed 7
//   dunkl cover --family z2n --n 2 --delta 0.5
//   dunkl asymp --family b2 --k 1,1 --delta 0.3 --csv table.csv
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 I/O error,
// 4 numerical failure.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dunkl/dunkl.hpp"

namespace {

using namespace dunkl;

enum Exit { ok = 0, verification_failed = 1, config_error = 2, io_error = 3, numeric_error = 4 };

RootSystem root_system_from(const RunConfig& c) {
  const Family family = parse_family(c.family);
  const FamilyParams params{c.n, c.m};
  std::vector<double> k = c.k;
  if (k.empty()) k.assign(orbit_count(family, params), 1.0);
  return build_root_system(family, params, k);
}

Eigen::VectorXd vector_from(const std::vector<double>& v, int n, const char* name) {
  if (static_cast<int>(v.size()) != n)
    throw DomainError(std::string(name) + " must have " + std::to_string(n) + " components");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

Eigen::VectorXd unit_center(const RootSystem& rs) {
  const Eigen::VectorXd c = chamber_center(rs);
  return c / c.norm();
}

KernelContext context_from(const RunConfig& c, const RootSystem& rs) {
  KernelOptions ko;
  if (c.rtol > 0.0) ko.ode.rtol = c.rtol;
  return KernelContext(rs, ko);
}

void emit(const RunConfig& c, const json& j) { write_atomic(c.output, j.dump(2) + "\n"); }

int cmd_rootsys(const RunConfig& c) {
  const RootSystem rs = root_system_from(c);
  const ReflectionGroup grp = generate_group(rs);
  json j = to_json(rs);
  j["group_order"] = grp.size();
  j["dual_basis"] = to_json(dual_basis(rs));
  j["group_words"] = group_words_json(grp);
  emit(c, j);
  if (!c.csv.empty()) {
    std::string out = "index,orbit,k";
    for (int i = 0; i < rs.rank(); ++i) out += ",c" + std::to_string(i);
    out += "\n";
    for (std::size_t a = 0; a < rs.num_positive(); ++a) {
      out += std::to_string(a) + "," + rs.orbit_names[rs.root_orbit[a]] + "," + json(rs.k(a)).dump();
      for (int i = 0; i < rs.rank(); ++i) out += "," + json(rs.root(a)[i]).dump();
      out += "\n";
    }
    write_atomic(c.csv, out);
  }
  return ok;
}

int cmd_eval(const RunConfig& c) {
  const RootSystem rs = root_system_from(c);
  const KernelContext ctx = context_from(c, rs);
  const Eigen::VectorXd x = vector_from(c.x, rs.rank(), "x");
  const Eigen::VectorXd y = vector_from(c.y, rs.rank(), "y");
  const Eigen::VectorXcd ys = c.imaginary ? Eigen::VectorXcd(y.cast<cd>() * cd(0.0, 1.0)) : Eigen::VectorXcd(y.cast<cd>());
  const KernelEvaluation ev = eval_orbit(ctx, x, ys, c.t);
  json j = {{"family", rs.label()},
            {"k", multiplicities_json(rs)},
            {"gamma_k", rs.gamma()},
            {"x", to_json(x)},
            {"y", to_json(y)},
            {"t", c.t},
            {"imaginary", c.imaginary},
            {"values", to_json(ev.result)},
            {"scaled", ev.scaled},
            {"scale_exponent", ev.scale_exponent},
            {"used_ode", ev.used_ode},
            {"group_words", group_words_json(ctx.group())}};
  emit(c, j);
  if (!c.csv.empty()) {
    std::string out = "g,re,im\n";
    for (std::size_t g = 0; g < ev.result.size(); ++g)
      out += std::to_string(g) + "," + json(ev.result[g].real()).dump() + "," + json(ev.result[g].imag()).dump() + "\n";
    write_atomic(c.csv, out);
  }
  return ok;
}

std::vector<std::string> checks_from(const std::string& which) {
  static const std::vector<std::string> all = {"ez", "d1", "boundedness", "polytope", "main", "corollary"};
  if (which == "all") return all;
  std::vector<std::string> out;
  std::stringstream ss(which);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (std::find(all.begin(), all.end(), item) == all.end())
      throw DomainError("unknown check '" + item + "' (expected ez, d1, boundedness, polytope, main, corollary, all)");
    out.push_back(item);
  }
  if (out.empty()) throw DomainError("no check selected");
  return out;
}

int cmd_verify(const RunConfig& c) {
  const RootSystem rs = root_system_from(c);
  const KernelContext ctx = context_from(c, rs);
  const ConeSpec spec{c.delta, c.root_scope == "simple_only" ? RootScope::simple_only : RootScope::all_positive};
  const auto checks = checks_from(c.which);

  std::vector<double> ratios;
  auto options = [&](double default_scale) {
    VerifyOptions o;
    o.scale_min = c.scale_min;
    o.scale_max = c.scale_max > 0.0 ? c.scale_max : default_scale;
    if (o.scale_max <= o.scale_min) throw DomainError("scale_max must exceed scale_min");
    if (c.rtol > 0.0) o.ode.rtol = c.rtol;
    o.ratios = c.csv.empty() ? nullptr : &ratios;
    return o;
  };
  std::optional<Polytope> poly;
  auto polytope = [&]() -> const Polytope& {
    if (!poly) poly = lemma_covering(rs, spec).polytope;
    return *poly;
  };

  std::vector<json> reports;
  std::string csv = "check,index,ratio\n";
  bool all_pass = true;
  for (const auto& name : checks) {
    ratios.clear();
    VerificationReport r;
    if (name == "ez") {
      r = verify_ez(ctx, c.samples, c.seed, options(50.0));
    } else if (name == "d1") {
      r = check_d1_estimates(rs.orbit_k.front(), c.samples, c.seed);
    } else if (name == "boundedness") {
      const Eigen::VectorXd x = c.x.empty() ? unit_center(rs) : vector_from(c.x, rs.rank(), "x");
      const Eigen::VectorXd y = c.y.empty() ? unit_center(rs) : vector_from(c.y, rs.rank(), "y");
      BoundednessOptions bo;
      if (c.rtol > 0.0) bo.ode.rtol = c.rtol;
      r = verify_lemma_boundedness(ctx, x, y, static_cast<std::size_t>(c.g), c.T,
                                   static_cast<std::size_t>(c.grid_points), bo);
    } else if (name == "polytope") {
      r = verify_lemma_polytope(ctx, polytope(), c.samples, parse_exponent_variant(c.variant), c.seed, options(1e4));
    } else if (name == "main") {
      r = verify_main_theorem(ctx, polytope(), c.samples, c.seed, options(1e3));
    } else {
      r = verify_corollary_imaginary(ctx, spec, c.samples, c.seed, options(1e4));
    }
    all_pass = all_pass && r.pass;
    reports.push_back(report_json(r, rs, c.timing));
    for (std::size_t i = 0; i < ratios.size(); ++i)
      csv += r.check_name + "," + std::to_string(i) + "," + json(ratios[i]).dump() + "\n";
  }

  if (reports.size() == 1) {
    emit(c, reports.front());
  } else {
    emit(c, json{{"family", rs.label()}, {"k", multiplicities_json(rs)}, {"gamma_k", rs.gamma()},
                 {"seed", c.seed},       {"pass", all_pass},                {"reports", reports}});
  }
  if (!c.csv.empty()) write_atomic(c.csv, csv);
  return all_pass ? ok : verification_failed;
}

int cmd_cover(const RunConfig& c) {
  const RootSystem rs = root_system_from(c);
  const ConeSpec spec{c.delta, c.root_scope == "simple_only" ? RootScope::simple_only : RootScope::all_positive};
  CoveringOptions co;
  co.p_max = c.p_max;
  co.min_samples = c.min_samples;
  const CoveringResult cov = lemma_covering(rs, spec, co);
  const HConstantResult hc = h_constant(rs, cov.polytope, c.samples, c.seed);
  json j = to_json(cov);
  j["family"] = rs.label();
  j["delta"] = c.delta;
  j["root_scope"] = c.root_scope;
  j["nesting_coefficient"] = nesting_coefficient_derived(rs.rank(), cov.p0);
  j["h_constant"] = {{"c", hc.c}, {"c_base", hc.c_base}, {"q", hc.q}, {"samples", hc.samples}};
  emit(c, j);
  if (!c.csv.empty()) {
    std::string out = "generator";
    for (int i = 0; i < rs.rank(); ++i) out += ",c" + std::to_string(i);
    out += "\n";
    for (int g = 0; g < cov.polytope.dim(); ++g) {
      out += std::to_string(g);
      for (int i = 0; i < rs.rank(); ++i) out += "," + json(cov.polytope.generator(g)[i]).dump();
      out += "\n";
    }
    write_atomic(c.csv, out);
  }
  return ok;
}

int cmd_asymp(const RunConfig& c) {
  const RootSystem rs = root_system_from(c);
  const KernelContext ctx(rs);
  const Eigen::VectorXd u1 = c.u1.empty() ? unit_center(rs) : vector_from(c.u1, rs.rank(), "u1");
  const Eigen::VectorXd u2 = c.u2.empty() ? unit_center(rs) : vector_from(c.u2, rs.rank(), "u2");
  const auto curve = make_curve_pair(rs, parse_curve_kind(c.curve), u1, u2, c.delta, c.rotation_rate, c.t0);
  AsymptoticOptions ao;
  ao.tol = c.tol;
  ao.t0 = c.t0;
  ao.t_max = c.t_max;
  if (c.rtol > 0.0) ao.ode.rtol = c.rtol;
  const LimitEstimate est = estimate_v(ctx, curve, ao);
  if (!(est.v.values.norm() > 0.0)) throw NumericError("estimated limit vector vanishes");
  json j = to_json(est);
  j["family"] = rs.label();
  j["k"] = multiplicities_json(rs);
  j["curve"] = {{"kind", to_string(curve.kind)},
                {"u1", to_json(curve.u1)},
                {"u2", to_json(curve.u2)},
                {"rotation_rate", curve.rotation_rate},
                {"delta", curve.delta}};
  emit(c, j);
  if (!c.csv.empty()) write_atomic(c.csv, convergence_csv(est));
  return ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dunkl kernels of finite reflection groups: evaluation and numerical checks of their estimates"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "flat 'key = value' configuration file; flags override it");
  app.add_flag("--print-config", print_config, "print the merged configuration and exit");

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& f : config_fields()) {
    if (f.is_flag) opts[f.key] = app.add_flag("--" + f.key, f.help);
    else opts[f.key] = app.add_option("--" + f.key, raw[f.key], f.help);
  }

  std::map<std::string, int (*)(const RunConfig&)> commands = {
      {"rootsys", cmd_rootsys}, {"eval", cmd_eval}, {"verify", cmd_verify}, {"cover", cmd_cover}, {"asymp", cmd_asymp}};
  const std::map<std::string, std::string> descriptions = {
      {"rootsys", "roots, group order, gamma_k and dual basis"},
      {"eval", "E_k(t x, g y) for every group element g"},
      {"verify", "sampled checks of the kernel estimates"},
      {"cover", "covering index p0 of C_delta and the polytope constants"},
      {"asymp", "limit vector of the normalized imaginary kernel along a curve pair"}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, descriptions.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& f : config_fields()) {
      if (opts[f.key]->count() == 0) continue;
      set_config_value(cfg, f.key, f.is_flag ? "true" : raw[f.key]);
    }
    validate_config(cfg);
    if (print_config) {
      std::cout << serialize_config(cfg);
      return ok;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    return commands.at(name)(cfg);
  } catch (const IoError& e) {
    std::cerr << "dunkl: I/O error: " << e.what() << "\n";
    return io_error;
  } catch (const DomainError& e) {
    std::cerr << "dunkl: configuration error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "dunkl: numerical failure: " << e.what() << "\n";
    std::cerr << "dunkl: inputs:";
    for (const char* key : {"family", "n", "m", "k", "x", "y", "t", "delta", "seed", "samples", "p_max"})
      std::cerr << " " << key << "=" << get_config_value(cfg, key);
    std::cerr << "\n";
    return numeric_error;
  }
}

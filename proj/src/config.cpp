#include "polyhess/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "json.hpp"
#include "polyhess/errors.hpp"
#include "polyhess/field_io.hpp"

namespace polyhess {

namespace {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem", {"N", "k", "alpha", "form"}},
      {"domain", {"extent", "nodes"}},
      {"datum", {"kind", "amplitude", "width", "cells", "path"}},
      {"lambda", {"value", "schedule"}},
      {"solver",
       {"grad_tol", "max_iters", "step_rule", "armijo_c", "rho", "fixed_step", "path_points", "deform_tol", "seed",
        "fit_samples", "jobs"}},
      {"output", {"directory", "dump_fields"}},
  };
  return s;
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad value for " + key + ": '" + raw + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, raw, boost::algorithm::is_any_of(","));
  std::vector<T> out;
  for (const auto& p : parts) {
    if (boost::algorithm::trim_copy(p).empty()) continue;
    out.push_back(parse_number<T>(key, p));
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(raw));
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + raw + "'");
}

Sections read_ini_sections(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Sections out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) out[section][key] = boost::algorithm::trim_copy(value.data());
  }
  return out;
}

std::string json_scalar(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt(v.get<double>());
  throw ConfigError("unsupported JSON value at " + where);
}

Sections read_json_sections(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config JSON must be an object of sections");
  Sections out;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw ConfigError("section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const std::string where = section + "." + key;
      if (value.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) joined += ",";
          joined += json_scalar(value[i], where);
        }
        out[section][key] = joined;
      } else {
        out[section][key] = json_scalar(value, where);
      }
    }
  }
  return out;
}

void check_schema(const Sections& sec) {
  for (const auto& [section, body] : sec) {
    auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = solver;
  const auto& b = o.solver;
  const bool solver_eq = a.grad_tol == b.grad_tol && a.max_iters == b.max_iters &&
                         a.step_rule.kind == b.step_rule.kind && a.step_rule.c == b.step_rule.c &&
                         a.step_rule.rho == b.step_rule.rho && a.step_rule.fixed == b.step_rule.fixed &&
                         a.path_points == b.path_points && a.deform_tol == b.deform_tol && a.seed == b.seed &&
                         a.fit_samples == b.fit_samples && a.jobs == b.jobs;
  return solver_eq && N == o.N && k == o.k && alpha_override == o.alpha_override && form == o.form &&
         extent == o.extent && nodes == o.nodes && datum.kind == o.datum.kind &&
         datum.amplitude == o.datum.amplitude && datum.width == o.datum.width && datum.cells == o.datum.cells &&
         datum.path == o.datum.path && lambda == o.lambda && lambda_schedule == o.lambda_schedule &&
         out_dir == o.out_dir && dump_fields == o.dump_fields;
}

RunConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const Sections sec = (first != std::string::npos && text[first] == '{') ? read_json_sections(text)
                                                                          : read_ini_sections(text);
  check_schema(sec);
  RunConfig c;
  auto get = [&](const std::string& s, const std::string& k) -> const std::string* {
    auto it = sec.find(s);
    if (it == sec.end()) return nullptr;
    auto kt = it->second.find(k);
    return kt == it->second.end() ? nullptr : &kt->second;
  };
  if (auto v = get("problem", "N")) c.N = parse_number<int>("N", *v);
  if (auto v = get("problem", "k")) c.k = parse_number<int>("k", *v);
  if (auto v = get("problem", "alpha")) c.alpha_override = parse_number<int>("alpha", *v);
  if (auto v = get("problem", "form")) c.form = parse_form(boost::algorithm::trim_copy(*v));
  if (auto v = get("domain", "extent")) c.extent = parse_list<double>("extent", *v);
  if (auto v = get("domain", "nodes")) c.nodes = parse_list<int>("nodes", *v);
  if (auto v = get("datum", "kind")) c.datum.kind = *v;
  if (auto v = get("datum", "amplitude")) c.datum.amplitude = parse_number<double>("amplitude", *v);
  if (auto v = get("datum", "width")) c.datum.width = parse_number<double>("width", *v);
  if (auto v = get("datum", "cells")) c.datum.cells = parse_number<int>("cells", *v);
  if (auto v = get("datum", "path")) c.datum.path = *v;
  if (auto v = get("lambda", "value")) c.lambda = parse_number<double>("lambda", *v);
  if (auto v = get("lambda", "schedule")) c.lambda_schedule = parse_list<double>("schedule", *v);
  SolverConfig& s = c.solver;
  if (auto v = get("solver", "grad_tol")) s.grad_tol = parse_number<double>("grad_tol", *v);
  if (auto v = get("solver", "max_iters")) s.max_iters = parse_number<int>("max_iters", *v);
  if (auto v = get("solver", "step_rule")) {
    if (*v == "backtracking") {
      s.step_rule.kind = StepKind::Backtracking;
    } else if (*v == "fixed") {
      s.step_rule.kind = StepKind::Fixed;
    } else {
      throw ConfigError("step_rule must be 'backtracking' or 'fixed'");
    }
  }
  if (auto v = get("solver", "armijo_c")) s.step_rule.c = parse_number<double>("armijo_c", *v);
  if (auto v = get("solver", "rho")) s.step_rule.rho = parse_number<double>("rho", *v);
  if (auto v = get("solver", "fixed_step")) s.step_rule.fixed = parse_number<double>("fixed_step", *v);
  if (auto v = get("solver", "path_points")) s.path_points = parse_number<int>("path_points", *v);
  if (auto v = get("solver", "deform_tol")) s.deform_tol = parse_number<double>("deform_tol", *v);
  if (auto v = get("solver", "seed")) s.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("solver", "fit_samples")) s.fit_samples = parse_number<int>("fit_samples", *v);
  if (auto v = get("solver", "jobs")) s.jobs = parse_number<int>("jobs", *v);
  if (auto v = get("output", "directory")) c.out_dir = *v;
  if (auto v = get("output", "dump_fields")) c.dump_fields = parse_bool("dump_fields", *v);

  static const std::set<std::string> kinds{"constant", "gaussian", "checker", "file"};
  if (!kinds.count(c.datum.kind)) throw ConfigError("unknown datum kind '" + c.datum.kind + "'");
  if (c.datum.kind == "file" && c.datum.path.empty()) throw ConfigError("datum kind 'file' needs a path");
  try {
    validate(ProblemParams{c.N, c.k});
    validate(c.solver);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (c.extent.size() != 1 && static_cast<int>(c.extent.size()) != c.N) throw ConfigError("extent needs 1 or N values");
  if (c.nodes.size() != 1 && static_cast<int>(c.nodes.size()) != c.N) throw ConfigError("nodes needs 1 or N values");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[problem]\nN = " << c.N << "\nk = " << c.k << "\n";
  if (c.alpha_override) o << "alpha = " << *c.alpha_override << "\n";
  o << "form = " << to_string(c.form) << "\n\n";
  o << "[domain]\nextent = " << join(c.extent) << "\nnodes = " << join(c.nodes) << "\n\n";
  o << "[datum]\nkind = " << c.datum.kind << "\namplitude = " << fmt(c.datum.amplitude)
    << "\nwidth = " << fmt(c.datum.width) << "\ncells = " << c.datum.cells << "\n";
  if (!c.datum.path.empty()) o << "path = " << c.datum.path << "\n";
  o << "\n[lambda]\nvalue = " << fmt(c.lambda) << "\n";
  if (!c.lambda_schedule.empty()) o << "schedule = " << join(c.lambda_schedule) << "\n";
  const SolverConfig& s = c.solver;
  o << "\n[solver]\ngrad_tol = " << fmt(s.grad_tol) << "\nmax_iters = " << s.max_iters
    << "\nstep_rule = " << (s.step_rule.kind == StepKind::Fixed ? "fixed" : "backtracking")
    << "\narmijo_c = " << fmt(s.step_rule.c) << "\nrho = " << fmt(s.step_rule.rho)
    << "\nfixed_step = " << fmt(s.step_rule.fixed) << "\npath_points = " << s.path_points
    << "\ndeform_tol = " << fmt(s.deform_tol) << "\nseed = " << s.seed << "\nfit_samples = " << s.fit_samples
    << "\njobs = " << s.jobs << "\n";
  o << "\n[output]\ndirectory = " << c.out_dir << "\ndump_fields = " << (c.dump_fields ? "true" : "false") << "\n";
  return o.str();
}

BoxDomain build_domain(const RunConfig& c) {
  if (c.N > 3) throw CapabilityError("grids are limited to N <= 3 (requested N = " + std::to_string(c.N) + ")");
  BoxDomain d;
  d.dim = c.N;
  for (int a = 0; a < 3; ++a) {
    if (a < c.N) {
      d.nodes[a] = c.nodes.size() == 1 ? c.nodes[0] : c.nodes[a];
      d.extent[a] = c.extent.size() == 1 ? c.extent[0] : c.extent[a];
    } else {
      d.nodes[a] = 1;
      d.extent[a] = 1.0;
    }
  }
  try {
    validate(d);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return d;
}

ScalarField build_datum(const RunConfig& c, const BoxDomain& d, int ghost_width) {
  const DatumSpec& ds = c.datum;
  if (ds.kind == "file") {
    ScalarField f = read_field(ds.path);
    if (!(f.domain() == d)) throw ConfigError("datum field grid does not match the configured domain");
    f.set_ghost_width(ghost_width);
    return f;
  }
  return sample(d, ghost_width, [&](const Point& x) {
    if (ds.kind == "constant") return ds.amplitude;
    if (ds.kind == "gaussian") {
      double r2 = 0.0;
      for (int a = 0; a < d.dim; ++a) r2 += (x[a] - 0.5 * d.extent[a]) * (x[a] - 0.5 * d.extent[a]);
      return ds.amplitude * std::exp(-0.5 * r2 / (ds.width * ds.width));
    }
    double p = 1.0;
    for (int a = 0; a < d.dim; ++a) p *= std::sin(std::numbers::pi * ds.cells * x[a] / d.extent[a]);
    return p > 0.0 ? ds.amplitude : (p < 0.0 ? -ds.amplitude : 0.0);
  });
}

EnergySetting build_setting(const RunConfig& c, std::optional<double> lambda) {
  const BoxDomain d = build_domain(c);
  const ProblemParams params{c.N, c.k};
  const int alpha = c.alpha_override ? *c.alpha_override : (c.form == Form::Strong ? alpha_main(params) : alpha_weak(params));
  try {
    return make_setting(params, lambda.value_or(c.lambda), build_datum(c, d, alpha), c.form, c.alpha_override);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace polyhess

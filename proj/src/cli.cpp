#include "nakao/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "nakao/exponents.hpp"
#include "nakao/lifespan.hpp"
#include "nakao/pde.hpp"
#include "nakao/slicing.hpp"
#include "nakao/svg.hpp"
#include "nakao/testfn.hpp"

namespace nakao {

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* const kVersion = "0.1.0";

json problem_group(int n = 1, double p = 2.0, double q = 2.0) {
  return {{"n", n}, {"p", p}, {"q", q}, {"R", 1.0}, {"epsilon", 1.0}};
}

json data_group() { return {{"shape", "bump"}, {"u0", 1.0}, {"u1", 1.0}, {"v0", 1.0}, {"v1", 1.0}}; }

json numerics_group(double t_max = 20.0) {
  return {{"h", 0.02},        {"cfl", 0.5},      {"t_max", t_max},   {"threshold", 1e8},
          {"r_max", 0.0},     {"support_tol", 1e-3}, {"refine", false}};
}

json measured_group() {
  return {{"c1", 1.0}, {"c4", 1.0}, {"c0_tilde", 1.0}, {"c1_tilde", 1.0}, {"holder_t_max", 50.0}};
}

json defaults_for(const std::string& name) {
  if (name == "region")
    return {{"problem", {{"n", 2}}},
            {"window", {{"p_lo", 1.05}, {"p_hi", 6.0}, {"q_lo", 1.05}, {"q_hi", 6.0}, {"grid", 200}}},
            {"output", {{"out", "region"}}},
            {"seed", 0}};
  if (name == "curves")
    return {{"range", {{"n_min", 1}, {"n_max", 12}}},
            {"window", {{"p_lo", 1.05}, {"p_hi", 6.0}, {"q_lo", 1.05}, {"q_hi", 6.0}, {"samples", 200}}},
            {"output", {{"out", "curves"}}},
            {"seed", 0}};
  if (name == "sequences")
    return {{"problem", problem_group()},
            {"iteration", {{"mode", "prop1"}, {"constants", "unit"}, {"jmax", 41}}},
            {"measured", measured_group()},
            {"output", {{"out", "sequences"}}},
            {"seed", 0}};
  if (name == "testfn")
    return {{"problem", {{"n", 3}, {"p", 2.0}, {"R", 1.0}}},
            {"table", {{"r_min", 0.0}, {"r_max", 60.0}, {"dr", 0.5}, {"holder_t_max", 50.0}}},
            {"output", {{"out", "testfn"}}},
            {"seed", 0}};
  if (name == "simulate")
    return {{"problem", problem_group()},
            {"data", data_group()},
            {"numerics", numerics_group()},
            {"output", {{"out", "simulate"}, {"every", 1}}},
            {"seed", 0}};
  if (name == "sweep")
    return {{"problem", problem_group()},
            {"data", data_group()},
            {"numerics", numerics_group(60.0)},
            {"fit", {{"ladder", {0.4, 0.3, 0.2, 0.15, 0.1}}, {"tol", 0.35}, {"refine_check", false}, {"refine_tol", 0.1}}},
            {"output", {{"out", "sweep"}}},
            {"seed", 0}};
  if (name == "report")
    return {{"problem", problem_group(2, 2.0, 3.0)}, {"output", {{"out", "report"}}}, {"seed", 0}};
  throw std::invalid_argument(fmt::format("unknown subcommand '{}'", name));
}

const std::vector<std::string> kSubcommands = {"region", "curves", "sequences", "testfn", "simulate", "sweep", "report"};

const std::map<std::string, std::string> kAliases = {{"epsilon", "--eps"}, {"t_max", "--T_max"}};

// Leaves of a two-level config: group -> key -> value, plus top-level scalars.
template <typename Fn>
void for_each_leaf(json& config, Fn&& fn) {
  for (auto& [group, value] : config.items()) {
    if (value.is_object()) {
      for (auto& [key, leaf] : value.items()) fn(group, key, leaf);
    } else {
      fn(std::string(), group, value);
    }
  }
}

bool same_kind(const json& want, const json& got) {
  if (want.is_boolean()) return got.is_boolean();
  if (want.is_string()) return got.is_string();
  if (want.is_number_integer() || want.is_number_unsigned()) return got.is_number_integer() || got.is_number_unsigned();
  if (want.is_number()) return got.is_number();
  if (want.is_array()) return got.is_array() && std::all_of(got.begin(), got.end(), [](const json& x) { return x.is_number(); });
  return false;
}

// Strict merge: every key in `file` must exist in `base` with a compatible type.
void merge_strict(json& base, const json& file, const std::string& where) {
  if (!file.is_object()) throw ConfigError(fmt::format("config{}: expected an object", where));
  for (const auto& [key, value] : file.items()) {
    const std::string path = where + "." + key;
    if (!base.contains(key)) throw ConfigError(fmt::format("config: unknown key '{}'", path.substr(1)));
    json& slot = base[key];
    if (slot.is_object()) {
      merge_strict(slot, value, path);
    } else if (!same_kind(slot, value)) {
      throw ConfigError(fmt::format("config: key '{}' has the wrong type", path.substr(1)));
    } else if (slot.is_number_float()) {
      slot = value.get<double>();
    } else {
      slot = value;
    }
  }
}

json parse_flag(const json& want, const std::string& key, const std::string& text) {
  auto fail = [&] { return ConfigError(fmt::format("flag --{}: cannot parse '{}'", key, text)); };
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(s, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != s.size()) throw fail();
    return value;
  };
  if (want.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw fail();
  }
  if (want.is_string()) return text;
  if (want.is_number_integer() || want.is_number_unsigned()) {
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(text, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != text.size()) throw fail();
    return value;
  }
  if (want.is_number()) return number(text);
  json list = json::array();
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    list.push_back(number(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return list;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(fmt::format("cannot open '{}' for writing", path));
  file << content;
  if (!file) throw IoError(fmt::format("write to '{}' failed", path));
}

int resolved_jobs(int flag_jobs) {
  if (flag_jobs > 0) return flag_jobs;
  if (const char* env = std::getenv("NAKAO_JOBS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<int>(value);
  }
  return 1;
}

json meta(const std::string& subcommand, const json& config) {
  return {{"tool", "nakao"}, {"version", kVersion}, {"subcommand", subcommand}, {"config", config}, {"seed", config.at("seed")}};
}

ProblemParams problem_from(const json& g) {
  ProblemParams params;
  params.n = g.at("n").get<int>();
  params.p = g.at("p").get<double>();
  params.q = g.at("q").get<double>();
  params.R = g.at("R").get<double>();
  params.epsilon = g.at("epsilon").get<double>();
  validate(params);
  return params;
}

InitialDataSpec data_from(const json& g) {
  InitialDataSpec spec;
  const auto shape = g.at("shape").get<std::string>();
  if (shape == "bump") {
    spec.shape = DataShape::Bump;
  } else if (shape == "cosine") {
    spec.shape = DataShape::TruncatedCosine;
  } else {
    throw ConfigError(fmt::format("data.shape must be 'bump' or 'cosine', got '{}'", shape));
  }
  spec.u0 = g.at("u0").get<double>();
  spec.u1 = g.at("u1").get<double>();
  spec.v0 = g.at("v0").get<double>();
  spec.v1 = g.at("v1").get<double>();
  return spec;
}

Numerics numerics_from(const json& g) {
  Numerics num;
  num.h = g.at("h").get<double>();
  num.cfl = g.at("cfl").get<double>();
  num.t_max = g.at("t_max").get<double>();
  num.threshold = g.at("threshold").get<double>();
  num.r_max = g.at("r_max").get<double>();
  num.support_tol = g.at("support_tol").get<double>();
  num.refine = g.at("refine").get<bool>();
  return num;
}

// --- subcommands -----------------------------------------------------------

int run_region(const json& config, int jobs, std::ostream& out) {
  RegionSpec spec;
  spec.n = config.at("problem").at("n").get<int>();
  const json& w = config.at("window");
  spec.p_lo = w.at("p_lo").get<double>();
  spec.p_hi = w.at("p_hi").get<double>();
  spec.q_lo = w.at("q_lo").get<double>();
  spec.q_hi = w.at("q_hi").get<double>();
  spec.resolution = w.at("grid").get<int>();
  const auto cells = region_scan(spec, jobs);

  std::string csv = "p,q,alphaN,F,verdict,binding_component\n";
  std::vector<std::pair<double, double>> blowup, wakasugi, open, inadmissible;
  std::map<std::string, int> counts;
  for (const RegionCell& c : cells) {
    csv += fmt::format("{},{},{},{},{},{}\n", num(c.p), num(c.q), num(c.alphaN), num(c.F), to_string(c.verdict), c.binding);
    counts[std::string(to_string(c.verdict))]++;
    switch (c.verdict) {
      case Verdict::BlowUpTheorem23: blowup.emplace_back(c.p, c.q); break;
      case Verdict::BlowUpWakasugiOnly: wakasugi.emplace_back(c.p, c.q); break;
      case Verdict::NoBlowUpKnown: open.emplace_back(c.p, c.q); break;
      case Verdict::Inadmissible: inadmissible.emplace_back(c.p, c.q); break;
    }
  }

  const CurveTrace trace = trace_critical_curves(spec, 400);
  auto curve = [&](const std::vector<double>& qs) {
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < trace.p.size(); ++i) xy.emplace_back(trace.p[i], qs[i]);
    return xy;
  };
  SvgPlot plot(spec.p_lo, spec.p_hi, spec.q_lo, spec.q_hi);
  plot.points(inadmissible, "#dddddd");
  plot.points(open, "#bbbbbb");
  plot.points(wakasugi, "#f4a261");
  plot.points(blowup, "#e63946");
  plot.polyline(curve(trace.q_alpha_n), "#1d3557", 2.0);
  plot.polyline(curve(trace.q_alpha_nw), "#2a9d8f", 2.0);
  plot.axis_labels("p", "q");
  plot.label(spec.p_lo + 0.02 * (spec.p_hi - spec.p_lo), spec.q_hi - 0.04 * (spec.q_hi - spec.q_lo), fmt::format("n = {}", spec.n));

  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".csv", csv);
  write_file(prefix + ".svg", plot.str());
  json m = meta("region", config);
  m["counts"] = counts;
  write_file(prefix + ".json", m.dump(2) + "\n");
  out << fmt::format("wrote {0}.csv {0}.svg {0}.json ({1} points)\n", prefix, cells.size());
  return 0;
}

int run_curves(const json& config, std::ostream& out) {
  const int n_min = config.at("range").at("n_min").get<int>();
  const int n_max = config.at("range").at("n_max").get<int>();
  if (n_min < 1 || n_max < n_min) throw ConfigError("range: need 1 <= n_min <= n_max");
  const json& w = config.at("window");

  std::string csv = "n,fujita,strauss,p0,diagonal_wakasugi,diagonal_blowup,admissible_cap\n";
  RegionSpec spec;
  spec.p_lo = w.at("p_lo").get<double>();
  spec.p_hi = w.at("p_hi").get<double>();
  spec.q_lo = w.at("q_lo").get<double>();
  spec.q_hi = w.at("q_hi").get<double>();
  const int samples = w.at("samples").get<int>();
  SvgPlot plot(spec.p_lo, spec.p_hi, spec.q_lo, spec.q_hi);
  const char* palette[] = {"#264653", "#2a9d8f", "#e9c46a", "#f4a261", "#e76f51", "#1d3557"};
  for (int n = n_min; n <= n_max; ++n) {
    const double p0 = n >= 2 ? p0_exponent(n) : kInfinity;
    csv += fmt::format("{},{},{},{},{},{},{}\n", n, num(fujita_exponent(n)), num(strauss_exponent(n)), num(p0),
                       num(diagonal_wakasugi_bound(n)), num(diagonal_blowup_bound(n)), num(admissible_cap(n)));
    spec.n = n;
    spec.resolution = 2;
    const CurveTrace trace = trace_critical_curves(spec, samples);
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < trace.p.size(); ++i) xy.emplace_back(trace.p[i], trace.q_alpha_n[i]);
    plot.polyline(xy, palette[(n - n_min) % 6]);
  }
  plot.axis_labels("p", "q");

  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".csv", csv);
  write_file(prefix + ".svg", plot.str());
  write_file(prefix + ".json", meta("curves", config).dump(2) + "\n");
  out << fmt::format("wrote {0}.csv {0}.svg {0}.json\n", prefix);
  return 0;
}

IterationConfig iteration_from(const json& config) {
  IterationConfig it;
  it.params = problem_from(config.at("problem"));
  const json& g = config.at("iteration");
  const auto mode = g.at("mode").get<std::string>();
  if (mode == "prop1") {
    it.init_mode = InitMode::Prop1;
  } else if (mode == "prop2") {
    it.init_mode = InitMode::Prop2;
  } else {
    throw ConfigError(fmt::format("iteration.mode must be 'prop1' or 'prop2', got '{}'", mode));
  }
  const auto constants = g.at("constants").get<std::string>();
  if (constants == "unit") {
    it.constant_mode = ConstantMode::UnitConstants;
  } else if (constants == "explicit") {
    it.constant_mode = ConstantMode::ExplicitConstants;
  } else {
    throw ConfigError(fmt::format("iteration.constants must be 'unit' or 'explicit', got '{}'", constants));
  }
  const json& m = config.at("measured");
  it.measured.c1 = m.at("c1").get<double>();
  it.measured.c4 = m.at("c4").get<double>();
  it.measured.c0_tilde = m.at("c0_tilde").get<double>();
  it.measured.c1_tilde = m.at("c1_tilde").get<double>();
  it.measured.holder_t_max = m.at("holder_t_max").get<double>();
  return it;
}

bool close(double x, double y) { return std::abs(x - y) <= 1e-10 * std::max(1.0, std::abs(y)); }

int run_sequences(const json& config, std::ostream& out) {
  const IterationConfig it = iteration_from(config);
  const int jmax = config.at("iteration").at("jmax").get<int>();
  if (jmax < 1) throw ConfigError("iteration.jmax must be >= 1");
  const ExponentReport report = critical_values(it.params);
  if (!report.admissible) throw ConfigError("sequences: (n, p, q) is not admissible");
  const bool bounds = report.verdict == Verdict::BlowUpTheorem23;

  const auto states = iterate(it, jmax);
  std::string csv = "j,ell_j,L_j,alpha_j,a_j,beta_j,b_j,logD_j,logQ_j,logD_lower,logQ_lower,closed_form\n";
  bool all_ok = true;
  for (const SlicingState& s : states) {
    bool ok = true;
    std::string lower_d, lower_q;
    if (s.j % 2 == 1) {
      const ExponentTuple e = closed_form_exponents(s.j, it);
      ok = close(s.alpha, e.alpha) && close(s.a, e.a) && close(s.beta, e.beta) && close(s.b, e.b);
      if (bounds) {
        const LogLowerBounds lb = log_lower_bounds(s.j, it);
        lower_d = num(lb.logD_lower);
        lower_q = num(lb.logQ_lower);
      }
    } else {
      const auto bb = even_beta_b(s.j, it);
      ok = close(s.beta, bb[0]) && close(s.b, bb[1]);
    }
    all_ok = all_ok && ok;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", s.j, num(s.ell), num(s.L), num(s.alpha), num(s.a),
                       num(s.beta), num(s.b), num(s.logD), num(s.logQ), lower_d, lower_q, ok ? "ok" : "FAIL");
  }

  json m = meta("sequences", config);
  m["closed_form_all_ok"] = all_ok;
  m["verdict"] = std::string(to_string(report.verdict));
  const ProductLimit limit = product_limit(it.params.p * it.params.q);
  m["L"] = limit.value;
  if (bounds) {
    const Thresholds th = thresholds(it);
    const GrowthConstants gc = growth_constants(it);
    m["thresholds"] = {{"j0_raw", finite_or_null(th.j0_raw)}, {"j1_raw", finite_or_null(th.j1_raw)}, {"j0", th.j0}, {"j1", th.j1}};
    m["growth"] = {{"B0", gc.B0},
                   {"B0_tilde", gc.B0_tilde},
                   {"B0_sup", gc.B0_sup},
                   {"B0_tilde_sup", gc.B0_tilde_sup},
                   {"M", gc.M},
                   {"log_E0", gc.log_E0},
                   {"log_E0_tilde", gc.log_E0_tilde},
                   {"log_E1_eps", gc.log_E1_eps},
                   {"log_E1_tilde_eps", gc.log_E1_tilde_eps}};
  }
  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".csv", csv);
  write_file(prefix + ".json", m.dump(2) + "\n");
  out << fmt::format("wrote {0}.csv {0}.json (closed forms {1})\n", prefix, all_ok ? "ok" : "FAIL");
  return 0;
}

int run_testfn(const json& config, std::ostream& out) {
  const json& pg = config.at("problem");
  const int n = pg.at("n").get<int>();
  const double p = pg.at("p").get<double>();
  const double R = pg.at("R").get<double>();
  const json& t = config.at("table");
  const double r_min = t.at("r_min").get<double>();
  const double r_max = t.at("r_max").get<double>();
  const double dr = t.at("dr").get<double>();
  if (r_min < 0.0 || r_max < r_min || !(dr > 0.0)) throw ConfigError("table: need 0 <= r_min <= r_max and dr > 0");
  if (n < 1 || !(p > 1.0) || !(R > 0.0)) throw ConfigError("problem: need n >= 1, p > 1, R > 0");

  const EigenfunctionEvaluator phi(n);
  std::string csv = "r,phi,phi_scaled,asymptotic_ratio\n";
  const int rows = static_cast<int>(std::floor((r_max - r_min) / dr + 1e-9));
  for (int k = 0; k <= rows; ++k) {
    const double r = r_min + k * dr;
    const double scaled = phi.phi_scaled(r);
    csv += fmt::format("{},{},{},{}\n", num(r), num(phi.phi(r)), num(scaled), num(std::pow(r, 0.5 * (n - 1)) * scaled));
  }
  json m = meta("testfn", config);
  m["quadrature_order"] = phi.quadrature_order();
  m["holder_constant"] = calibrate_holder_constant(phi, p, R, t.at("holder_t_max").get<double>());
  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".csv", csv);
  write_file(prefix + ".json", m.dump(2) + "\n");
  out << fmt::format("wrote {0}.csv {0}.json\n", prefix);
  return 0;
}

json blowup_json(const FunctionalTrace& trace) {
  return {{"T_blowup", trace.T_blowup ? json(*trace.T_blowup) : json(nullptr)},
          {"blowup_reason", std::string(to_string(trace.blowup_reason))},
          {"T_blowup_refined", trace.T_blowup_refined ? json(*trace.T_blowup_refined) : json(nullptr)}};
}

int run_simulate(const json& config, std::ostream& out) {
  const ProblemParams params = problem_from(config.at("problem"));
  const InitialDataSpec spec = data_from(config.at("data"));
  const Numerics numerics = numerics_from(config.at("numerics"));
  const int every = config.at("output").at("every").get<int>();
  if (every < 1) throw ConfigError("output.every must be >= 1");
  const FunctionalTrace trace = run(params, spec, numerics);

  std::string csv = "t,U,V,V1,maxu,maxv,res_u,res_v\n";
  const std::size_t count = trace.times.size();
  for (std::size_t k = 0; k < count; ++k) {
    if (k % every != 0 && k + 1 != count) continue;
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(trace.times[k]), num(trace.U[k]), num(trace.V[k]), num(trace.V1[k]),
                       num(trace.maxu[k]), num(trace.maxv[k]), num(trace.res_u[k]), num(trace.res_v[k]));
  }
  json m = meta("simulate", config);
  m["result"] = blowup_json(trace);
  m["result"]["h"] = trace.h;
  m["result"]["dt"] = trace.dt;
  m["result"]["r_max"] = trace.r_max;
  m["result"]["balance_u"] = trace.balance_u;
  m["result"]["balance_v"] = trace.balance_v;
  m["result"]["steps"] = count - 1;
  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".csv", csv);
  write_file(prefix + ".json", m.dump(2) + "\n");
  out << fmt::format("wrote {0}.csv {0}.json (T_blowup = {1})\n", prefix,
                     trace.T_blowup ? fmt::format("{:.6g}", *trace.T_blowup) : std::string("none"));
  return 0;
}

int run_sweep(const json& config, int jobs, std::ostream& out) {
  const ProblemParams params = problem_from(config.at("problem"));
  const InitialDataSpec spec = data_from(config.at("data"));
  const Numerics numerics = numerics_from(config.at("numerics"));
  const json& f = config.at("fit");
  const auto ladder = f.at("ladder").get<std::vector<double>>();
  SweepOptions options;
  options.tol = f.at("tol").get<double>();
  options.refine_check = f.at("refine_check").get<bool>();
  options.refine_tol = f.at("refine_tol").get<double>();
  options.jobs = jobs;
  LifespanFit fit;
  try {
    fit = sweep(params, ladder, numerics, spec, options);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }

  std::string csv = "epsilon,T_blowup,h,threshold\n";
  for (const SweepPoint& point : fit.points) {
    csv += fmt::format("{},{},{},{}\n", num(point.epsilon), point.T_blowup ? num(*point.T_blowup) : std::string(),
                       num(numerics.h), num(numerics.threshold));
  }
  json points = json::array();
  for (const SweepPoint& point : fit.points) {
    points.push_back({{"epsilon", point.epsilon},
                      {"T_blowup", point.T_blowup ? json(*point.T_blowup) : json(nullptr)},
                      {"T_refined", point.T_refined ? json(*point.T_refined) : json(nullptr)},
                      {"refinement_ok", point.refinement_ok}});
  }
  json m = meta("sweep", config);
  m["verdict"] = {{"fitted", fit.fitted ? json(fit.fitted_slope) : json(nullptr)},
                  {"stderr", fit.fitted ? json(fit.slope_stderr) : json(nullptr)},
                  {"predicted", fit.predicted_slope},
                  {"tol", fit.tol},
                  {"consistent", fit.consistent},
                  {"inconclusive", fit.inconclusive},
                  {"missing", fit.missing},
                  {"note", fit.note}};
  m["points"] = points;
  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".csv", csv);
  write_file(prefix + ".json", m.dump(2) + "\n");
  out << fmt::format("wrote {0}.csv {0}.json (fitted {1}, predicted {2:.6g}, consistent={3})\n", prefix,
                     fit.fitted ? fmt::format("{:.6g}", fit.fitted_slope) : std::string("n/a"), fit.predicted_slope,
                     fit.consistent);
  if (fit.inconclusive) {
    out << "inconclusive: " << fit.note << '\n';
    return 3;
  }
  return 0;
}

int run_report(const json& config, std::ostream& out) {
  const ProblemParams params = problem_from(config.at("problem"));
  const ExponentReport r = critical_values(params);
  json m = meta("report", config);
  m["exponents"] = {{"alpha_W", r.alpha_w}, {"alpha_DW", r.alpha_dw}, {"alpha_NW", r.alpha_nw}, {"alpha_0", r.alpha0},
                    {"alpha_1", r.alpha1},  {"alpha_N", r.alphaN},    {"F1", r.F1},             {"F2", r.F2},
                    {"F3", r.F3},           {"F4", r.F4},             {"F", r.F}};
  m["admissible"] = r.admissible;
  m["wakasugi"] = r.wakasugi;
  m["binding"] = r.binding;
  m["verdict"] = std::string(to_string(r.verdict));
  m["reference"] = {{"fujita", fujita_exponent(params.n)},
                    {"strauss", finite_or_null(strauss_exponent(params.n))},
                    {"p0", params.n >= 2 ? json(p0_exponent(params.n)) : json(nullptr)},
                    {"admissible_cap", finite_or_null(admissible_cap(params.n))}};
  if (r.verdict == Verdict::BlowUpTheorem23) {
    IterationConfig it;
    it.params = params;
    const LifespanUpperBound ub = lifespan_upper_bound(it);
    json routes = json::array();
    for (const LifespanRoute& route : ub.routes) {
      routes.push_back({{"F", route.F},
                        {"index", route.index},
                        {"mode", std::string(to_string(route.mode))},
                        {"via", route.via_U ? "U" : "V"},
                        {"active", route.active},
                        {"t_exponent", route.t_exponent},
                        {"E2", finite_or_null(route.E2)},
                        {"bound", finite_or_null(route.bound)}});
    }
    m["lifespan"] = {{"T_upper_unit_constants", finite_or_null(ub.T_ub)},
                     {"binding_F", ub.binding_F},
                     {"exponent", ub.exponent},
                     {"floor", ub.floor},
                     {"routes", routes}};
  }
  const std::string text = m.dump(2) + "\n";
  const std::string prefix = config.at("output").at("out").get<std::string>();
  write_file(prefix + ".json", text);
  out << text;
  return 0;
}

}  // namespace

std::string default_config(const std::string& subcommand) { return defaults_for(subcommand).dump(2); }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blow-up exponents, slicing sequences and simulations for a coupled damped-wave/wave system", "nakao"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Bound {
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    int jobs = 0;
    bool print_config = false;
  };
  std::map<std::string, Bound> bound;
  std::map<std::string, json> defaults;
  for (const auto& name : kSubcommands) {
    defaults[name] = defaults_for(name);
    CLI::App* sub = app.add_subcommand(name);
    Bound& b = bound[name];
    sub->add_option("--config", b.config_path, "JSON config; flags override its values");
    sub->add_option("--jobs", b.jobs, "worker threads (fallback: NAKAO_JOBS)");
    sub->add_flag("--print-config", b.print_config, "print the resolved config and exit");
    for_each_leaf(defaults[name], [&](const std::string& group, const std::string& key, json& leaf) {
      std::string names = "--" + key;
      if (auto alias = kAliases.find(key); alias != kAliases.end()) names += "," + alias->second;
      const std::string help = group.empty() ? key : group + "." + key;
      b.options[key] = sub->add_option(names, b.flags[key], fmt::format("{} (default {})", help, leaf.dump()));
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Bound& b = bound[name];
  json config = defaults[name];
  try {
    if (!b.config_path.empty()) {
      std::ifstream file(b.config_path);
      if (!file) throw ConfigError(fmt::format("cannot read config '{}'", b.config_path));
      json loaded;
      try {
        loaded = json::parse(file);
      } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config '{}': {}", b.config_path, e.what()));
      }
      merge_strict(config, loaded, "");
    }
    for_each_leaf(config, [&](const std::string&, const std::string& key, json& leaf) {
      if (b.options.at(key)->count() > 0) leaf = parse_flag(leaf, key, b.flags.at(key));
    });
    if (b.print_config) {
      out << config.dump(2) << '\n';
      return 0;
    }
    const int jobs = resolved_jobs(b.jobs);
    if (name == "region") return run_region(config, jobs, out);
    if (name == "curves") return run_curves(config, out);
    if (name == "sequences") return run_sequences(config, out);
    if (name == "testfn") return run_testfn(config, out);
    if (name == "simulate") return run_simulate(config, out);
    if (name == "sweep") return run_sweep(config, jobs, out);
    return run_report(config, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return 2;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace nakao

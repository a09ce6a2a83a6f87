#include "specmd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "specmd/pml.hpp"
#include "specmd/tbc.hpp"

#include <json.hpp>

namespace specmd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for " + key + ": '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for " + key + ": '" + v + "'");
  }
}

struct KeyTracker {
  std::set<std::string> seen;
  bool has(const std::string& k) const { return seen.count(k) > 0; }
};

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ExperimentConfig::set_key(const std::string& key, const std::string& value) {
  if (key == "problem") problem = value;
  else if (key == "boundary") boundary = value;
  else if (key == "scheme") {
    if (value == "cn") scheme = Scheme::CN;
    else if (value == "irk4") scheme = Scheme::IRK4;
    else throw ConfigError("unknown scheme '" + value + "' (cn | irk4)");
  } else if (key == "x_l") x_l = parse_double(key, value);
  else if (key == "x_r") x_r = parse_double(key, value);
  else if (key == "n.left") n_left = static_cast<int>(parse_long(key, value));
  else if (key == "n.interior") n_interior = static_cast<int>(parse_long(key, value));
  else if (key == "n.right") n_right = static_cast<int>(parse_long(key, value));
  else if (key == "n_t") n_t = parse_long(key, value);
  else if (key == "t_final") t_final = parse_double(key, value);
  else if (key == "pml.delta") pml_delta = parse_double(key, value);
  else if (key == "pml.sigma0") pml_sigma0 = parse_double(key, value);
  else if (key == "fp.tolerance") fp_tolerance = parse_double(key, value);
  else if (key == "fp.max_iters") fp_max_iters = static_cast<int>(parse_long(key, value));
  else if (key == "observer.stride") observer_stride = parse_long(key, value);
  else if (key == "soliton.a") soliton_a = parse_double(key, value);
  else if (key == "soliton.c") soliton_c = parse_double(key, value);
  else if (key == "perturb.amplitude") perturb_amplitude = parse_double(key, value);
  else if (key == "output.csv") out_csv = value;
  else if (key == "output.json") out_json = value;
  else if (key == "output.field") out_field = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate() const {
  const std::set<std::string> problems{"gaussian", "soliton", "peregrine", "peregrine-perturbed"};
  if (!problems.count(problem)) throw ConfigError("unknown problem '" + problem + "'");
  const std::set<std::string> boundaries{"ced", "pml", "tbc"};
  if (!boundaries.count(boundary)) throw ConfigError("unknown boundary '" + boundary + "'");
  if (!(x_l < x_r)) throw ConfigError("x_l < x_r required");
  if (n_interior < 4) throw ConfigError("n.interior >= 4 required");
  if (n_t < 1) throw ConfigError("n_t >= 1 required");
  if (!(t_final > 0.0)) throw ConfigError("t_final > 0 required");
  if (!(fp_tolerance > 0.0)) throw ConfigError("fp.tolerance > 0 required");
  if (fp_max_iters < 1) throw ConfigError("fp.max_iters >= 1 required");

  const bool peregrine_like = problem == "peregrine" || problem == "peregrine-perturbed";
  if (peregrine_like && boundary != "ced")
    throw ConfigError("problem '" + problem +
                      "' has a nonzero background; only the ced boundary treatment supports it");

  if (boundary == "tbc") {
    if (n_left >= 0 || n_right >= 0)
      throw ConfigError("tbc uses a single domain; n.left / n.right must not be set");
    if (pml_delta >= 0.0 || pml_sigma0 >= 0.0)
      throw ConfigError("pml.* keys are only valid for the pml boundary");
    if (scheme != Scheme::CN) throw ConfigError("tbc supports only the cn scheme");
  } else {
    if (n_left < 1 || n_right < 1)
      throw ConfigError(boundary + " requires n.left and n.right");
    if (boundary == "pml") {
      if (!(pml_delta > 0.0)) throw ConfigError("pml requires pml.delta > 0");
      if (!(pml_sigma0 >= 0.0)) throw ConfigError("pml requires pml.sigma0 >= 0");
    } else if (pml_delta >= 0.0 || pml_sigma0 >= 0.0) {
      throw ConfigError("pml.* keys are only valid for the pml boundary");
    }
  }
}

double ExperimentConfig::problem_speed() const {
  if (problem == "gaussian") return 16.0;
  if (problem == "soliton") return soliton_c;
  return 0.0;
}

namespace {

struct ProblemSetup {
  std::shared_ptr<Decomposition> dec;
  CompositeField u0;
  std::optional<ExactSolution> exact;
  NonlinearDiag nonlinearity;  // null for the linear problem
  bool whole_line = false;     // error window
  bool report_delta = false;
  bool report_delta_inf = false;
  bool report_energy = false;
  double e0 = 0.0;
};

ProblemSetup build_setup(const ExperimentConfig& cfg) {
  ProblemSetup s;
  if (cfg.boundary == "ced") {
    s.dec = std::make_shared<Decomposition>(
        Decomposition::ced(cfg.x_l, cfg.x_r, cfg.n_left, cfg.n_interior, cfg.n_right));
    s.whole_line = true;
  } else if (cfg.boundary == "pml") {
    PmlConfig pml{cfg.pml_delta, cfg.pml_sigma0};
    s.dec = std::make_shared<Decomposition>(
        build_pml_decomposition(cfg.x_l, cfg.x_r, pml, cfg.n_left, cfg.n_interior, cfg.n_right));
  } else {
    s.dec = std::make_shared<Decomposition>(
        Decomposition::single_interval(cfg.x_l, cfg.x_r, cfg.n_interior));
  }

  if (cfg.problem == "gaussian") {
    s.exact = gaussian_solution();
    s.report_delta = true;
    s.report_delta_inf = s.whole_line;
  } else if (cfg.problem == "soliton") {
    s.exact = soliton_solution(cfg.soliton_a, cfg.soliton_c);
    s.nonlinearity = cubic_nonlinearity(-1);
    s.report_delta = true;
    s.report_delta_inf = s.whole_line;
    s.report_energy = s.whole_line;
  } else if (cfg.problem == "peregrine") {
    s.exact = peregrine_solution();
    s.nonlinearity = cubic_nonlinearity(-1);
    s.report_delta_inf = true;
  } else {  // peregrine-perturbed
    s.nonlinearity = cubic_nonlinearity(-1);
    s.report_energy = true;
  }

  if (cfg.problem == "peregrine-perturbed")
    s.u0 = perturbed_peregrine_initial(*s.dec, cfg.perturb_amplitude);
  else
    s.u0 = sample_solution(*s.dec, *s.exact, 0.0);

  if (s.report_energy) {
    s.e0 = energy_functional(s.u0);
    if (std::abs(s.e0) < 1e-8) s.report_energy = false;
  }
  return s;
}

ErrorSample make_sample(const ProblemSetup& s, const ExperimentConfig&, double t,
                        const CompositeField& u) {
  ErrorSample sample;
  sample.t = t;
  if (s.exact) {
    const CompositeField uex = sample_solution(*s.dec, *s.exact, t);
    if (s.report_delta)
      sample.delta = error_delta(u, uex,
                                 s.whole_line ? ErrorWindow::WholeLine : ErrorWindow::Computational);
    if (s.report_delta_inf) sample.delta_inf = error_delta_inf(u, uex);
  }
  if (s.report_energy) {
    const double e = energy_functional(u);
    sample.delta_e = std::abs(1.0 - e / s.e0);
  }
  const Decomposition& dec = *s.dec;
  for (int d = 0; d < dec.domain_count(); ++d) {
    const ZVec coeffs = dec.transform(d).to_coefficients(u.domain(d));
    const std::size_t n = coeffs.size();
    const double tail = std::max(std::abs(coeffs[n - 1]), n > 1 ? std::abs(coeffs[n - 2]) : 0.0);
    const int slot = dec.domain_count() == 1 ? 1 : d;
    sample.tail[slot] = tail;
  }
  return sample;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSetup setup = build_setup(cfg);

  RunResult result;
  result.decomposition = setup.dec;

  CompositeField u = setup.u0;
  const double h = cfg.t_final / static_cast<double>(cfg.n_t);
  const long stride = cfg.stride();

  auto observe = [&](double t, const StepStats& st) {
    ErrorSample sample = make_sample(setup, cfg, t, u);
    result.report.samples.push_back(sample);
    result.prop.max_iterations = std::max(result.prop.max_iterations, st.iterations);
  };

  double iter_sum = 0.0;
  long steps_done = 0;
  try {
    if (cfg.boundary == "tbc") {
      if (setup.nonlinearity) {
        TbcNlsOptions opt;
        opt.rho = -1;
        opt.fp_tolerance = cfg.fp_tolerance;
        opt.fp_max_iters = cfg.fp_max_iters;
        TbcNlsStepper stepper(*setup.dec, h, cfg.n_t, opt);
        stepper.initialize(u);
        observe(0.0, StepStats{});
        for (long s = 1; s <= cfg.n_t; ++s) {
          StepStats st;
          stepper.step(u, &st);
          iter_sum += st.iterations;
          steps_done = s;
          if (s % stride == 0 || s == cfg.n_t) observe(s * h, st);
        }
      } else {
        TbcLinearStepper stepper(*setup.dec, h, cfg.n_t);
        stepper.initialize(u);
        observe(0.0, StepStats{});
        for (long s = 1; s <= cfg.n_t; ++s) {
          StepStats st;
          stepper.step(u, &st);
          iter_sum += st.iterations;
          steps_done = s;
          if (s % stride == 0 || s == cfg.n_t) observe(s * h, st);
        }
      }
      result.prop.steps_done = steps_done;
      result.prop.mean_iterations = cfg.n_t > 0 ? iter_sum / steps_done : 0.0;
    } else {
      std::vector<double> vdiag(setup.dec->total_size(), 0.0);
      CompositeOperator op = assemble(*setup.dec, vdiag);
      SchemeConfig sc{cfg.scheme, h, cfg.n_t, cfg.fp_tolerance, cfg.fp_max_iters};
      StepWorkspace ws(op, sc);
      const NonlinearDiag* nl = setup.nonlinearity ? &setup.nonlinearity : nullptr;
      result.prop = propagate(u, ws, nl, stride,
                              [&](const ObserverContext& ctx) { observe(ctx.t, ctx.stats); });
    }
    result.completed = true;
  } catch (const StepFailure& e) {
    result.failure = e.what();
  } catch (const SingularMatrix& e) {
    result.failure = e.what();
  }

  result.final_field = u;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!cfg.out_csv.empty()) write_csv(result.report, cfg.out_csv);
  if (!cfg.out_json.empty()) write_json_summary(cfg, result, cfg.out_json);
  if (!cfg.out_field.empty()) write_field(result.final_field, cfg.out_field);
  return result;
}

std::string csv_text(const ErrorReport& report) {
  std::string out = "t,delta,delta_inf,delta_E,tail_coeff_I,tail_coeff_II,tail_coeff_III\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  for (const ErrorSample& s : report.samples) {
    out += fmt17(s.t);
    out += ',' + cell(s.delta) + ',' + cell(s.delta_inf) + ',' + cell(s.delta_e);
    for (int d = 0; d < 3; ++d) out += ',' + cell(s.tail[d]);
    out += '\n';
  }
  return out;
}

void write_csv(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv '" + path + "'");
  out << csv_text(report);
}

void write_json_summary(const ExperimentConfig& cfg, const RunResult& result,
                        const std::string& path) {
  nlohmann::json j;
  j["problem"] = cfg.problem;
  j["boundary"] = cfg.boundary;
  j["scheme"] = cfg.scheme == Scheme::CN ? "cn" : "irk4";
  j["x_l"] = cfg.x_l;
  j["x_r"] = cfg.x_r;
  j["n_t"] = cfg.n_t;
  j["t_final"] = cfg.t_final;
  j["orders"] = {cfg.n_left, cfg.n_interior, cfg.n_right};
  if (cfg.boundary == "pml") {
    j["pml"]["delta"] = cfg.pml_delta;
    j["pml"]["sigma0"] = cfg.pml_sigma0;
  }
  j["completed"] = result.completed;
  if (!result.completed) j["failure"] = result.failure;
  j["wall_seconds"] = result.wall_seconds;
  j["steps_done"] = result.prop.steps_done;
  j["iterations"]["max"] = result.prop.max_iterations;
  j["iterations"]["mean"] = result.prop.mean_iterations;
  if (!result.report.samples.empty()) {
    const ErrorSample& s = result.report.samples.back();
    nlohmann::json f;
    f["t"] = s.t;
    if (s.delta) f["delta"] = *s.delta;
    if (s.delta_inf) f["delta_inf"] = *s.delta_inf;
    if (s.delta_e) f["delta_E"] = *s.delta_e;
    j["final"] = f;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write json '" + path + "'");
  out << j.dump(2) << "\n";
}

void write_field(const CompositeField& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write field '" + path + "'");
  out << "x,re,im\n";
  const Decomposition& dec = *u.decomp;
  for (int d = 0; d < dec.domain_count(); ++d) {
    auto xs = dec.physical(d);
    auto vals = u.domain(d);
    for (std::size_t j = 0; j < xs.size(); ++j)
      out << fmt17(xs[j]) << ',' << fmt17(vals[j].real()) << ',' << fmt17(vals[j].imag()) << '\n';
  }
}

ConvergenceResult convergence_study(const ExperimentConfig& cfg,
                                    const std::vector<long>& resolutions) {
  if (resolutions.size() < 2)
    throw ConfigError("convergence study needs at least two resolutions");
  ConvergenceResult res;
  for (long n_t : resolutions) {
    ExperimentConfig c = cfg;
    c.n_t = n_t;
    c.out_csv.clear();
    c.out_json.clear();
    c.out_field.clear();
    const RunResult r = run_experiment(c);
    if (!r.completed) throw std::runtime_error("convergence run failed: " + r.failure);
    const ErrorSample& s = r.final_sample();
    const double err = s.delta ? *s.delta : (s.delta_inf ? *s.delta_inf : 0.0);
    res.points.push_back({n_t, c.t_final / n_t, err});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(res.points.size());
  for (const auto& p : res.points) {
    const double x = std::log(p.h), y = std::log(std::max(p.error, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  for (const auto& p : res.points)
    if (p.error < 1e-12) res.floor_dominated = true;
  return res;
}

SweepResult sigma_sweep(const ExperimentConfig& cfg, const std::vector<double>& sigma_values) {
  if (cfg.boundary != "pml") throw ConfigError("sigma sweep requires a pml config");
  if (sigma_values.empty()) throw ConfigError("sigma sweep needs at least one value");
  const double speed = cfg.problem_speed();
  if (!(speed > 0.0)) throw ConfigError("sigma sweep requires a travelling problem");
  const double t_cross = cfg.x_r / speed;

  SweepResult res;
  for (double sigma : sigma_values) {
    ExperimentConfig c = cfg;
    c.pml_sigma0 = sigma;
    if (!c.out_csv.empty()) {
      auto dot = c.out_csv.rfind('.');
      const std::string suffix = "-sigma" + fmt17(sigma);
      if (dot == std::string::npos) c.out_csv += suffix;
      else c.out_csv.insert(dot, suffix);
    }
    c.out_json.clear();
    c.out_field.clear();
    RunResult r = run_experiment(c);
    if (!r.completed) throw std::runtime_error("sweep run failed: " + r.failure);
    double peak = 0.0;
    for (const ErrorSample& s : r.report.samples) {
      if (s.t < 0.9 * t_cross || s.t > std::min(cfg.t_final, 1.3 * t_cross)) continue;
      if (s.delta) peak = std::max(peak, *s.delta);
    }
    res.entries.push_back({sigma, peak, std::move(r)});
  }
  res.best_sigma0 = res.entries.front().sigma0;
  double best = res.entries.front().peak_error;
  for (const auto& e : res.entries)
    if (e.peak_error < best) {
      best = e.peak_error;
      res.best_sigma0 = e.sigma0;
    }
  return res;
}

}  // namespace specmd

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specmd/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

specmd::ExperimentConfig load_config(const std::string& path,
                                     const std::vector<std::string>& overrides) {
  specmd::ExperimentConfig cfg = specmd::ExperimentConfig::parse_file(path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw specmd::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set_key(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides) {
  const specmd::ExperimentConfig cfg = load_config(path, overrides);
  const specmd::RunResult r = specmd::run_experiment(cfg);
  if (!r.completed) {
    std::fprintf(stderr, "numerical failure: %s (partial output written)\n", r.failure.c_str());
    return kExitNumerical;
  }
  const specmd::ErrorSample& s = r.final_sample();
  std::printf("completed %ld steps in %.2f s (iterations max %d, mean %.2f)\n",
              r.prop.steps_done, r.wall_seconds, r.prop.max_iterations, r.prop.mean_iterations);
  if (s.delta) std::printf("final delta       = %s\n", specmd::fmt17(*s.delta).c_str());
  if (s.delta_inf) std::printf("final delta_inf   = %s\n", specmd::fmt17(*s.delta_inf).c_str());
  if (s.delta_e) std::printf("final delta_E     = %s\n", specmd::fmt17(*s.delta_e).c_str());
  for (int d = 0; d < 3; ++d)
    if (s.tail[d])
      std::printf("tail coeff %s    = %s\n", d == 0 ? "I  " : (d == 1 ? "II " : "III"),
                  specmd::fmt17(*s.tail[d]).c_str());
  return 0;
}

int cmd_converge(const std::string& path, const std::vector<std::string>& overrides,
                 const std::vector<long>& resolutions) {
  const specmd::ExperimentConfig cfg = load_config(path, overrides);
  const specmd::ConvergenceResult res = specmd::convergence_study(cfg, resolutions);
  std::printf("n_t,h,error\n");
  for (const auto& p : res.points)
    std::printf("%ld,%s,%s\n", p.n_t, specmd::fmt17(p.h).c_str(), specmd::fmt17(p.error).c_str());
  std::printf("slope = %.3f%s\n", res.slope,
              res.floor_dominated ? " (floor-dominated fit; slope unreliable)" : "");
  return 0;
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& overrides,
              const std::string& param, const std::vector<double>& values) {
  if (param != "pml.sigma0")
    throw specmd::ConfigError("only pml.sigma0 sweeps are supported, got '" + param + "'");
  const specmd::ExperimentConfig cfg = load_config(path, overrides);
  const specmd::SweepResult res = specmd::sigma_sweep(cfg, values);
  std::printf("sigma0,peak_windowed_delta\n");
  for (const auto& e : res.entries)
    std::printf("%s,%s\n", specmd::fmt17(e.sigma0).c_str(), specmd::fmt17(e.peak_error).c_str());
  std::printf("best sigma0 = %s\n", specmd::fmt17(res.best_sigma0).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"whole-line spectral Schrodinger solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<long> resolutions;
  std::string param;
  std::vector<double> values;

  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--set", overrides, "override config keys (key=value)");

  CLI::App* converge = app.add_subcommand("converge", "time-convergence study");
  converge->add_option("config", config_path, "config file")->required();
  converge->add_option("--resolutions", resolutions, "n_t values")->required()->delimiter(',');
  converge->add_option("--set", overrides, "override config keys (key=value)");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--param", param, "parameter to sweep")->required();
  sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');
  sweep->add_option("--set", overrides, "override config keys (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, overrides);
    if (converge->parsed()) return cmd_converge(config_path, overrides, resolutions);
    if (sweep->parsed()) return cmd_sweep(config_path, overrides, param, values);
  } catch (const specmd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}

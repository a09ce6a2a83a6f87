#pragma once

#include <memory>
#include <optional>
#include <string>

#include "specmd/integrators.hpp"
#include "specmd/problems.hpp"

namespace specmd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value experiment description (dotted keys, one `key = value`
/// pair per line, `#` comments). Exactly the fields required by the chosen
/// boundary treatment may be present.
struct ExperimentConfig {
  std::string problem;   // gaussian | soliton | peregrine | peregrine-perturbed
  std::string boundary;  // ced | pml | tbc
  Scheme scheme = Scheme::CN;
  double x_l = 0.0, x_r = 0.0;
  int n_left = -1, n_interior = -1, n_right = -1;
  long n_t = 0;
  double t_final = 0.0;
  double pml_delta = -1.0, pml_sigma0 = -1.0;
  double fp_tolerance = 1e-8;
  int fp_max_iters = 200;
  long observer_stride = 0;  // 0: n_t / 100
  double soliton_a = 2.0, soliton_c = 15.0;
  double perturb_amplitude = 0.1;
  std::string out_csv, out_json, out_field;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
  void set_key(const std::string& key, const std::string& value);
  void validate() const;

  long stride() const { return observer_stride > 0 ? observer_stride : std::max(1L, n_t / 100); }
  /// Speed of the tracked maximum (boundary-crossing diagnostics).
  double problem_speed() const;
};

struct ErrorSample {
  double t = 0.0;
  std::optional<double> delta, delta_inf, delta_e;
  std::optional<double> tail[3];
};

struct ErrorReport {
  std::vector<ErrorSample> samples;
};

struct RunResult {
  ErrorReport report;
  PropagationReport prop;
  double wall_seconds = 0.0;
  std::shared_ptr<Decomposition> decomposition;
  CompositeField final_field;
  bool completed = false;
  std::string failure;

  const ErrorSample& final_sample() const { return report.samples.back(); }
};

/// Executes the configured experiment, invoking the standard observers
/// (error norms, energy drift, trailing coefficient magnitudes) at the
/// configured stride and writing CSV/JSON/field output when paths are set.
/// Step failures produce a RunResult with completed = false and the samples
/// collected so far (output files are still written, flagged as partial).
RunResult run_experiment(const ExperimentConfig& cfg);

void write_csv(const ErrorReport& report, const std::string& path);
std::string csv_text(const ErrorReport& report);
void write_json_summary(const ExperimentConfig& cfg, const RunResult& result,
                        const std::string& path);
void write_field(const CompositeField& u, const std::string& path);

struct ConvergencePoint {
  long n_t = 0;
  double h = 0.0;
  double error = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  double slope = 0.0;
  bool floor_dominated = false;
};

/// Least-squares log-log slope of the final-time error against h.
ConvergenceResult convergence_study(const ExperimentConfig& cfg,
                                    const std::vector<long>& resolutions);

struct SweepEntry {
  double sigma0 = 0.0;
  double peak_error = 0.0;  // peak windowed delta near the crossing time
  RunResult result;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  double best_sigma0 = 0.0;
};

SweepResult sigma_sweep(const ExperimentConfig& cfg, const std::vector<double>& sigma_values);

/// Round-trip float formatting used for all CSV output.
std::string fmt17(double v);

}  // namespace specmd

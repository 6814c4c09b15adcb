#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udcap/capacity.hpp"
#include "udcap/channel.hpp"
#include "udcap/netgen.hpp"

namespace udcap {

/// Methods selectable from a config. `auto_dispatch` runs FISE for beta <= 1
/// and, for beta > 1, the closed-form estimate computed once at the
/// reference beta and reused.
enum class RunMethod { exact, fise, closed_form, continuous_uniform, auto_dispatch };

std::string to_string(RunMethod m);
RunMethod run_method_from_string(const std::string &name);

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  ScenarioConfig scenario;
  FadingParams fading;
  std::vector<double> beta_grid;
  ClusterSelector cluster = ClusterSelector::closest;
  std::vector<RunMethod> methods;
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  bool record_timing = true;
  double closed_form_reference_beta = 3.0;
  unsigned workers = 0;

  void validate() const;
};

/// Desk-scale defaults: S1 with an expected 300 BSs, M = 9, 50 replications.
ExperimentConfig default_experiment_config();

/// Reads the documented JSON schema on top of the defaults. Unknown keys
/// are rejected with the key name in Error::field().
ExperimentConfig config_from_json(const std::string &text);
ExperimentConfig load_experiment_config(const std::string &path);

struct ResultRow {
  ScenarioKind scenario = ScenarioKind::S1_disk_ppp;
  double beta = 0.0;
  ClusterSelector cluster = ClusterSelector::closest;
  Method method = Method::exact;
  double capacity_mean = 0.0;
  double capacity_std = 0.0;
  std::optional<double> rel_err;
  double wall_time_s = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

/// Stream id offset for grid point `beta_index`; every method at the same
/// grid point sees the same layouts and fading draws.
std::uint64_t beta_stream_base(std::size_t beta_index);

/// Estimator callable for a concrete method.
Estimator make_estimator(Method method);

std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg);

inline const char *kCsvHeader =
    "scenario,beta,cluster,method,capacity_mean,capacity_std,rel_err,wall_time_s,reps,seed";

std::string format_csv(const std::vector<ResultRow> &rows);
std::string format_json(const std::vector<ResultRow> &rows);
std::vector<ResultRow> parse_csv(const std::string &text);

void emit_results(const std::vector<ResultRow> &rows, const std::string &path,
                  OutputFormat format);

// --- complexity evidence ----------------------------------------------------

/// Single cluster of J_m BSs and K_m users in a disk, with K_out interferers
/// in the surrounding annulus; used to time the estimators at chosen sizes.
struct SyntheticCluster {
  ChannelInstance channel;
  Index total_users = 0;
};
SyntheticCluster make_synthetic_cluster(Index J_m, Index K_m, Index K_out,
                                        const FadingParams &params,
                                        RngStream &stream);

struct LadderPoint {
  Index J_m = 0;
  Index R = 0;
  double trace = 0.0;
  double fise_seconds = 0.0;  // per call, trace precomputed
  double exact_seconds = 0.0; // per call
  std::size_t fise_ops = 0;   // FiseWork total per call
};

std::vector<LadderPoint> complexity_ladder(const std::vector<Index> &J_ladder,
                                           const FadingParams &params,
                                           std::uint64_t seed);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(const std::vector<double> &x, const std::vector<double> &y);

} // namespace udcap

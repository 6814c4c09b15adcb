#include "udcap/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "udcap/closed_form.hpp"
#include "udcap/fise.hpp"

namespace udcap {

using nlohmann::json;

std::string to_string(RunMethod m) {
  switch (m) {
  case RunMethod::exact:
    return "exact";
  case RunMethod::fise:
    return "fise";
  case RunMethod::closed_form:
    return "closed_form";
  case RunMethod::continuous_uniform:
    return "continuous";
  case RunMethod::auto_dispatch:
    return "auto";
  }
  return "exact";
}

RunMethod run_method_from_string(const std::string &name) {
  if (name == "auto" || name == "auto-paper" || name == "auto_dispatch")
    return RunMethod::auto_dispatch;
  switch (method_from_string(name)) {
  case Method::exact:
    return RunMethod::exact;
  case Method::fise:
    return RunMethod::fise;
  case Method::closed_form:
    return RunMethod::closed_form;
  case Method::continuous_uniform:
    return RunMethod::continuous_uniform;
  }
  return RunMethod::exact;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  fading.validate();
  if (reps < 1)
    throw Error("config", "reps", "reps must be at least 1");
  if (beta_grid.empty())
    throw Error("config", "beta_grid", "beta_grid must not be empty");
  for (double b : beta_grid)
    if (!(b > 0.0) || !std::isfinite(b))
      throw Error("config", "beta_grid", "every beta must be positive");
  if (methods.empty())
    throw Error("config", "methods", "methods must not be empty");
  if (!(closed_form_reference_beta > 1.0))
    throw Error("config", "closed_form_reference_beta",
                "closed-form reference beta must exceed 1");
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.scenario.kind = ScenarioKind::S1_disk_ppp;
  cfg.scenario.D = 1000.0;
  cfg.scenario.lambda_b = 300.0 / (std::numbers::pi * cfg.scenario.D * cfg.scenario.D);
  cfg.scenario.M = 9;
  cfg.scenario.mu = 0.0;
  cfg.scenario.sigma = 600.0;
  cfg.scenario.J_total = 300;
  cfg.beta_grid = {0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 4.0};
  cfg.methods = {RunMethod::exact, RunMethod::auto_dispatch};
  cfg.reps = 50;
  cfg.seed = 1;
  cfg.output_path = "results.csv";
  return cfg;
}

namespace {

template <typename T>
T get_field(const json &obj, const std::string &key, const std::string &path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw Error("config", path + key, "invalid value for '" + path + key + "': " + e.what());
  }
}

void reject_unknown(const json &obj, const std::set<std::string> &known,
                    const std::string &path) {
  if (!obj.is_object())
    throw Error("config", path.empty() ? "<root>" : path, "expected a JSON object");
  for (const auto &item : obj.items())
    if (!known.count(item.key()))
      throw Error("config", path + item.key(), "unknown config key '" + path + item.key() + "'");
}

void read_scenario(const json &s, ScenarioConfig &out) {
  reject_unknown(s, {"kind", "D", "lambda_b", "expected_bs", "J_total", "mu", "sigma", "M"},
                 "scenario.");
  if (s.contains("kind"))
    out.kind = scenario_kind_from_string(get_field<std::string>(s, "kind", "scenario."));
  if (s.contains("D"))
    out.D = get_field<double>(s, "D", "scenario.");
  if (s.contains("lambda_b") && s.contains("expected_bs"))
    throw Error("config", "scenario.lambda_b", "give either lambda_b or expected_bs, not both");
  if (s.contains("lambda_b"))
    out.lambda_b = get_field<double>(s, "lambda_b", "scenario.");
  if (s.contains("expected_bs"))
    out.lambda_b = get_field<double>(s, "expected_bs", "scenario.") /
                   (std::numbers::pi * out.D * out.D);
  if (s.contains("J_total"))
    out.J_total = get_field<std::uint64_t>(s, "J_total", "scenario.");
  if (s.contains("mu"))
    out.mu = get_field<double>(s, "mu", "scenario.");
  if (s.contains("sigma"))
    out.sigma = get_field<double>(s, "sigma", "scenario.");
  if (s.contains("M"))
    out.M = get_field<Index>(s, "M", "scenario.");
}

void read_fading(const json &f, FadingParams &out) {
  reject_unknown(f, {"d0", "d1", "P", "N0", "log_base"}, "fading.");
  if (f.contains("d0"))
    out.d0 = get_field<double>(f, "d0", "fading.");
  if (f.contains("d1"))
    out.d1 = get_field<double>(f, "d1", "fading.");
  if (f.contains("P"))
    out.P = get_field<double>(f, "P", "fading.");
  if (f.contains("N0"))
    out.N0 = get_field<double>(f, "N0", "fading.");
  if (f.contains("log_base")) {
    const auto base = get_field<std::string>(f, "log_base", "fading.");
    if (base == "bits" || base == "2")
      out.log_base = LogBase::bits;
    else if (base == "nats" || base == "e")
      out.log_base = LogBase::nats;
    else
      throw Error("config", "fading.log_base", "log_base must be 'bits' or 'nats'");
  }
}

OutputFormat format_from_string(const std::string &name) {
  if (name == "csv")
    return OutputFormat::csv;
  if (name == "json")
    return OutputFormat::json;
  throw Error("config", "format", "format must be 'csv' or 'json'");
}

} // namespace

ExperimentConfig config_from_json(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw Error("config", "<root>", std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"scenario", "fading", "beta_grid", "cluster", "methods", "reps", "seed",
                  "output", "format", "record_timing", "closed_form_reference_beta",
                  "workers"},
                 "");
  ExperimentConfig cfg = default_experiment_config();
  if (doc.contains("scenario"))
    read_scenario(doc.at("scenario"), cfg.scenario);
  if (doc.contains("fading"))
    read_fading(doc.at("fading"), cfg.fading);
  if (doc.contains("beta_grid"))
    cfg.beta_grid = get_field<std::vector<double>>(doc, "beta_grid", "");
  if (doc.contains("cluster"))
    cfg.cluster = cluster_selector_from_string(get_field<std::string>(doc, "cluster", ""));
  if (doc.contains("methods")) {
    cfg.methods.clear();
    for (const auto &name : get_field<std::vector<std::string>>(doc, "methods", ""))
      cfg.methods.push_back(run_method_from_string(name));
  }
  if (doc.contains("reps"))
    cfg.reps = get_field<std::size_t>(doc, "reps", "");
  if (doc.contains("seed"))
    cfg.seed = get_field<std::uint64_t>(doc, "seed", "");
  if (doc.contains("output"))
    cfg.output_path = get_field<std::string>(doc, "output", "");
  if (doc.contains("format"))
    cfg.format = format_from_string(get_field<std::string>(doc, "format", ""));
  if (doc.contains("record_timing"))
    cfg.record_timing = get_field<bool>(doc, "record_timing", "");
  if (doc.contains("closed_form_reference_beta"))
    cfg.closed_form_reference_beta = get_field<double>(doc, "closed_form_reference_beta", "");
  if (doc.contains("workers"))
    cfg.workers = get_field<unsigned>(doc, "workers", "");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("io", "config", "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::uint64_t beta_stream_base(std::size_t beta_index) {
  return static_cast<std::uint64_t>(beta_index) << 32;
}

Estimator make_estimator(Method method) {
  switch (method) {
  case Method::exact:
    return [](const ReplicationContext &ctx) {
      return exact_capacity_once(ctx.channel(), ctx.fading());
    };
  case Method::fise:
    return [](const ReplicationContext &ctx) {
      return fise_capacity(ctx.channel(), ctx.total_users(), ctx.fading());
    };
  case Method::closed_form:
    return [](const ReplicationContext &ctx) {
      return closed_form_capacity(ctx.nodes(), ctx.clustering(), ctx.cluster(), ctx.fading());
    };
  case Method::continuous_uniform:
    return [](const ReplicationContext &ctx) {
      return continuous_uniform_cluster(ctx.scenario(), ctx.nodes(), ctx.clustering(),
                                        ctx.cluster(), ctx.fading());
    };
  }
  throw Error("config", "method", "unsupported method");
}

namespace {

struct CellResult {
  MonteCarloResult mc;
  double seconds = 0.0;
};

CellResult run_cell(const ExperimentConfig &cfg, double beta, std::uint64_t stream_base,
                    Method method) {
  ScenarioConfig scenario = cfg.scenario;
  scenario.beta = beta;
  const RngStream base(cfg.seed, stream_base);
  const auto start = std::chrono::steady_clock::now();
  CellResult out;
  out.mc = monte_carlo_capacity(scenario, cfg.cluster, cfg.fading, cfg.reps, base,
                                make_estimator(method), cfg.workers);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

} // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg) {
  cfg.validate();
  const bool has_exact =
      std::find(cfg.methods.begin(), cfg.methods.end(), RunMethod::exact) != cfg.methods.end();

  // The reference closed-form cell shares streams with the matching grid
  // point when there is one.
  std::uint64_t reference_base = beta_stream_base(cfg.beta_grid.size());
  for (std::size_t i = 0; i < cfg.beta_grid.size(); ++i)
    if (cfg.beta_grid[i] == cfg.closed_form_reference_beta)
      reference_base = beta_stream_base(i);
  std::optional<CellResult> reference;

  std::vector<ResultRow> rows;
  for (std::size_t bi = 0; bi < cfg.beta_grid.size(); ++bi) {
    const double beta = cfg.beta_grid[bi];
    const std::size_t first_row = rows.size();
    std::optional<double> exact_mean;

    for (RunMethod rm : cfg.methods) {
      ResultRow row;
      row.scenario = cfg.scenario.kind;
      row.beta = beta;
      row.cluster = cfg.cluster;
      row.reps = cfg.reps;
      row.seed = cfg.seed;

      CellResult cell;
      if (rm == RunMethod::auto_dispatch && beta > 1.0) {
        row.method = Method::closed_form;
        if (!reference) {
          reference = run_cell(cfg, cfg.closed_form_reference_beta, reference_base,
                               Method::closed_form);
          cell = *reference;
        } else {
          cell = *reference;
          cell.seconds = 0.0;
        }
      } else {
        switch (rm) {
        case RunMethod::exact:
          row.method = Method::exact;
          break;
        case RunMethod::fise:
        case RunMethod::auto_dispatch:
          row.method = Method::fise;
          break;
        case RunMethod::closed_form:
          row.method = Method::closed_form;
          break;
        case RunMethod::continuous_uniform:
          row.method = Method::continuous_uniform;
          break;
        }
        cell = run_cell(cfg, beta, beta_stream_base(bi), row.method);
      }

      row.capacity_mean = cell.mc.mean;
      row.capacity_std = cell.mc.stddev;
      row.wall_time_s = cfg.record_timing ? cell.seconds : 0.0;
      if (rm == RunMethod::exact)
        exact_mean = cell.mc.mean;
      rows.push_back(row);
    }

    if (has_exact) {
      for (std::size_t r = first_row; r < rows.size(); ++r)
        rows[r].rel_err = std::abs(rows[r].capacity_mean - *exact_mean) / *exact_mean;
    }
  }
  return rows;
}

namespace {

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double round10(double v) { return std::stod(fmt10(v)); }

} // namespace

std::string format_csv(const std::vector<ResultRow> &rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto &r : rows) {
    out += to_string(r.scenario) + ',' + fmt10(r.beta) + ',' + to_string(r.cluster) + ',' +
           to_string(r.method) + ',' + fmt10(r.capacity_mean) + ',' + fmt10(r.capacity_std) +
           ',' + (r.rel_err ? fmt10(*r.rel_err) : std::string()) + ',' + fmt10(r.wall_time_s) +
           ',' + std::to_string(r.reps) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string format_json(const std::vector<ResultRow> &rows) {
  json arr = json::array();
  for (const auto &r : rows) {
    json obj;
    obj["scenario"] = to_string(r.scenario);
    obj["beta"] = round10(r.beta);
    obj["cluster"] = to_string(r.cluster);
    obj["method"] = to_string(r.method);
    obj["capacity_mean"] = round10(r.capacity_mean);
    obj["capacity_std"] = round10(r.capacity_std);
    obj["rel_err"] = r.rel_err ? json(round10(*r.rel_err)) : json(nullptr);
    obj["wall_time_s"] = round10(r.wall_time_s);
    obj["reps"] = r.reps;
    obj["seed"] = r.seed;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::vector<ResultRow> parse_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw Error("io", "header", "unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ','))
      f.push_back(cell);
    if (f.size() == 9)
      f.emplace_back();
    if (f.size() != 10)
      throw Error("io", "row", "CSV row has " + std::to_string(f.size()) + " fields");
    ResultRow r;
    r.scenario = scenario_kind_from_string(f[0]);
    r.beta = std::stod(f[1]);
    r.cluster = cluster_selector_from_string(f[2]);
    r.method = method_from_string(f[3]);
    r.capacity_mean = std::stod(f[4]);
    r.capacity_std = std::stod(f[5]);
    if (!f[6].empty())
      r.rel_err = std::stod(f[6]);
    r.wall_time_s = std::stod(f[7]);
    r.reps = std::stoull(f[8]);
    r.seed = std::stoull(f[9]);
    rows.push_back(r);
  }
  return rows;
}

void emit_results(const std::vector<ResultRow> &rows, const std::string &path,
                  OutputFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("io", "output", "cannot open output file '" + path + "'");
  out << (format == OutputFormat::csv ? format_csv(rows) : format_json(rows));
  if (!out)
    throw Error("io", "output", "failed writing output file '" + path + "'");
}

// --- complexity evidence ----------------------------------------------------

SyntheticCluster make_synthetic_cluster(Index J_m, Index K_m, Index K_out,
                                        const FadingParams &params, RngStream &stream) {
  // Constant node density: the cluster disk grows with sqrt(J_m).
  const double radius = 20.0 * std::sqrt(static_cast<double>(J_m));
  auto disk_points = [&](Index n, double r_in, double r_out) {
    Points2 pts(2, n);
    for (Index i = 0; i < n; ++i) {
      const double u = stream.uniform();
      const double r = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
      const double t = 2.0 * std::numbers::pi * stream.uniform();
      pts(0, i) = r * std::cos(t);
      pts(1, i) = r * std::sin(t);
    }
    return pts;
  };
  const Points2 bs = disk_points(J_m, 0.0, radius);
  const Points2 users = disk_points(K_m, 0.0, radius);
  const Points2 others = disk_points(K_out, radius, 3.0 * radius);

  MatrixXd L = gain_matrix(bs, users, params);
  MatrixXcd G(J_m, K_m);
  fill_complex_gaussian(stream, G);
  MatrixXcd H_out(J_m, K_out);
  fill_complex_gaussian(stream, H_out);
  H_out = H_out.cwiseProduct(gain_matrix(bs, others, params).cast<std::complex<double>>());
  return {assemble_channel(std::move(L), std::move(G), H_out, params), K_m + K_out};
}

namespace {

// Iterations needed for one batch of `fn` to take at least `seconds`.
template <typename Fn>
std::size_t calibrate(Fn &&fn, double seconds) {
  using clock = std::chrono::steady_clock;
  for (std::size_t iters = 1;; iters *= 2) {
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < iters; ++i)
      fn();
    if (std::chrono::duration<double>(clock::now() - t0).count() >= seconds)
      return iters;
  }
}

template <typename Fn>
double batch_seconds_per_call(Fn &&fn, std::size_t iters) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < iters; ++i)
    fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         static_cast<double>(iters);
}

} // namespace

std::vector<LadderPoint> complexity_ladder(const std::vector<Index> &J_ladder,
                                           const FadingParams &params, std::uint64_t seed) {
  constexpr double kBatchSeconds = 0.02;
  constexpr int kRounds = 15;

  std::vector<SyntheticCluster> clusters;
  std::vector<LadderPoint> out;
  for (std::size_t i = 0; i < J_ladder.size(); ++i) {
    const Index J = J_ladder[i];
    RngStream stream(seed, i);
    clusters.push_back(make_synthetic_cluster(J, J / 2, 4 * J, params, stream));
    const auto &ch = clusters.back().channel;
    LadderPoint p;
    p.J_m = J;
    p.R = std::min(ch.J_m, ch.K_m);
    p.trace = sinr_trace(ch, params);
    FiseWork work;
    fise_from_trace(p.trace, ch.J_m, ch.K_m, clusters.back().total_users, params.log_base, &work);
    p.fise_ops = work.log_evals + work.density_evals;
    p.fise_seconds = p.exact_seconds = std::numeric_limits<double>::infinity();
    out.push_back(p);
  }

  volatile double sink = 0.0;
  std::vector<std::function<void()>> fise_calls, exact_calls;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto *c = &clusters[i];
    const auto *p = &out[i];
    fise_calls.push_back([c, p, &params, &sink] {
      sink = sink + fise_from_trace(p->trace, c->channel.J_m, c->channel.K_m, c->total_users,
                                    params.log_base)
                        .value;
    });
    exact_calls.push_back(
        [c, &params, &sink] { sink = sink + exact_capacity_once(c->channel, params).value; });
  }
  std::vector<std::size_t> fise_iters, exact_iters;
  for (std::size_t i = 0; i < out.size(); ++i) {
    fise_iters.push_back(calibrate(fise_calls[i], kBatchSeconds));
    exact_iters.push_back(calibrate(exact_calls[i], kBatchSeconds));
  }
  // Interleaved rounds, minimum per point: slow drifts and interruptions hit
  // every ladder point alike and are filtered out by the minimum.
  for (int round = 0; round < kRounds; ++round)
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].fise_seconds =
          std::min(out[i].fise_seconds, batch_seconds_per_call(fise_calls[i], fise_iters[i]));
      out[i].exact_seconds =
          std::min(out[i].exact_seconds, batch_seconds_per_call(exact_calls[i], exact_iters[i]));
    }
  return out;
}

double linear_fit_r2(const std::vector<double> &x, const std::vector<double> &y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2)
    throw Error("domain", "x", "linear fit needs at least two paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0)
    return 1.0;
  return (sxy * sxy) / (sxx * syy);
}

} // namespace udcap

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "udcap/harness.hpp"

namespace {

void print_error(const std::string &kind, const std::string &field, const std::string &message) {
  nlohmann::json line{{"error", kind}, {"field", field}, {"message", message}};
  std::cerr << line.dump() << '\n';
}

std::vector<std::string> split_commas(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

int run_ladder(const std::vector<udcap::Index> &ladder, std::uint64_t seed) {
  const auto points = udcap::complexity_ladder(ladder, udcap::FadingParams{}, seed);
  std::printf("J_m,R,trace,fise_seconds,exact_seconds,fise_ops\n");
  for (const auto &p : points)
    std::printf("%ld,%ld,%.10g,%.10g,%.10g,%zu\n", static_cast<long>(p.J_m),
                static_cast<long>(p.R), p.trace, p.fise_seconds, p.exact_seconds, p.fise_ops);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Per-cluster uplink capacity simulator for clustered ultra-dense networks"};
  app.require_subcommand(0, 1);

  std::string config_path, scenario, betas, cluster, methods, out, format;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool no_timing = false;

  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--scenario", scenario, "S1 or S2");
  app.add_option("--beta", betas, "comma separated beta grid");
  app.add_option("--reps", reps, "Monte-Carlo replications");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--cluster", cluster, "closest|median|furthest");
  app.add_option("--method", methods, "exact|fise|closed_form|continuous|auto, comma separated");
  app.add_option("--out", out, "output path ('-' for stdout)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--workers", workers, "worker threads (default: UDCAP_WORKERS or all cores)");
  app.add_flag("--no-timing", no_timing, "write 0 in wall_time_s for reproducible output");

  auto *ladder_cmd = app.add_subcommand("ladder", "time FISE and the exact baseline on a J_m ladder");
  std::vector<udcap::Index> ladder{32, 64, 128, 256};
  std::uint64_t ladder_seed = 7;
  ladder_cmd->add_option("--sizes", ladder, "J_m values")->delimiter(',');
  ladder_cmd->add_option("--seed", ladder_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    print_error("config", "argv", e.what());
    return 2;
  }

  try {
    if (*ladder_cmd)
      return run_ladder(ladder, ladder_seed);

    auto cfg = config_path.empty() ? udcap::default_experiment_config()
                                   : udcap::load_experiment_config(config_path);
    if (!scenario.empty())
      cfg.scenario.kind = udcap::scenario_kind_from_string(scenario);
    if (!betas.empty()) {
      cfg.beta_grid.clear();
      for (const auto &b : split_commas(betas)) {
        try {
          cfg.beta_grid.push_back(std::stod(b));
        } catch (const std::exception &) {
          throw udcap::Error("config", "beta", "not a number: '" + b + "'");
        }
      }
    }
    if (app.count("--reps"))
      cfg.reps = reps;
    if (app.count("--seed"))
      cfg.seed = seed;
    if (!cluster.empty())
      cfg.cluster = udcap::cluster_selector_from_string(cluster);
    if (!methods.empty()) {
      cfg.methods.clear();
      for (const auto &m : split_commas(methods))
        cfg.methods.push_back(udcap::run_method_from_string(m));
    }
    if (!out.empty())
      cfg.output_path = out;
    if (format == "csv")
      cfg.format = udcap::OutputFormat::csv;
    else if (format == "json")
      cfg.format = udcap::OutputFormat::json;
    else if (!format.empty())
      throw udcap::Error("config", "format", "format must be 'csv' or 'json'");
    if (app.count("--workers"))
      cfg.workers = workers;
    if (no_timing)
      cfg.record_timing = false;

    const auto rows = udcap::run_experiment(cfg);
    if (cfg.output_path == "-")
      std::cout << (cfg.format == udcap::OutputFormat::csv ? udcap::format_csv(rows)
                                                           : udcap::format_json(rows));
    else
      udcap::emit_results(rows, cfg.output_path, cfg.format);
    return 0;
  } catch (const udcap::Error &e) {
    print_error(e.kind(), e.field(), e.what());
  } catch (const std::exception &e) {
    print_error("internal", "", e.what());
  }
  return 1;
}

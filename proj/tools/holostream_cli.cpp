#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holostream/config.hpp"
#include "holostream/experiments.hpp"

namespace {

using holostream::ExperimentConfig;
using holostream::Scheme;

struct CommonOptions {
  std::string config_path = "configs/default.ini";
  std::int64_t seed = -1;  // negative = keep the configured seed
  std::string out_dir = "out";
  std::string scheme_list;
};

void add_common(CLI::App& cmd, CommonOptions& opts, bool with_config = true) {
  if (with_config) {
    cmd.add_option("-c,--config", opts.config_path,
                   "experiment configuration file")
        ->capture_default_str();
    cmd.add_option("-s,--seed", opts.seed,
                   "override the configured base seed");
  }
  cmd.add_option("-o,--out", opts.out_dir, "output directory")
      ->capture_default_str();
}

ExperimentConfig load(const CommonOptions& opts) {
  ExperimentConfig cfg = holostream::load_experiment_config(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  return cfg;
}

std::vector<Scheme> parse_scheme_list(const std::string& list) {
  std::vector<Scheme> schemes;
  std::string item;
  std::istringstream stream(list);
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) schemes.push_back(holostream::parse_scheme(item));
  }
  if (schemes.empty()) {
    throw std::runtime_error("empty scheme list '" + list + "'");
  }
  return schemes;
}

int cmd_train(const CommonOptions& opts) {
  ExperimentConfig cfg = load(opts);
  if (!opts.scheme_list.empty()) {
    cfg.train.schemes = parse_scheme_list(opts.scheme_list);
    cfg.validate();
  }
  const holostream::TrainingArtifacts art =
      holostream::run_training(cfg, opts.out_dir, &std::cout);
  const std::string csv = opts.out_dir + "/convergence.csv";
  holostream::write_convergence_csv(csv, art.convergence);
  std::cout << "wrote " << csv << "\n";
  for (const std::string& path : art.checkpoints) {
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

int cmd_evaluate(const CommonOptions& opts, const std::string& ckpt_dir,
                 int workers) {
  ExperimentConfig cfg = load(opts);
  const std::vector<Scheme> schemes = opts.scheme_list.empty()
                                          ? cfg.sweep.schemes
                                          : parse_scheme_list(opts.scheme_list);
  const std::string dir = ckpt_dir.empty() ? opts.out_dir : ckpt_dir;
  const std::vector<holostream::ResultRow> rows =
      holostream::run_evaluation(cfg, schemes, dir, workers);
  std::filesystem::create_directories(opts.out_dir);
  const std::string csv = opts.out_dir + "/evaluate_results.csv";
  holostream::write_result_csv(csv, rows);
  std::cout << holostream::report_summary(rows) << "wrote " << csv << "\n";
  return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::string& ckpt_dir,
              const std::string& variable, int workers) {
  ExperimentConfig cfg = load(opts);
  const std::vector<Scheme> schemes = opts.scheme_list.empty()
                                          ? cfg.sweep.schemes
                                          : parse_scheme_list(opts.scheme_list);
  const std::string dir = ckpt_dir.empty() ? opts.out_dir : ckpt_dir;

  std::vector<holostream::SweepVariable> variables;
  if (variable == "all") {
    variables = {holostream::SweepVariable::kBandwidth,
                 holostream::SweepVariable::kDeadline,
                 holostream::SweepVariable::kCycles};
  } else {
    variables = {holostream::parse_sweep_variable(variable)};
  }

  std::vector<holostream::ResultRow> rows;
  for (holostream::SweepVariable var : variables) {
    holostream::SweepSpec spec;
    spec.variable = var;
    spec.schemes = schemes;
    spec.episodes_per_point = cfg.sweep.episodes_per_point;
    spec.seeds = cfg.sweep.seeds;
    switch (var) {
      case holostream::SweepVariable::kBandwidth:
        spec.values = cfg.sweep.bandwidth_grid;
        break;
      case holostream::SweepVariable::kDeadline:
        spec.values = cfg.sweep.deadline_grid;
        break;
      case holostream::SweepVariable::kCycles:
        spec.values = cfg.sweep.cycles_grid;
        break;
      case holostream::SweepVariable::kDiscount:
        spec.values = cfg.train.discounts;
        spec.schemes.clear();
        for (Scheme scheme : schemes) {
          if (holostream::scheme_is_learned(scheme)) {
            spec.schemes.push_back(scheme);
          }
        }
        break;
    }
    std::cout << "sweeping " << holostream::sweep_variable_name(var) << " over "
              << spec.values.size() << " values\n";
    std::vector<holostream::ResultRow> part =
        holostream::run_sweep(cfg, spec, dir, workers);
    rows.insert(rows.end(), part.begin(), part.end());
  }

  std::filesystem::create_directories(opts.out_dir);
  const std::string csv = opts.out_dir + "/sweep_results.csv";
  holostream::write_result_csv(csv, rows);
  std::cout << holostream::report_summary(rows) << "wrote " << csv << "\n";
  return 0;
}

int cmd_report(const CommonOptions& opts, const std::string& results_path,
               const std::string& convergence_path) {
  const std::string results =
      results_path.empty() ? opts.out_dir + "/sweep_results.csv" : results_path;
  const std::string convergence = convergence_path.empty()
                                      ? opts.out_dir + "/convergence.csv"
                                      : convergence_path;
  std::vector<holostream::ResultRow> rows;
  std::vector<holostream::ConvergenceRow> curves;
  if (std::filesystem::exists(results)) {
    rows = holostream::read_result_csv(results);
  }
  if (std::filesystem::exists(convergence)) {
    curves = holostream::read_convergence_csv(convergence);
  }
  const holostream::ReportFiles files =
      holostream::emit_report(curves, rows, opts.out_dir);
  for (const std::string& path :
       {files.fig2, files.fig3, files.fig4, files.fig5}) {
    if (!path.empty()) std::cout << "wrote " << path << "\n";
  }
  if (!rows.empty()) std::cout << holostream::report_summary(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative multi-AP holographic streaming experiments"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  CLI::App* train = app.add_subcommand("train", "fit the learned schemes");
  add_common(*train, train_opts);
  train->add_option("--schemes", train_opts.scheme_list,
                    "comma-separated subset of learned schemes");

  CommonOptions eval_opts;
  std::string eval_ckpt;
  int eval_workers = 0;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score schemes at the operating point");
  add_common(*evaluate, eval_opts);
  evaluate->add_option("--schemes", eval_opts.scheme_list,
                       "comma-separated scheme subset");
  evaluate->add_option("--ckpt", eval_ckpt,
                       "checkpoint directory (defaults to --out)");
  evaluate->add_option("--workers", eval_workers,
                       "worker threads (0 = hardware)");

  CommonOptions sweep_opts;
  std::string sweep_ckpt;
  std::string sweep_variable = "all";
  int sweep_workers = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "grid-evaluate the schemes");
  add_common(*sweep, sweep_opts);
  sweep->add_option("--schemes", sweep_opts.scheme_list,
                    "comma-separated scheme subset");
  sweep->add_option("--ckpt", sweep_ckpt,
                    "checkpoint directory (defaults to --out)");
  sweep->add_option("--variable", sweep_variable,
                    "W, tau, C_max, discount, or all")
      ->capture_default_str();
  sweep->add_option("--workers", sweep_workers, "worker threads (0 = hardware)");

  CommonOptions report_opts;
  std::string report_results;
  std::string report_convergence;
  CLI::App* report =
      app.add_subcommand("report", "write per-figure CSV files from results");
  add_common(*report, report_opts, /*with_config=*/false);
  report->add_option("--results", report_results,
                     "result CSV (defaults to <out>/sweep_results.csv)");
  report->add_option("--convergence", report_convergence,
                     "convergence CSV (defaults to <out>/convergence.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_opts);
    if (evaluate->parsed()) return cmd_evaluate(eval_opts, eval_ckpt,
                                                eval_workers);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_opts, sweep_ckpt, sweep_variable, sweep_workers);
    }
    if (report->parsed()) {
      return cmd_report(report_opts, report_results, report_convergence);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}

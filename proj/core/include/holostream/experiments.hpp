#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holostream/config.hpp"
#include "holostream/environment.hpp"

namespace holostream {

// One evaluated episode of one scheme at one sweep point. `variable` is the
// swept knob ("W", "tau", "C_max", "discount", or "operating" for the plain
// evaluation verb) and `value` its SI magnitude (Hz, s, cycles/s; the
// discount itself; 0 for "operating"). `qoe` is the episode's summed slot
// rewards. `wall_time` is measured and therefore the one column that is not
// reproducible byte-for-byte.
struct ResultRow {
  std::string scheme;
  std::string variable;
  double value = 0.0;
  std::uint64_t seed = 0;
  int episode = 0;
  double qoe = 0.0;
  double feasible_fraction = 0.0;
  double wall_time = 0.0;
};

// One training episode of one (scheme, discount) run, for convergence curves.
struct ConvergenceRow {
  std::string scheme;
  double discount = 0.0;
  int episode = 0;
  double reward = 0.0;
  double feasible_fraction = 0.0;
};

enum class SweepVariable { kBandwidth, kDeadline, kCycles, kDiscount };

std::string sweep_variable_name(SweepVariable variable);
SweepVariable parse_sweep_variable(const std::string& name);

// Evaluation environments are seeded with mix(seed, kEvalSeedSalt) so the
// episodes scored by sweeps and evaluations never replay the training
// episodes of the same numeric seed. Part of the reproducibility contract:
// rerunning a sweep row means constructing HoloEnv with this derived seed.
constexpr std::uint64_t kEvalSeedSalt = 0xE7A1;

// Training checkpoints keep the policy with the best trailing mean episode
// reward over this many episodes (clamped to the run length), not the final
// parameters: on-policy training keeps exploring and can drift off a good
// solution right before the episode budget runs out.
constexpr int kBestWindow = 50;

// A grid evaluation request: every scheme visits every value under every
// seed with identical channel/field-of-view draws, so rows are paired across
// schemes and across grid values.
struct SweepSpec {
  SweepVariable variable = SweepVariable::kBandwidth;
  std::vector<double> values;  // SI units (or raw discounts)
  std::vector<Scheme> schemes;
  int episodes_per_point = 12;
  std::vector<std::uint64_t> seeds;

  void validate() const;
};

// Canonical checkpoint locations. The per-discount file tags the discount
// with its shortest decimal form ("0.9", "0.99"); the untagged file is the
// one evaluation and sweeps load.
std::string checkpoint_path(const std::string& dir, Scheme scheme);
std::string checkpoint_path(const std::string& dir, Scheme scheme,
                            double discount);

struct TrainingArtifacts {
  std::vector<std::string> checkpoints;
  std::vector<ConvergenceRow> convergence;
};

// Trains every requested learned scheme once per requested discount factor,
// writing checkpoints into `out_dir` (the first discount also becomes the
// scheme's canonical checkpoint). Progress goes to `log` when non-null.
TrainingArtifacts run_training(const ExperimentConfig& cfg,
                               const std::string& out_dir,
                               std::ostream* log = nullptr);

// Evaluates the spec over `workers` threads (0 = hardware concurrency), each
// task with its own environment and solver; rows come back sorted by
// (value, scheme, seed, episode) regardless of scheduling. Learned schemes
// load their canonical checkpoint from `checkpoint_dir` (discount sweeps
// load the per-discount checkpoints); a missing file raises an error naming
// the scheme. Greedy action selection is used throughout.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg,
                                 const SweepSpec& spec,
                                 const std::string& checkpoint_dir,
                                 int workers = 0);

// Operating-point evaluation (no knob override): one row per
// (scheme, seed, episode) with variable = "operating".
std::vector<ResultRow> run_evaluation(const ExperimentConfig& cfg,
                                      const std::vector<Scheme>& schemes,
                                      const std::string& checkpoint_dir,
                                      int workers = 0);

// Raw-row CSV round trip. Numbers are written with enough digits to
// round-trip exactly; files are byte-stable for fixed seed/config except the
// wall_time column.
void write_result_csv(const std::string& path,
                      const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_result_csv(const std::string& path);
void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> read_convergence_csv(const std::string& path);

// Per-scheme mean/stddev aggregate of one sweep point, used by the report.
struct AggregateRow {
  std::string variable;
  double value = 0.0;
  std::string scheme;
  double mean_qoe = 0.0;
  double std_qoe = 0.0;
  double mean_feasible = 0.0;
  int episodes = 0;
};

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows);

struct ReportFiles {
  std::string fig2;
  std::string fig3;
  std::string fig4;
  std::string fig5;
};

// Writes the four figure-data files into `out_dir`:
//   fig2_convergence.csv  scheme,discount,episode,reward,feasible_fraction
//   fig3_qoe_vs_W.csv     bandwidth_mhz,scheme,mean_qoe,std_qoe,
//                         mean_feasible_fraction,episodes
//   fig4_qoe_vs_tau.csv   deadline_ms,scheme,...
//   fig5_qoe_vs_cmax.csv  cycles_ghz,scheme,...
// Figures whose variable has no rows are skipped (empty path in the result);
// entirely empty inputs are rejected.
ReportFiles emit_report(const std::vector<ConvergenceRow>& convergence,
                        const std::vector<ResultRow>& rows,
                        const std::string& out_dir);

// Human-readable mean-QoE-by-scheme table over the aggregated rows.
std::string report_summary(const std::vector<ResultRow>& rows);

}  // namespace holostream

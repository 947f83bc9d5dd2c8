#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "holostream/experiments.hpp"
#include "holostream/policy.hpp"
#include "support/test_util.hpp"

using namespace holostream;

namespace fs = std::filesystem;

namespace {

// Experiment small enough that training plus two sweeps stays well under a
// second: one user served by one single-antenna AP, four-slot episodes.
ExperimentConfig tiny_experiment() {
  ConfigFile file = ConfigFile::from_string(
      "[scenario]\nseed = 3\naps = 1\nusers = 1\nantennas = 1\n"
      "tiles = 2\nfov_tiles = 1\nslots = 4\n"
      "[media]\nladder_mbps = 1, 2\n"
      "[ppo]\nhidden = 8\nbatch = 12\nminibatch = 6\nepochs = 2\n"
      "[train]\nepisodes = 6\ndiscounts = 0.9, 0.99\nschemes = proposed\n"
      "[evaluate]\nepisodes = 2\n"
      "[sweep]\nseeds = 1, 2\nepisodes_per_point = 2\n"
      "schemes = proposed, fixed_single_ap\n"
      "bandwidth_grid_mhz = 20, 28\ndeadline_grid_ms = 10, 20\n"
      "cycles_grid_ghz = 1, 3\n");
  ExperimentConfig cfg = parse_experiment_config(file);
  file.finish();
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

bool rows_equal_ignoring_time(const std::vector<ResultRow>& a,
                              const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].scheme != b[i].scheme || a[i].variable != b[i].variable ||
        a[i].value != b[i].value || a[i].seed != b[i].seed ||
        a[i].episode != b[i].episode || a[i].qoe != b[i].qoe ||
        a[i].feasible_fraction != b[i].feasible_fraction) {
      return false;
    }
  }
  return true;
}

// Replays one (scheme, value, seed) evaluation task exactly the way the sweep
// runner does, entirely through the public environment and policy interfaces.
std::vector<double> replay_task(const ExperimentConfig& cfg,
                                SweepVariable variable, double value,
                                Scheme scheme, std::uint64_t seed,
                                const TilePolicy* policy, int episodes,
                                std::vector<double>* feasible = nullptr) {
  EpisodeConfig episode = scheme_config(cfg.episode, scheme);
  switch (variable) {
    case SweepVariable::kBandwidth: episode.noise.bandwidth = value; break;
    case SweepVariable::kDeadline:
      episode.deadline_min = episode.deadline_max = value;
      break;
    case SweepVariable::kCycles:
      episode.cycles_min = episode.cycles_max = value;
      break;
    case SweepVariable::kDiscount: break;
  }
  const ActionCodec codec = scheme_codec(cfg.episode.dims.levels, scheme);
  HoloEnv env(episode, codec, rng::mix(seed, kEvalSeedSalt));
  const std::vector<int> fixed =
      env.uniform_action(std::min(2, episode.dims.levels), 0);
  std::vector<double> totals;
  for (int ep = 0; ep < episodes; ++ep) {
    Eigen::VectorXd obs = env.reset(ep);
    double total = 0.0;
    bool done = false;
    while (!done) {
      const std::vector<int> action =
          policy == nullptr ? fixed : policy->greedy(policy->action_probs(obs));
      RolloutEnv::Step step = env.step(action);
      total += step.reward;
      obs = std::move(step.obs);
      done = step.done;
    }
    totals.push_back(total);
    if (feasible != nullptr) {
      feasible->push_back(static_cast<double>(env.feasible_slots()) /
                          episode.dims.slots);
    }
  }
  return totals;
}

}  // namespace

TEST_CASE("sweep variable names round trip") {
  for (SweepVariable v :
       {SweepVariable::kBandwidth, SweepVariable::kDeadline,
        SweepVariable::kCycles, SweepVariable::kDiscount}) {
    CHECK(parse_sweep_variable(sweep_variable_name(v)) == v);
  }
  CHECK(sweep_variable_name(SweepVariable::kBandwidth) == "W");
  CHECK(sweep_variable_name(SweepVariable::kDeadline) == "tau");
  CHECK(sweep_variable_name(SweepVariable::kCycles) == "C_max");
  CHECK(sweep_variable_name(SweepVariable::kDiscount) == "discount");
  CHECK_THROWS_AS(parse_sweep_variable("frequency"), std::invalid_argument);
}

TEST_CASE("checkpoint paths use the scheme name and short discount tag") {
  CHECK(checkpoint_path("out", Scheme::kProposed) == "out/policy_proposed.txt");
  CHECK(checkpoint_path("out", Scheme::kAdaptiveSingleAp) ==
        "out/policy_adaptive_single_ap.txt");
  CHECK(checkpoint_path("out", Scheme::kProposed, 0.9) ==
        "out/policy_proposed_g0.9.txt");
  CHECK(checkpoint_path("out", Scheme::kProposed, 0.99) ==
        "out/policy_proposed_g0.99.txt");
  CHECK(checkpoint_path("out", Scheme::kAdaptiveNoCompression, 1.0) ==
        "out/policy_adaptive_nocomp_g1.txt");
}

TEST_CASE("sweep specs reject degenerate grids") {
  SweepSpec spec;
  spec.values = {1e6};
  spec.schemes = {Scheme::kProposed};
  spec.seeds = {1};
  CHECK_NOTHROW(spec.validate());

  SweepSpec bad = spec;
  bad.values.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.values = {1e6, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.schemes.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.seeds.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.episodes_per_point = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.variable = SweepVariable::kDiscount;
  bad.values = {0.9};
  bad.schemes = {Scheme::kProposed, Scheme::kFixedCoop};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("result rows survive the CSV round trip bit for bit") {
  TempDir dir("expts_csv");
  std::vector<ResultRow> rows;
  rows.push_back({"proposed", "W", 28e6, 1, 0, 1.0 / 3.0, 0.75, 0.001});
  rows.push_back({"fixed_coop", "tau", 1.5e-2, 17, 3, -4.9375e-17, 0.0, 2.5});
  rows.push_back({"adaptive_single_ap", "operating", 0.0,
                  9876543210ULL, 11, 123.45678901234567, 1.0, 0.0});
  const std::string path = dir.str() + "/rows.csv";
  write_result_csv(path, rows);
  const std::vector<ResultRow> back = read_result_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].scheme == rows[i].scheme);
    CHECK(back[i].variable == rows[i].variable);
    CHECK(back[i].value == rows[i].value);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].episode == rows[i].episode);
    CHECK(back[i].qoe == rows[i].qoe);
    CHECK(back[i].feasible_fraction == rows[i].feasible_fraction);
    CHECK(back[i].wall_time == rows[i].wall_time);
  }

  CHECK_THROWS_WITH_AS(read_result_csv(dir.str() + "/nope.csv"),
                       doctest::Contains("cannot read"), std::runtime_error);
  {
    std::ofstream out(dir.str() + "/bad_header.csv");
    out << "scheme,value\nproposed,1\n";
  }
  CHECK_THROWS_WITH_AS(read_result_csv(dir.str() + "/bad_header.csv"),
                       doctest::Contains("unexpected result CSV header"),
                       std::runtime_error);
  {
    std::ofstream out(dir.str() + "/short_row.csv");
    out << "scheme,variable,value,seed,episode,qoe,feasible_fraction,"
           "wall_time_s\n"
        << "proposed,W,1,1,0,2\n";
  }
  CHECK_THROWS_WITH_AS(read_result_csv(dir.str() + "/short_row.csv"),
                       doctest::Contains(":2: expected 8 fields"),
                       std::runtime_error);
  {
    std::ofstream out(dir.str() + "/bad_num.csv");
    out << "scheme,variable,value,seed,episode,qoe,feasible_fraction,"
           "wall_time_s\n"
        << "proposed,W,fast,1,0,2,0.5,0.1\n";
  }
  CHECK_THROWS_WITH_AS(read_result_csv(dir.str() + "/bad_num.csv"),
                       doctest::Contains("bad number 'fast'"),
                       std::runtime_error);
}

TEST_CASE("convergence rows survive the CSV round trip bit for bit") {
  TempDir dir("expts_conv_csv");
  std::vector<ConvergenceRow> rows;
  rows.push_back({"proposed", 0.9, 0, -3.0000000000000004, 0.25});
  rows.push_back({"adaptive_nocomp", 0.99, 599, 17.125, 1.0});
  const std::string path = dir.str() + "/conv.csv";
  write_convergence_csv(path, rows);
  const std::vector<ConvergenceRow> back = read_convergence_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].scheme == rows[i].scheme);
    CHECK(back[i].discount == rows[i].discount);
    CHECK(back[i].episode == rows[i].episode);
    CHECK(back[i].reward == rows[i].reward);
    CHECK(back[i].feasible_fraction == rows[i].feasible_fraction);
  }
  {
    std::ofstream out(dir.str() + "/bad.csv");
    out << "scheme,discount,episode,reward\n";
  }
  CHECK_THROWS_AS(read_convergence_csv(dir.str() + "/bad.csv"),
                  std::runtime_error);
}

TEST_CASE("aggregation groups by point and uses the sample deviation") {
  std::vector<ResultRow> rows;
  rows.push_back({"a", "W", 1.0, 1, 0, 2.0, 1.0, 0.0});
  rows.push_back({"a", "W", 1.0, 1, 1, 4.0, 0.5, 0.0});
  rows.push_back({"a", "W", 1.0, 2, 0, 6.0, 0.0, 0.0});
  rows.push_back({"b", "W", 1.0, 1, 0, 10.0, 1.0, 0.0});
  rows.push_back({"a", "W", 2.0, 1, 0, 8.0, 1.0, 0.0});
  const std::vector<AggregateRow> agg = aggregate_rows(rows);
  REQUIRE(agg.size() == 3);
  // Map keys sort by (variable, value, scheme).
  CHECK(agg[0].scheme == "a");
  CHECK(agg[0].value == 1.0);
  CHECK(agg[0].episodes == 3);
  CHECK(agg[0].mean_qoe == 4.0);
  CHECK(agg[0].std_qoe == 2.0);  // sqrt(((−2)²+0+2²)/2)
  CHECK(agg[0].mean_feasible == 0.5);
  CHECK(agg[1].scheme == "b");
  CHECK(agg[1].episodes == 1);
  CHECK(agg[1].std_qoe == 0.0);
  CHECK(agg[2].value == 2.0);
  CHECK(agg[2].mean_qoe == 8.0);
}

TEST_CASE("the report writes one figure file per populated variable") {
  TempDir dir("expts_report");
  std::vector<ConvergenceRow> convergence;
  convergence.push_back({"proposed", 0.9, 0, 1.5, 0.5});
  convergence.push_back({"proposed", 0.9, 1, 2.5, 0.75});
  std::vector<ResultRow> rows;
  rows.push_back({"proposed", "W", 20e6, 1, 0, 3.0, 1.0, 0.0});
  rows.push_back({"proposed", "W", 20e6, 1, 1, 5.0, 0.5, 0.0});
  rows.push_back({"fixed_coop", "W", 20e6, 1, 0, 2.0, 1.0, 0.0});
  rows.push_back({"proposed", "tau", 15e-3, 1, 0, 4.0, 1.0, 0.0});

  const ReportFiles files = emit_report(convergence, rows, dir.str());
  CHECK(files.fig2 == dir.str() + "/fig2_convergence.csv");
  CHECK(files.fig3 == dir.str() + "/fig3_qoe_vs_W.csv");
  CHECK(files.fig4 == dir.str() + "/fig4_qoe_vs_tau.csv");
  CHECK(files.fig5.empty());
  CHECK_FALSE(fs::exists(dir.str() + "/fig5_qoe_vs_cmax.csv"));

  const std::vector<ConvergenceRow> conv_back =
      read_convergence_csv(files.fig2);
  REQUIRE(conv_back.size() == 2);
  CHECK(conv_back[1].reward == 2.5);

  const std::vector<std::string> fig3 = lines_of(slurp(files.fig3));
  REQUIRE(fig3.size() == 3);  // header + two schemes at one grid value
  CHECK(fig3[0] ==
        "bandwidth_mhz,scheme,mean_qoe,std_qoe,mean_feasible_fraction,"
        "episodes");
  // Two proposed episodes: mean 4, sample deviation sqrt(2), bandwidth in
  // megahertz. fixed_coop sorts before proposed within the point.
  CHECK(fig3[1].rfind("20,fixed_coop,2,0,1,1", 0) == 0);
  {
    std::istringstream row(fig3[2]);
    std::string field;
    std::getline(row, field, ',');
    CHECK(field == "20");
    std::getline(row, field, ',');
    CHECK(field == "proposed");
    std::getline(row, field, ',');
    CHECK(std::stod(field) == 4.0);
    std::getline(row, field, ',');
    CHECK(std::stod(field) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    std::getline(row, field, ',');
    CHECK(std::stod(field) == 0.75);
    std::getline(row, field, ',');
    CHECK(field == "2");
  }

  const std::vector<std::string> fig4 = lines_of(slurp(files.fig4));
  REQUIRE(fig4.size() == 2);
  CHECK(fig4[1].rfind("15,proposed,4,", 0) == 0);  // deadline in milliseconds

  // Convergence-only and rows-only calls produce just their own files.
  TempDir conv_only("expts_report_conv");
  const ReportFiles just_conv = emit_report(convergence, {}, conv_only.str());
  CHECK_FALSE(just_conv.fig2.empty());
  CHECK(just_conv.fig3.empty());
  TempDir rows_only("expts_report_rows");
  const ReportFiles just_rows = emit_report({}, rows, rows_only.str());
  CHECK(just_rows.fig2.empty());
  CHECK_FALSE(just_rows.fig3.empty());
  CHECK_THROWS_AS(emit_report({}, {}, dir.str()), std::invalid_argument);

  const std::string summary = report_summary(rows);
  CHECK(summary.find("proposed") != std::string::npos);
  CHECK(summary.find("fixed_coop") != std::string::npos);
  CHECK(report_summary({}) == "no rows\n");
}

TEST_CASE("training writes tagged and canonical checkpoints deterministically") {
  const ExperimentConfig cfg = tiny_experiment();
  TempDir run_a("expts_train_a");
  TempDir run_b("expts_train_b");

  const TrainingArtifacts a = run_training(cfg, run_a.str());
  // One scheme, two discounts: each discount saves its tagged file and the
  // first discount doubles as the canonical checkpoint.
  REQUIRE(a.checkpoints.size() == 3);
  CHECK(a.checkpoints[0] ==
        checkpoint_path(run_a.str(), Scheme::kProposed, 0.9));
  CHECK(a.checkpoints[1] == checkpoint_path(run_a.str(), Scheme::kProposed));
  CHECK(a.checkpoints[2] ==
        checkpoint_path(run_a.str(), Scheme::kProposed, 0.99));
  for (const std::string& path : a.checkpoints) CHECK(fs::exists(path));
  CHECK(slurp(a.checkpoints[0]) == slurp(a.checkpoints[1]));

  REQUIRE(a.convergence.size() == 2 * 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(a.convergence[i].scheme == "proposed");
    CHECK(a.convergence[i].discount == 0.9);
    CHECK(a.convergence[i].episode == i);
    CHECK(a.convergence[6 + i].discount == 0.99);
    CHECK(std::isfinite(a.convergence[i].reward));
    CHECK(a.convergence[i].feasible_fraction >= 0.0);
    CHECK(a.convergence[i].feasible_fraction <= 1.0);
  }

  const TrainingArtifacts b = run_training(cfg, run_b.str());
  REQUIRE(b.convergence.size() == a.convergence.size());
  for (std::size_t i = 0; i < a.convergence.size(); ++i) {
    CHECK(a.convergence[i].reward == b.convergence[i].reward);
    CHECK(a.convergence[i].feasible_fraction ==
          b.convergence[i].feasible_fraction);
  }
  CHECK(slurp(a.checkpoints[0]) == slurp(b.checkpoints[0]));
  CHECK(slurp(a.checkpoints[2]) == slurp(b.checkpoints[2]));
}

TEST_CASE("sweeps demand checkpoints, order rows, and replay exactly") {
  const ExperimentConfig cfg = tiny_experiment();
  TempDir dir("expts_sweep");

  SweepSpec spec;
  spec.variable = SweepVariable::kBandwidth;
  // 0.2 MHz cannot carry even the lowest rung before any deadline, so the
  // low point zeroes every episode while 28 MHz streams normally.
  spec.values = {2e5, 28e6};
  spec.schemes = {Scheme::kProposed, Scheme::kFixedSingleAp};
  spec.episodes_per_point = 2;
  spec.seeds = {1, 2};

  // Learned schemes refuse to run without their checkpoint.
  CHECK_THROWS_WITH_AS(
      run_sweep(cfg, spec, dir.str(), 1),
      doctest::Contains("missing checkpoint for scheme 'proposed'"),
      std::runtime_error);

  run_training(cfg, dir.str());
  const std::vector<ResultRow> rows = run_sweep(cfg, spec, dir.str(), 1);
  REQUIRE(rows.size() == 2 * 2 * 2 * 2);

  // Row order is (value, scheme in listed order, seed, episode).
  std::size_t i = 0;
  for (double value : spec.values) {
    for (Scheme scheme : spec.schemes) {
      for (std::uint64_t seed : spec.seeds) {
        for (int ep = 0; ep < 2; ++ep, ++i) {
          CHECK(rows[i].variable == "W");
          CHECK(rows[i].value == value);
          CHECK(rows[i].scheme == scheme_name(scheme));
          CHECK(rows[i].seed == seed);
          CHECK(rows[i].episode == ep);
          CHECK(std::isfinite(rows[i].qoe));
          CHECK(rows[i].feasible_fraction >= 0.0);
          CHECK(rows[i].feasible_fraction <= 1.0);
          CHECK(rows[i].wall_time > 0.0);
        }
      }
    }
  }

  // Independent replay of two tasks through the public interfaces: a learned
  // scheme under the bandwidth override and a fixed scheme on one AP.
  const TilePolicy policy =
      TilePolicy::load(checkpoint_path(dir.str(), Scheme::kProposed));
  std::vector<double> feasible;
  const std::vector<double> learned = replay_task(
      cfg, SweepVariable::kBandwidth, 28e6, Scheme::kProposed, 2, &policy, 2,
      &feasible);
  CHECK(rows[10].qoe == learned[0]);
  CHECK(rows[11].qoe == learned[1]);
  CHECK(rows[10].feasible_fraction == feasible[0]);
  CHECK(rows[11].feasible_fraction == feasible[1]);
  const std::vector<double> fixed = replay_task(
      cfg, SweepVariable::kBandwidth, 2e5, Scheme::kFixedSingleAp, 1, nullptr,
      2);
  CHECK(rows[4].qoe == fixed[0]);
  CHECK(rows[5].qoe == fixed[1]);

  // Thread count affects scheduling only, never the numbers.
  const std::vector<ResultRow> par = run_sweep(cfg, spec, dir.str(), 4);
  CHECK(rows_equal_ignoring_time(rows, par));

  // The two bandwidths genuinely change the episodes.
  CHECK(rows[8].qoe != rows[0].qoe);
}

TEST_CASE("discount sweeps read the per-discount checkpoints") {
  const ExperimentConfig cfg = tiny_experiment();
  TempDir dir("expts_disc");

  SweepSpec spec;
  spec.variable = SweepVariable::kDiscount;
  spec.values = {0.9, 0.99};
  spec.schemes = {Scheme::kProposed};
  spec.episodes_per_point = 2;
  spec.seeds = {1};

  CHECK_THROWS_WITH_AS(run_sweep(cfg, spec, dir.str(), 1),
                       doctest::Contains("_g0.9"), std::runtime_error);

  run_training(cfg, dir.str());
  const std::vector<ResultRow> rows = run_sweep(cfg, spec, dir.str(), 1);
  REQUIRE(rows.size() == 2 * 2);
  CHECK(rows[0].variable == "discount");
  CHECK(rows[0].value == 0.9);
  CHECK(rows[2].value == 0.99);

  // Replaying with the tagged checkpoint reproduces the row; the discount
  // itself never touches the environment.
  const TilePolicy tagged = TilePolicy::load(
      checkpoint_path(dir.str(), Scheme::kProposed, 0.99));
  const std::vector<double> replay = replay_task(
      cfg, SweepVariable::kDiscount, 0.99, Scheme::kProposed, 1, &tagged, 2);
  CHECK(rows[2].qoe == replay[0]);
  CHECK(rows[3].qoe == replay[1]);
}

TEST_CASE("operating-point evaluation tags rows with a zero knob value") {
  const ExperimentConfig cfg = tiny_experiment();
  TempDir dir("expts_eval");
  run_training(cfg, dir.str());

  const std::vector<Scheme> schemes = {Scheme::kProposed,
                                       Scheme::kFixedSingleAp};
  const std::vector<ResultRow> rows = run_evaluation(cfg, schemes, dir.str(), 1);
  // schemes x seeds x evaluate.episodes
  REQUIRE(rows.size() == 2 * 2 * 2);
  for (const ResultRow& row : rows) {
    CHECK(row.variable == "operating");
    CHECK(row.value == 0.0);
  }
  // The evaluation runs at the configured bandwidth: identical to replaying
  // with that bandwidth as the override.
  const std::vector<double> fixed =
      replay_task(cfg, SweepVariable::kBandwidth, cfg.episode.noise.bandwidth,
                  Scheme::kFixedSingleAp, 1, nullptr, 2);
  CHECK(rows[4].scheme == "fixed_single_ap");
  CHECK(rows[4].qoe == fixed[0]);
  CHECK(rows[5].qoe == fixed[1]);
}

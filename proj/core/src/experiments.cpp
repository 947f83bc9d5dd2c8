#include "holostream/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "holostream/rng.hpp"

namespace holostream {

namespace {

constexpr const char* kResultHeader =
    "scheme,variable,value,seed,episode,qoe,feasible_fraction,wall_time_s";
constexpr const char* kConvergenceHeader =
    "scheme,discount,episode,reward,feasible_fraction";

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string item;
  std::istringstream stream(line);
  while (std::getline(stream, item, ',')) fields.push_back(item);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return in;
}

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": bad number '" + text + "'");
  }
}

}  // namespace

std::string sweep_variable_name(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::kBandwidth: return "W";
    case SweepVariable::kDeadline: return "tau";
    case SweepVariable::kCycles: return "C_max";
    case SweepVariable::kDiscount: return "discount";
  }
  throw std::invalid_argument("sweep_variable_name: bad variable");
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "W") return SweepVariable::kBandwidth;
  if (name == "tau") return SweepVariable::kDeadline;
  if (name == "C_max") return SweepVariable::kCycles;
  if (name == "discount") return SweepVariable::kDiscount;
  throw std::invalid_argument("unknown sweep variable '" + name +
                              "' (expected W, tau, C_max, or discount)");
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("SweepSpec: empty grid");
  if (schemes.empty()) throw std::invalid_argument("SweepSpec: no schemes");
  if (seeds.empty()) throw std::invalid_argument("SweepSpec: no seeds");
  if (episodes_per_point < 1) {
    throw std::invalid_argument("SweepSpec: episodes_per_point must be >= 1");
  }
  for (double v : values) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("SweepSpec: grid values must be positive");
    }
  }
  if (variable == SweepVariable::kDiscount) {
    for (Scheme scheme : schemes) {
      if (!scheme_is_learned(scheme)) {
        throw std::invalid_argument(
            "SweepSpec: discount sweeps only apply to learned schemes");
      }
    }
  }
}

std::string checkpoint_path(const std::string& dir, Scheme scheme) {
  return dir + "/policy_" + scheme_name(scheme) + ".txt";
}

std::string checkpoint_path(const std::string& dir, Scheme scheme,
                            double discount) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", discount);
  return dir + "/policy_" + scheme_name(scheme) + "_g" + buf + ".txt";
}

TrainingArtifacts run_training(const ExperimentConfig& cfg,
                               const std::string& out_dir, std::ostream* log) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  TrainingArtifacts art;
  for (std::size_t si = 0; si < cfg.train.schemes.size(); ++si) {
    const Scheme scheme = cfg.train.schemes[si];
    const EpisodeConfig episode = scheme_config(cfg.episode, scheme);
    const ActionCodec codec = scheme_codec(cfg.episode.dims.levels, scheme);
    for (std::size_t di = 0; di < cfg.train.discounts.size(); ++di) {
      const double discount = cfg.train.discounts[di];
      PpoConfig ppo = cfg.ppo;
      ppo.discount = discount;
      HoloEnv env(episode, codec, cfg.seed);
      PolicyConfig policy_config{env.observation_size(), env.action_heads(),
                                 codec, cfg.hidden};
      PpoAgent agent(policy_config, ppo,
                     rng::mix(cfg.seed, rng::Stream::kInit, si, di));
      if (log != nullptr) {
        *log << "training scheme=" << scheme_name(scheme)
             << " discount=" << discount << " episodes=" << cfg.train.episodes
             << "\n";
      }
      const double slots = static_cast<double>(episode.dims.slots);
      // On-policy training keeps exploring, so the final parameters are not
      // necessarily the best seen. Keep the policy with the best trailing
      // window of episode rewards and ship that as the checkpoint.
      const int window = std::min(kBestWindow, cfg.train.episodes);
      std::deque<double> trail;
      double trail_sum = 0.0;
      double best_mean = -std::numeric_limits<double>::infinity();
      TilePolicy best = agent.policy();
      agent.train(env, cfg.train.episodes, [&](int ep, double total) {
        art.convergence.push_back(
            {scheme_name(scheme), discount, ep, total,
             static_cast<double>(env.feasible_slots()) / slots});
        trail.push_back(total);
        trail_sum += total;
        if (static_cast<int>(trail.size()) > window) {
          trail_sum -= trail.front();
          trail.pop_front();
        }
        if (static_cast<int>(trail.size()) == window &&
            trail_sum / window > best_mean) {
          best_mean = trail_sum / window;
          best = agent.policy();
        }
        if (log != nullptr && (ep + 1) % 100 == 0) {
          *log << "  episode " << (ep + 1) << " reward " << total << "\n";
        }
      });
      const std::string tagged = checkpoint_path(out_dir, scheme, discount);
      best.save(tagged);
      art.checkpoints.push_back(tagged);
      if (di == 0) {
        const std::string canonical = checkpoint_path(out_dir, scheme);
        best.save(canonical);
        art.checkpoints.push_back(canonical);
      }
    }
  }
  return art;
}

namespace {

struct PointTask {
  Scheme scheme = Scheme::kProposed;
  double value = 0.0;
  std::uint64_t seed = 0;
  const TilePolicy* policy = nullptr;  // null for the fixed schemes
  std::size_t row_offset = 0;
};

// Applies one sweep override to a scheme-adjusted episode configuration.
void apply_override(EpisodeConfig& episode, SweepVariable variable,
                    double value) {
  switch (variable) {
    case SweepVariable::kBandwidth:
      episode.noise.bandwidth = value;
      break;
    case SweepVariable::kDeadline:
      episode.deadline_min = value;
      episode.deadline_max = value;
      break;
    case SweepVariable::kCycles:
      episode.cycles_min = value;
      episode.cycles_max = value;
      break;
    case SweepVariable::kDiscount:
      break;  // selects a checkpoint, not an environment knob
  }
}

std::vector<ResultRow> run_points(const ExperimentConfig& cfg,
                                  const SweepSpec& spec,
                                  const std::string& variable_label,
                                  const std::string& checkpoint_dir,
                                  int episodes, int workers) {
  spec.validate();

  // Load every learned policy once; tasks share them read-only.
  std::vector<std::unique_ptr<TilePolicy>> owned;
  std::map<std::pair<int, double>, const TilePolicy*> policies;
  for (Scheme scheme : spec.schemes) {
    if (!scheme_is_learned(scheme)) continue;
    if (spec.variable == SweepVariable::kDiscount) {
      for (double discount : spec.values) {
        const std::string path =
            checkpoint_path(checkpoint_dir, scheme, discount);
        if (!std::filesystem::exists(path)) {
          throw std::runtime_error("missing checkpoint for scheme '" +
                                   scheme_name(scheme) + "': " + path +
                                   " (run training first)");
        }
        owned.push_back(std::make_unique<TilePolicy>(TilePolicy::load(path)));
        policies[{static_cast<int>(scheme), discount}] = owned.back().get();
      }
    } else {
      const std::string path = checkpoint_path(checkpoint_dir, scheme);
      if (!std::filesystem::exists(path)) {
        throw std::runtime_error("missing checkpoint for scheme '" +
                                 scheme_name(scheme) + "': " + path +
                                 " (run training first)");
      }
      owned.push_back(std::make_unique<TilePolicy>(TilePolicy::load(path)));
      policies[{static_cast<int>(scheme), 0.0}] = owned.back().get();
    }
  }

  // Row order — and therefore byte-stable output — is fixed by enumeration:
  // (value, scheme, seed, episode), schemes and seeds in their listed order.
  std::vector<PointTask> tasks;
  for (double value : spec.values) {
    for (Scheme scheme : spec.schemes) {
      for (std::uint64_t seed : spec.seeds) {
        PointTask task;
        task.scheme = scheme;
        task.value = value;
        task.seed = seed;
        if (scheme_is_learned(scheme)) {
          const double key =
              spec.variable == SweepVariable::kDiscount ? value : 0.0;
          task.policy = policies.at({static_cast<int>(scheme), key});
        }
        task.row_offset = tasks.size() * static_cast<std::size_t>(episodes);
        tasks.push_back(task);
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size() *
                              static_cast<std::size_t>(episodes));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < tasks.size();
         i = next.fetch_add(1)) {
      const PointTask& task = tasks[i];
      try {
        EpisodeConfig episode = scheme_config(cfg.episode, task.scheme);
        apply_override(episode, spec.variable, task.value);
        const ActionCodec codec =
            scheme_codec(cfg.episode.dims.levels, task.scheme);
        HoloEnv env(episode, codec, rng::mix(task.seed, kEvalSeedSalt));
        const std::vector<int> fixed_action =
            task.policy == nullptr
                ? env.uniform_action(std::min(2, episode.dims.levels), 0)
                : std::vector<int>{};
        const double slots = static_cast<double>(episode.dims.slots);
        for (int ep = 0; ep < episodes; ++ep) {
          const auto start = std::chrono::steady_clock::now();
          Eigen::VectorXd obs = env.reset(ep);
          double total = 0.0;
          bool done = false;
          while (!done) {
            const std::vector<int>& action =
                task.policy == nullptr
                    ? fixed_action
                    : task.policy->greedy(task.policy->action_probs(obs));
            RolloutEnv::Step step = env.step(action);
            total += step.reward;
            obs = std::move(step.obs);
            done = step.done;
          }
          const std::chrono::duration<double> elapsed =
              std::chrono::steady_clock::now() - start;
          ResultRow& row = rows[task.row_offset + static_cast<std::size_t>(ep)];
          row.scheme = scheme_name(task.scheme);
          row.variable = variable_label;
          row.value = task.value;
          row.seed = task.seed;
          row.episode = ep;
          row.qoe = total;
          row.feasible_fraction =
              static_cast<double>(env.feasible_slots()) / slots;
          row.wall_time = elapsed.count();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  unsigned int count = workers > 0
                           ? static_cast<unsigned int>(workers)
                           : std::max(1u, std::thread::hardware_concurrency());
  count = std::min<unsigned int>(
      count, static_cast<unsigned int>(std::max<std::size_t>(tasks.size(), 1)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg,
                                 const SweepSpec& spec,
                                 const std::string& checkpoint_dir,
                                 int workers) {
  cfg.validate();
  return run_points(cfg, spec, sweep_variable_name(spec.variable),
                    checkpoint_dir, spec.episodes_per_point, workers);
}

std::vector<ResultRow> run_evaluation(const ExperimentConfig& cfg,
                                      const std::vector<Scheme>& schemes,
                                      const std::string& checkpoint_dir,
                                      int workers) {
  cfg.validate();
  SweepSpec spec;
  spec.variable = SweepVariable::kBandwidth;  // placeholder; value unused below
  spec.values = {cfg.episode.noise.bandwidth};
  spec.schemes = schemes;
  spec.episodes_per_point = cfg.evaluate.episodes;
  spec.seeds = cfg.sweep.seeds;
  std::vector<ResultRow> rows = run_points(cfg, spec, "operating",
                                           checkpoint_dir,
                                           cfg.evaluate.episodes, workers);
  // The operating point sweeps nothing; bandwidth stays at its configured
  // value and the rows carry a zero knob value.
  for (ResultRow& row : rows) row.value = 0.0;
  return rows;
}

void write_result_csv(const std::string& path,
                      const std::vector<ResultRow>& rows) {
  std::ofstream out = open_output(path);
  out << kResultHeader << "\n";
  for (const ResultRow& row : rows) {
    out << row.scheme << ',' << row.variable << ',' << fmt_full(row.value)
        << ',' << row.seed << ',' << row.episode << ',' << fmt_full(row.qoe)
        << ',' << fmt_full(row.feasible_fraction) << ','
        << fmt_full(row.wall_time) << "\n";
  }
}

std::vector<ResultRow> read_result_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader) {
    throw std::runtime_error(path + ": unexpected result CSV header");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_line(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() != 8) throw std::runtime_error(where + ": expected 8 fields");
    ResultRow row;
    row.scheme = f[0];
    row.variable = f[1];
    row.value = parse_double(f[2], where);
    row.seed = static_cast<std::uint64_t>(
        std::llround(parse_double(f[3], where)));
    row.episode = static_cast<int>(std::llround(parse_double(f[4], where)));
    row.qoe = parse_double(f[5], where);
    row.feasible_fraction = parse_double(f[6], where);
    row.wall_time = parse_double(f[7], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows) {
  std::ofstream out = open_output(path);
  out << kConvergenceHeader << "\n";
  for (const ConvergenceRow& row : rows) {
    out << row.scheme << ',' << fmt_full(row.discount) << ',' << row.episode
        << ',' << fmt_full(row.reward) << ','
        << fmt_full(row.feasible_fraction) << "\n";
  }
}

std::vector<ConvergenceRow> read_convergence_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kConvergenceHeader) {
    throw std::runtime_error(path + ": unexpected convergence CSV header");
  }
  std::vector<ConvergenceRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_line(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() != 5) throw std::runtime_error(where + ": expected 5 fields");
    ConvergenceRow row;
    row.scheme = f[0];
    row.discount = parse_double(f[1], where);
    row.episode = static_cast<int>(std::llround(parse_double(f[2], where)));
    row.reward = parse_double(f[3], where);
    row.feasible_fraction = parse_double(f[4], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, double, std::string>,
           std::vector<const ResultRow*>>
      groups;
  for (const ResultRow& row : rows) {
    groups[{row.variable, row.value, row.scheme}].push_back(&row);
  }
  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    AggregateRow agg;
    agg.variable = std::get<0>(key);
    agg.value = std::get<1>(key);
    agg.scheme = std::get<2>(key);
    agg.episodes = static_cast<int>(members.size());
    double qoe_sum = 0.0;
    double feasible_sum = 0.0;
    for (const ResultRow* row : members) {
      qoe_sum += row->qoe;
      feasible_sum += row->feasible_fraction;
    }
    agg.mean_qoe = qoe_sum / agg.episodes;
    agg.mean_feasible = feasible_sum / agg.episodes;
    double ss = 0.0;
    for (const ResultRow* row : members) {
      const double d = row->qoe - agg.mean_qoe;
      ss += d * d;
    }
    agg.std_qoe = members.size() > 1
                      ? std::sqrt(ss / static_cast<double>(members.size() - 1))
                      : 0.0;
    out.push_back(std::move(agg));
  }
  return out;
}

namespace {

// Writes one figure file for the aggregates whose variable matches; returns
// the empty string when there is nothing to write.
std::string write_figure_csv(const std::string& path,
                             const std::vector<AggregateRow>& aggregates,
                             const std::string& variable,
                             const std::string& value_column,
                             double value_scale) {
  std::vector<const AggregateRow*> selected;
  for (const AggregateRow& agg : aggregates) {
    if (agg.variable == variable) selected.push_back(&agg);
  }
  if (selected.empty()) return {};
  std::ofstream out = open_output(path);
  out << value_column
      << ",scheme,mean_qoe,std_qoe,mean_feasible_fraction,episodes\n";
  for (const AggregateRow* agg : selected) {
    out << fmt_short(agg->value * value_scale) << ',' << agg->scheme << ','
        << fmt_full(agg->mean_qoe) << ',' << fmt_full(agg->std_qoe) << ','
        << fmt_full(agg->mean_feasible) << ',' << agg->episodes << "\n";
  }
  return path;
}

}  // namespace

ReportFiles emit_report(const std::vector<ConvergenceRow>& convergence,
                        const std::vector<ResultRow>& rows,
                        const std::string& out_dir) {
  if (convergence.empty() && rows.empty()) {
    throw std::invalid_argument("emit_report: nothing to report");
  }
  std::filesystem::create_directories(out_dir);
  ReportFiles files;
  if (!convergence.empty()) {
    files.fig2 = out_dir + "/fig2_convergence.csv";
    write_convergence_csv(files.fig2, convergence);
  }
  const std::vector<AggregateRow> aggregates = aggregate_rows(rows);
  files.fig3 = write_figure_csv(out_dir + "/fig3_qoe_vs_W.csv", aggregates,
                                "W", "bandwidth_mhz", 1e-6);
  files.fig4 = write_figure_csv(out_dir + "/fig4_qoe_vs_tau.csv", aggregates,
                                "tau", "deadline_ms", 1e3);
  files.fig5 = write_figure_csv(out_dir + "/fig5_qoe_vs_cmax.csv", aggregates,
                                "C_max", "cycles_ghz", 1e-9);
  return files;
}

std::string report_summary(const std::vector<ResultRow>& rows) {
  if (rows.empty()) return "no rows\n";
  const std::vector<AggregateRow> aggregates = aggregate_rows(rows);
  // Collapse across grid values: per (variable, scheme), episode-weighted
  // mean of the point means.
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> table;
  for (const AggregateRow& agg : aggregates) {
    auto& cell = table[{agg.variable, agg.scheme}];
    cell.first += agg.mean_qoe * agg.episodes;
    cell.second += agg.episodes;
  }
  std::ostringstream out;
  out << "mean QoE by (variable, scheme):\n";
  for (const auto& [key, cell] : table) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-10s %-20s %12.4f  (n=%d)\n",
                  key.first.c_str(), key.second.c_str(),
                  cell.first / cell.second, cell.second);
    out << line;
  }
  return out.str();
}

}  // namespace holostream

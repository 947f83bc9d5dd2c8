#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "holostream/environment.hpp"
#include "holostream/ppo.hpp"

namespace holostream {

// Flat INI-style configuration: `[section]` headers, `key = value` pairs,
// `#` or `;` comments, blank lines ignored. Parsing is strict — malformed
// lines, duplicate keys, and (via finish()) keys no reader ever consumed all
// raise errors carrying the origin and line number.
class ConfigFile {
 public:
  static ConfigFile from_file(const std::string& path);
  static ConfigFile from_string(const std::string& text,
                                const std::string& origin = "<inline>");

  bool has(const std::string& section, const std::string& key) const;

  // Required lookups throw when the key is absent; fallback overloads return
  // the fallback instead. Every lookup marks the key as consumed.
  std::string get_string(const std::string& section, const std::string& key);
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  double get_double(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key,
                    double fallback);
  int get_int(const std::string& section, const std::string& key);
  int get_int(const std::string& section, const std::string& key, int fallback);
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback);
  std::vector<double> get_list(const std::string& section,
                               const std::string& key);
  std::vector<double> get_list(const std::string& section,
                               const std::string& key,
                               const std::vector<double>& fallback);
  std::vector<std::string> get_names(const std::string& section,
                                     const std::string& key,
                                     const std::vector<std::string>& fallback);

  // Rejects configurations containing keys nothing consumed (typo guard).
  void finish() const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  const Entry* find(const std::string& section, const std::string& key) const;
  const std::string& require(const std::string& section,
                             const std::string& key);
  [[noreturn]] void fail(const std::string& message, int line = 0) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Unit helpers used when translating config values into SI quantities.
double dbm_to_watts(double dbm);

// Training portion of an experiment: which learned schemes to fit, for how
// many episodes, and which discount factors to compare.
struct TrainPlan {
  int episodes = 600;
  std::vector<double> discounts = {0.90, 0.99};
  std::vector<Scheme> schemes = {Scheme::kProposed,
                                 Scheme::kAdaptiveNoCompression,
                                 Scheme::kAdaptiveSingleAp};
};

struct EvaluatePlan {
  int episodes = 40;
};

// Grid evaluation: every scheme visits every grid value under every seed with
// identical channel and field-of-view draws (paired comparison). Grids are
// stored in SI units (Hz, seconds, cycles/s).
struct SweepPlan {
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  int episodes_per_point = 12;
  std::vector<Scheme> schemes = {
      Scheme::kProposed, Scheme::kFixedCoop, Scheme::kAdaptiveNoCompression,
      Scheme::kAdaptiveSingleAp, Scheme::kFixedSingleAp};
  std::vector<double> bandwidth_grid;
  std::vector<double> deadline_grid;
  std::vector<double> cycles_grid;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  EpisodeConfig episode;  // operating point; sweeps override one knob at a time
  PpoConfig ppo;
  int hidden = 128;  // policy/value network width
  TrainPlan train;
  EvaluatePlan evaluate;
  SweepPlan sweep;

  void validate() const;
};

// Builds the experiment description from a parsed file, applying the
// documented defaults for absent keys, converting the human-facing units
// (MHz, ms, GHz, dBm, Mbit/s) to SI, and rejecting unknown keys.
ExperimentConfig parse_experiment_config(ConfigFile& file);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace holostream

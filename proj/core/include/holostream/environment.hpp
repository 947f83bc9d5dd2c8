#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "holostream/beamform.hpp"
#include "holostream/media.hpp"
#include "holostream/ppo.hpp"
#include "holostream/qoe.hpp"
#include "holostream/scenario.hpp"

namespace holostream {

// Everything needed to roll an episode. Deadlines and device throughput are
// drawn once per episode from the configured ranges; fields of view are
// redrawn every slot.
struct EpisodeConfig {
  ScenarioDims dims;
  std::vector<double> ladder_rates;  // ascending [bit/s]
  double tile_time = 0.0;            // playback seconds covered per tile
  double compress_ratio = 1.0;       // compressed-size multiplier in [0, 1]
  double deadline_min = 0.0;         // per-episode delivery deadline range [s]
  double deadline_max = 0.0;
  double cycles_min = 0.0;           // per-episode device throughput range
  double cycles_max = 0.0;
  double bits_per_cycle = 1.0;
  NoiseModel noise;
  Eigen::VectorXd ap_power;          // watts per AP
  double min_sinr = 0.0;             // SINR floor applied to every served user
  Eigen::MatrixXd pathloss;          // users x aps channel variances
  QoeWeights weights;
  double buffer_capacity = 0.0;      // seconds of content
  double buffer_initial = 0.0;
  bool strict_buffer = false;        // infeasible slots add no content
  int fov_tiles = 0;                 // visible tiles per user per slot
  double dist_min = 1.0;
  double dist_max = 1.0;
  double occ_max = 1.0;              // occlusion ~ U[1, occ_max]

  void validate() const;
};

// Full scoring of one slot.
struct StepOutcome {
  BeamStatus status = BeamStatus::kNumericalFailure;
  bool feasible = false;
  double reward = 0.0;
  Eigen::VectorXd rates;        // per user [bit/s]; zero when infeasible
  Eigen::VectorXd sinr;         // achieved SINR; zero when infeasible
  Eigen::VectorXd sinr_target;  // requested floors (inf allowed)
  std::vector<QoeRecord> records;
  double total_power = 0.0;     // NaN unless feasible
};

// The cooperative streaming episode: per slot, an action fixes one
// (level, compress) pair per visible tile of every user; timing converts the
// selections into per-user SINR floors; the beamforming stage accepts or
// rejects the slot; accepted slots score their summed experience value,
// rejected slots score zero.
class HoloEnv : public RolloutEnv {
 public:
  HoloEnv(const EpisodeConfig& config, const ActionCodec& codec,
          std::uint64_t seed);

  int observation_size() const override;
  int action_heads() const override;
  ActionCodec action_codec() const override { return codec_; }

  Eigen::VectorXd reset(int episode) override;
  Step step(const std::vector<int>& action) override;

  // Scores the current slot for explicit per-user selections and advances
  // the episode. step() is a thin decode-and-forward wrapper around this.
  StepOutcome step_selections(const std::vector<TileSelection>& selections);

  const EpisodeConfig& config() const { return config_; }
  int episode() const { return episode_; }
  int slot() const { return slot_; }  // 1-based; slots+1 once finished
  bool done() const { return slot_ > config_.dims.slots; }
  double deadline() const { return deadline_; }
  double device_cycles() const { return cycles_; }
  const std::vector<FovState>& fov() const { return fov_; }
  const StepOutcome& last_outcome() const { return last_outcome_; }
  int feasible_slots() const { return feasible_count_; }

  // Same categorical choice for every head, e.g. the fixed-selection rules.
  std::vector<int> uniform_action(int level, int compress) const;

 private:
  Eigen::VectorXd build_observation() const;
  void draw_fov();

  EpisodeConfig config_;
  ActionCodec codec_;
  std::uint64_t seed_;
  BitrateLadder ladder_;
  SocpSolver solver_;

  int episode_ = -1;
  int slot_ = 0;
  double deadline_ = 0.0;
  double cycles_ = 0.0;
  std::vector<FovState> fov_;
  Eigen::VectorXd prev_rate_;
  Eigen::VectorXd prev_quality_;
  std::vector<BufferState> buffers_;
  int feasible_count_ = 0;
  StepOutcome last_outcome_;
  double rate_scale_ = 1.0;
  double quality_scale_ = 1.0;
};

// The transmission schemes compared by the experiment drivers. kProposed
// adapts levels and compression over all APs; baselines strip one capability
// each: kFixedCoop pins level 2 / no compression, kAdaptiveNoCompression
// learns levels only, kAdaptiveSingleAp learns both but transmits from a
// single AP, kFixedSingleAp combines both restrictions.
enum class Scheme {
  kProposed,
  kFixedCoop,
  kAdaptiveNoCompression,
  kAdaptiveSingleAp,
  kFixedSingleAp,
};

const std::vector<Scheme>& all_schemes();
std::string scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);
bool scheme_is_learned(Scheme scheme);

// Scheme-specific environment view: single-AP schemes keep only the first
// AP's budget and pathloss column.
EpisodeConfig scheme_config(const EpisodeConfig& base, Scheme scheme);
ActionCodec scheme_codec(int levels, Scheme scheme);

// Fixed selection used by the non-learned schemes (level 2 on every tile,
// clamped to the ladder, never compressed).
std::vector<int> fixed_scheme_action(const HoloEnv& env);

}  // namespace holostream

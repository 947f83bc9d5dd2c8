#include "holostream/environment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "holostream/channel.hpp"
#include "holostream/rng.hpp"

namespace holostream {

void EpisodeConfig::validate() const {
  dims.validate();
  const BitrateLadder ladder{ladder_rates};  // validates shape/ordering
  if (ladder.levels() != dims.levels) {
    throw std::invalid_argument(
        "EpisodeConfig: ladder size disagrees with dims.levels");
  }
  TimingConfig{deadline_min, tile_time, compress_ratio}.validate();
  if (!(deadline_min <= deadline_max)) {
    throw std::invalid_argument("EpisodeConfig: deadline range inverted");
  }
  if (!(cycles_min > 0.0) || !(cycles_min <= cycles_max) ||
      !(bits_per_cycle > 0.0)) {
    throw std::invalid_argument("EpisodeConfig: bad device throughput range");
  }
  noise.validate();
  if (ap_power.size() != dims.aps || (ap_power.array() <= 0.0).any()) {
    throw std::invalid_argument("EpisodeConfig: need one positive power per AP");
  }
  if (!(min_sinr > 0.0)) {
    throw std::invalid_argument("EpisodeConfig: min_sinr must be > 0");
  }
  if (pathloss.rows() != dims.users || pathloss.cols() != dims.aps ||
      (pathloss.array() <= 0.0).any()) {
    throw std::invalid_argument(
        "EpisodeConfig: pathloss must be positive, users x aps");
  }
  weights.validate();
  BufferState{buffer_initial, buffer_capacity}.validate();
  if (fov_tiles < 1 || fov_tiles > dims.tiles) {
    throw std::invalid_argument(
        "EpisodeConfig: fov_tiles must lie in [1, dims.tiles]");
  }
  if (!(dist_min > 0.0) || !(dist_min <= dist_max) || !(occ_max >= 1.0)) {
    throw std::invalid_argument("EpisodeConfig: bad FoV attribute ranges");
  }
}

HoloEnv::HoloEnv(const EpisodeConfig& config, const ActionCodec& codec,
                 std::uint64_t seed)
    : config_(config),
      codec_(codec),
      seed_(seed),
      ladder_(config.ladder_rates) {
  config_.validate();
  if (codec_.levels != ladder_.levels()) {
    throw std::invalid_argument("HoloEnv: codec levels disagree with ladder");
  }
  rate_scale_ = ladder_.top();
  quality_scale_ =
      config_.fov_tiles *
      (config_.weights.dist_weight / config_.dist_min +
       config_.weights.occ_weight) *
      std::max(1.0, std::abs(std::log(config_.weights.rate_weight)));
  prev_rate_ = Eigen::VectorXd::Zero(config_.dims.users);
  prev_quality_ = Eigen::VectorXd::Zero(config_.dims.users);
}

int HoloEnv::observation_size() const {
  const int users = config_.dims.users;
  return 2 * users + 2 + 2 * users * config_.fov_tiles;
}

int HoloEnv::action_heads() const {
  return config_.dims.users * config_.fov_tiles;
}

Eigen::VectorXd HoloEnv::reset(int episode) {
  if (episode < 0) {
    throw std::invalid_argument("HoloEnv: episode index must be >= 0");
  }
  episode_ = episode;
  slot_ = 1;
  rng::Engine eng(rng::mix(seed_, rng::Stream::kEpisode, episode));
  deadline_ = eng.uniform(config_.deadline_min, config_.deadline_max);
  cycles_ = eng.uniform(config_.cycles_min, config_.cycles_max);
  prev_rate_.setZero();
  prev_quality_.setZero();
  buffers_.assign(static_cast<std::size_t>(config_.dims.users),
                  BufferState{config_.buffer_initial, config_.buffer_capacity});
  feasible_count_ = 0;
  last_outcome_ = StepOutcome{};
  draw_fov();
  return build_observation();
}

void HoloEnv::draw_fov() {
  const int users = config_.dims.users;
  const int tiles = config_.dims.tiles;
  fov_.assign(static_cast<std::size_t>(users), FovState{});
  for (int k = 0; k < users; ++k) {
    rng::Engine eng(rng::mix(seed_, rng::Stream::kFov, episode_, slot_, k));
    // Partial Fisher-Yates draw of distinct visible tile ids.
    std::vector<int> ids(static_cast<std::size_t>(tiles));
    for (int i = 0; i < tiles; ++i) ids[static_cast<std::size_t>(i)] = i;
    FovState& fov = fov_[static_cast<std::size_t>(k)];
    fov.tiles.resize(static_cast<std::size_t>(config_.fov_tiles));
    for (int i = 0; i < config_.fov_tiles; ++i) {
      const int j =
          i + static_cast<int>(eng.below(static_cast<std::uint64_t>(tiles - i)));
      std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
      FovTile& tile = fov.tiles[static_cast<std::size_t>(i)];
      tile.tile = ids[static_cast<std::size_t>(i)];
      tile.distance = eng.uniform(config_.dist_min, config_.dist_max);
      tile.occlusion = eng.uniform(1.0, config_.occ_max);
    }
  }
}

Eigen::VectorXd HoloEnv::build_observation() const {
  const int users = config_.dims.users;
  const int fov_tiles = config_.fov_tiles;
  Eigen::VectorXd obs(observation_size());
  Eigen::Index pos = 0;
  for (int k = 0; k < users; ++k) obs(pos++) = prev_rate_(k) / rate_scale_;
  for (int k = 0; k < users; ++k) obs(pos++) = prev_quality_(k) / quality_scale_;
  obs(pos++) = deadline_ / config_.tile_time;
  obs(pos++) = cycles_ / config_.cycles_max;
  for (int k = 0; k < users; ++k) {
    const FovState& fov = fov_[static_cast<std::size_t>(k)];
    for (int i = 0; i < fov_tiles; ++i) {
      obs(pos++) = fov.tiles[static_cast<std::size_t>(i)].distance /
                   config_.dist_max;
      obs(pos++) = fov.tiles[static_cast<std::size_t>(i)].occlusion /
                   config_.occ_max;
    }
  }
  return obs;
}

StepOutcome HoloEnv::step_selections(
    const std::vector<TileSelection>& selections) {
  if (episode_ < 0) throw std::logic_error("HoloEnv: reset() before stepping");
  if (done()) throw std::logic_error("HoloEnv: episode already finished");
  const int users = config_.dims.users;
  if (static_cast<int>(selections.size()) != users) {
    throw std::invalid_argument("HoloEnv: one selection per user required");
  }
  const TimingConfig timing{deadline_, config_.tile_time,
                            config_.compress_ratio};
  const DeviceModel device{cycles_, config_.bits_per_cycle};

  // Timing stage: per-user SINR floors; a user whose decode time already
  // exceeds the deadline sinks the whole slot.
  Eigen::VectorXd targets(users);
  bool timing_ok = true;
  for (int k = 0; k < users; ++k) {
    validate_selection(selections[static_cast<std::size_t>(k)],
                       fov_[static_cast<std::size_t>(k)], ladder_);
    const auto gamma =
        required_sinr(selections[static_cast<std::size_t>(k)], ladder_, timing,
                      device, config_.noise, config_.min_sinr);
    if (!gamma) {
      timing_ok = false;
      break;
    }
    targets(k) = *gamma;
  }

  StepOutcome outcome;
  outcome.rates = Eigen::VectorXd::Zero(users);
  outcome.sinr = Eigen::VectorXd::Zero(users);
  outcome.sinr_target =
      timing_ok ? targets : Eigen::VectorXd::Zero(users);
  outcome.total_power = std::numeric_limits<double>::quiet_NaN();

  const ChannelRealization ch = sample_channel(
      config_.dims, config_.pathloss,
      rng::mix(seed_, rng::Stream::kChannel, episode_), slot_);

  if (!timing_ok) {
    outcome.status = BeamStatus::kInfeasible;
    outcome.feasible = false;
  } else {
    const BeamformingProblem problem =
        build_problem(ch, targets, config_.ap_power, config_.noise);
    const BeamformerSolution sol = solve_beamforming(problem, solver_);
    outcome.status = sol.status;
    outcome.feasible = sol.status == BeamStatus::kFeasible;
    if (outcome.feasible) {
      outcome.sinr = sinr(ch, sol.w, config_.noise);
      for (int k = 0; k < users; ++k) {
        outcome.rates(k) = rate(outcome.sinr(k), config_.noise.bandwidth);
      }
      outcome.total_power = sol.total_power;
    }
  }

  // Experience scoring. Quality reflects the requested selection; the
  // buffer may or may not credit rejected slots depending on the accounting
  // mode; the slot reward is zeroed whenever the slot was not delivered.
  outcome.records.resize(static_cast<std::size_t>(users));
  double reward = 0.0;
  for (int k = 0; k < users; ++k) {
    const double quality =
        video_quality(fov_[static_cast<std::size_t>(k)],
                      selections[static_cast<std::size_t>(k)], ladder_,
                      config_.weights);
    const double fluctuation = quality_fluctuation(quality, prev_quality_(k));
    BufferState& buffer = buffers_[static_cast<std::size_t>(k)];
    const double credited =
        (config_.strict_buffer && !outcome.feasible) ? 0.0 : config_.tile_time;
    buffer = buffer_update(buffer, credited, deadline_);
    const bool rebuffered = rebuffer_indicator(buffer);
    QoeRecord& rec = outcome.records[static_cast<std::size_t>(k)];
    rec.quality = quality;
    rec.fluctuation = fluctuation;
    rec.rebuffered = rebuffered;
    rec.value = qoe_slot(quality, fluctuation, rebuffered, config_.weights);
    rec.feasible = outcome.feasible;
    reward += rec.value;
    prev_quality_(k) = quality;
    prev_rate_(k) = outcome.rates(k);
  }
  outcome.reward = outcome.feasible ? reward : 0.0;
  feasible_count_ += outcome.feasible ? 1 : 0;

  ++slot_;
  if (!done()) draw_fov();
  last_outcome_ = outcome;
  return outcome;
}

HoloEnv::Step HoloEnv::step(const std::vector<int>& action) {
  const int users = config_.dims.users;
  const int fov_tiles = config_.fov_tiles;
  if (static_cast<int>(action.size()) != action_heads()) {
    throw std::invalid_argument("HoloEnv: one choice per (user, tile) head");
  }
  std::vector<TileSelection> selections(static_cast<std::size_t>(users));
  for (int k = 0; k < users; ++k) {
    TileSelection& sel = selections[static_cast<std::size_t>(k)];
    sel.level.resize(static_cast<std::size_t>(fov_tiles));
    sel.compress.resize(static_cast<std::size_t>(fov_tiles));
    for (int i = 0; i < fov_tiles; ++i) {
      const auto [level, compress] =
          codec_.decode(action[static_cast<std::size_t>(k * fov_tiles + i)]);
      sel.level[static_cast<std::size_t>(i)] = level;
      sel.compress[static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(compress);
    }
  }
  const StepOutcome outcome = step_selections(selections);
  Step step;
  step.reward = outcome.reward;
  step.done = done();
  step.obs = step.done ? Eigen::VectorXd::Zero(observation_size())
                       : build_observation();
  return step;
}

std::vector<int> HoloEnv::uniform_action(int level, int compress) const {
  return std::vector<int>(static_cast<std::size_t>(action_heads()),
                          codec_.encode(level, compress));
}

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> schemes = {
      Scheme::kProposed, Scheme::kFixedCoop, Scheme::kAdaptiveNoCompression,
      Scheme::kAdaptiveSingleAp, Scheme::kFixedSingleAp};
  return schemes;
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kFixedCoop: return "fixed_coop";
    case Scheme::kAdaptiveNoCompression: return "adaptive_nocomp";
    case Scheme::kAdaptiveSingleAp: return "adaptive_single_ap";
    case Scheme::kFixedSingleAp: return "fixed_single_ap";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : all_schemes()) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme: " + name);
}

bool scheme_is_learned(Scheme scheme) {
  return scheme == Scheme::kProposed ||
         scheme == Scheme::kAdaptiveNoCompression ||
         scheme == Scheme::kAdaptiveSingleAp;
}

EpisodeConfig scheme_config(const EpisodeConfig& base, Scheme scheme) {
  EpisodeConfig cfg = base;
  if (scheme == Scheme::kAdaptiveSingleAp || scheme == Scheme::kFixedSingleAp) {
    cfg.dims.aps = 1;
    cfg.ap_power = base.ap_power.head(1);
    cfg.pathloss = base.pathloss.leftCols(1);
  }
  return cfg;
}

ActionCodec scheme_codec(int levels, Scheme scheme) {
  ActionCodec codec;
  codec.levels = levels;
  codec.with_compression = scheme != Scheme::kAdaptiveNoCompression;
  return codec;
}

std::vector<int> fixed_scheme_action(const HoloEnv& env) {
  const int level = std::min(2, env.action_codec().levels);
  return env.uniform_action(level, 0);
}

}  // namespace holostream

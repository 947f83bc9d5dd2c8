#pragma once

#include <vector>

#include "holostream/media.hpp"

namespace holostream {

// Weights of the per-slot experience score. fluctuation_penalty and
// rebuffer_penalty trade smoothness and stall-freedom against raw quality;
// dist_weight/occ_weight shape per-tile importance; rate_weight scales ladder
// rates inside the logarithmic quality term.
struct QoeWeights {
  double fluctuation_penalty = 0.5; // alpha_1
  double rebuffer_penalty = 0.5;    // alpha_2
  double dist_weight = 1.0;
  double occ_weight = 1.0;
  double rate_weight = 1.0;

  void validate() const {
    if (!(fluctuation_penalty >= 0.0) || !(rebuffer_penalty >= 0.0)) {
      throw std::invalid_argument("QoeWeights: penalties must be >= 0");
    }
    if (!(dist_weight > 0.0) || !(occ_weight > 0.0) || !(rate_weight > 0.0)) {
      throw std::invalid_argument("QoeWeights: weights must be > 0");
    }
  }
};

// Playback buffer occupancy in seconds of content, clamped to [0, capacity].
struct BufferState {
  double level = 0.0;
  double capacity = 0.0;

  void validate() const {
    if (!(capacity > 0.0) || level < 0.0 || level > capacity) {
      throw std::invalid_argument("BufferState: need 0 <= level <= capacity");
    }
  }
};

// Everything scored for one (user, slot) pair.
struct QoeRecord {
  double quality = 0.0;      // Q
  double fluctuation = 0.0;  // |Q - Q_prev|
  bool rebuffered = false;   // buffer empty after the slot
  double value = 0.0;        // Q - a1*|dQ| - a2*1{rebuffered}
  bool feasible = true;      // slot delivered on time
};

// Perception-weighted log quality of a selection:
//   sum_i (dist_weight/distance_i + occ_weight/occlusion_i)
//          * ln(rate_weight * mu_{l_i} / mu_L).
// An empty field of view scores 0. Throws std::domain_error when the log
// argument is not positive.
double video_quality(const FovState& fov, const TileSelection& sel,
                     const BitrateLadder& ladder, const QoeWeights& weights);

double quality_fluctuation(double quality, double prev_quality);

// One slot of buffer dynamics: gain tile_time of content, spend `deadline`
// of wall time, clamp into [0, capacity].
BufferState buffer_update(const BufferState& buffer, double tile_time,
                          double deadline);

bool rebuffer_indicator(const BufferState& buffer);

double qoe_slot(double quality, double fluctuation, bool rebuffered,
                const QoeWeights& weights);

// Sum of record values over a rectangular user-by-slot grid. Ragged input is
// a structural error.
double qoe_aggregate(const std::vector<std::vector<QoeRecord>>& records);

}  // namespace holostream

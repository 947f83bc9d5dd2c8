#include "holostream/qoe.hpp"

#include <cmath>

namespace holostream {

double video_quality(const FovState& fov, const TileSelection& sel,
                     const BitrateLadder& ladder, const QoeWeights& weights) {
  weights.validate();
  fov.validate();
  validate_selection(sel, fov, ladder);
  double q = 0.0;
  for (std::size_t i = 0; i < fov.tiles.size(); ++i) {
    const FovTile& tile = fov.tiles[i];
    const double arg =
        weights.rate_weight * ladder.rate_of(sel.level[i]) / ladder.top();
    if (!(arg > 0.0)) {
      throw std::domain_error("video_quality: log argument must be > 0");
    }
    q += (weights.dist_weight / tile.distance +
          weights.occ_weight / tile.occlusion) *
         std::log(arg);
  }
  return q;
}

double quality_fluctuation(double quality, double prev_quality) {
  return std::abs(quality - prev_quality);
}

BufferState buffer_update(const BufferState& buffer, double tile_time,
                          double deadline) {
  buffer.validate();
  if (!(tile_time >= 0.0) || !(deadline >= 0.0)) {
    throw std::invalid_argument("buffer_update: times must be >= 0");
  }
  BufferState next = buffer;
  next.level =
      std::min(buffer.capacity, std::max(buffer.level + tile_time - deadline, 0.0));
  return next;
}

bool rebuffer_indicator(const BufferState& buffer) {
  return buffer.level == 0.0;
}

double qoe_slot(double quality, double fluctuation, bool rebuffered,
                const QoeWeights& weights) {
  weights.validate();
  if (!(fluctuation >= 0.0)) {
    throw std::invalid_argument("qoe_slot: fluctuation must be >= 0");
  }
  return quality - weights.fluctuation_penalty * fluctuation -
         weights.rebuffer_penalty * (rebuffered ? 1.0 : 0.0);
}

double qoe_aggregate(const std::vector<std::vector<QoeRecord>>& records) {
  if (records.empty()) return 0.0;
  const std::size_t slots = records.front().size();
  double total = 0.0;
  for (const auto& row : records) {
    if (row.size() != slots) {
      throw std::invalid_argument(
          "qoe_aggregate: records must form a rectangular user-by-slot grid");
    }
    for (const QoeRecord& r : row) total += r.value;
  }
  return total;
}

}  // namespace holostream

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "holostream/channel.hpp"

namespace holostream {

// Non-decreasing ladder of tile encoding rates [bit/s]. Levels are 1-based
// throughout: level l maps to rates()[l-1].
class BitrateLadder {
 public:
  BitrateLadder() = default;
  explicit BitrateLadder(std::vector<double> rates) : rates_(std::move(rates)) {
    if (rates_.empty()) {
      throw std::invalid_argument("BitrateLadder: must hold at least one rate");
    }
    double prev = 0.0;
    for (double r : rates_) {
      if (!(r > 0.0) || r < prev) {
        throw std::invalid_argument(
            "BitrateLadder: rates must be positive and non-decreasing");
      }
      prev = r;
    }
  }

  int levels() const { return static_cast<int>(rates_.size()); }
  double rate_of(int level) const {
    if (level < 1 || level > levels()) {
      throw std::invalid_argument("BitrateLadder: level out of range");
    }
    return rates_[static_cast<std::size_t>(level) - 1];
  }
  double top() const { return rates_.back(); }
  const std::vector<double>& rates() const { return rates_; }

 private:
  std::vector<double> rates_;
};

// One visible tile in a user's field of view.
struct FovTile {
  int tile = 0;          // scene tile id, informational
  double distance = 1.0; // viewing distance, > 0
  double occlusion = 1.0;// occlusion grade, >= 1 (1 = fully visible)
};

// A user's field of view for one slot.
struct FovState {
  std::vector<FovTile> tiles;

  int size() const { return static_cast<int>(tiles.size()); }

  void validate() const {
    for (const FovTile& t : tiles) {
      if (!(t.distance > 0.0)) {
        throw std::invalid_argument("FovState: distance must be > 0");
      }
      if (!(t.occlusion >= 1.0)) {
        throw std::invalid_argument("FovState: occlusion must be >= 1");
      }
    }
  }
};

// Per-tile decision for one user and slot: a ladder level and a compression
// flag, aligned index-for-index with the user's FovState.
struct TileSelection {
  std::vector<int> level;           // 1-based ladder levels
  std::vector<std::uint8_t> compress; // 0 = raw, 1 = compressed

  int size() const { return static_cast<int>(level.size()); }
};

// Receiver compute: decode throughput is cycles_per_s * bits_per_cycle.
struct DeviceModel {
  double cycles_per_s = 0.0;
  double bits_per_cycle = 1.0;

  void validate() const {
    if (!(cycles_per_s > 0.0) || !(bits_per_cycle > 0.0)) {
      throw std::invalid_argument("DeviceModel: throughput terms must be > 0");
    }
  }
};

// Slot timing: every tile must be delivered and decoded within `deadline`.
// `tile_time` is the playback duration covered by one tile payload, and
// `compress_ratio` is the size multiplier applied by compression.
struct TimingConfig {
  double deadline = 0.0;       // tau [s]
  double tile_time = 0.0;      // T_g [s]
  double compress_ratio = 1.0; // phi in [0, 1]

  void validate() const {
    if (!(deadline > 0.0) || !(tile_time > 0.0)) {
      throw std::invalid_argument("TimingConfig: times must be > 0");
    }
    if (!(compress_ratio >= 0.0 && compress_ratio <= 1.0)) {
      throw std::invalid_argument(
          "TimingConfig: compress_ratio must lie in [0, 1]");
    }
  }
};

// Throws unless the selection is aligned with the FoV and every level is on
// the ladder.
void validate_selection(const TileSelection& sel, const FovState& fov,
                        const BitrateLadder& ladder);

// Total bits scheduled for one user this slot:
//   sum_i [(1 - eta_i) + phi * eta_i] * mu_{l_i} * T_g.
double payload_bits(const TileSelection& sel, const BitrateLadder& ladder,
                    const TimingConfig& timing);

// Air time for `bits` at link rate `rate_bps`. Zero rate with a nonzero
// payload yields +infinity; a zero payload takes zero time at any rate.
double transmission_time(double bits, double rate_bps);

// Receiver-side decompression time: compressed bits / (C_max * b).
double decoding_time(const TileSelection& sel, const BitrateLadder& ladder,
                     const TimingConfig& timing, const DeviceModel& device);

// A slot works iff transmission plus decoding meets the deadline.
bool slot_feasible(double tx_time, double decode_time, double deadline);

// Smallest SINR whose Shannon rate delivers the payload within the deadline
// after reserving decode time, floored at `min_sinr` (the feasibility floor
// applied to every served user). Returns nullopt when decoding alone reaches
// or exceeds the deadline, in which case no rate can save the slot.
std::optional<double> required_sinr(const TileSelection& sel,
                                    const BitrateLadder& ladder,
                                    const TimingConfig& timing,
                                    const DeviceModel& device,
                                    const NoiseModel& noise, double min_sinr);

}  // namespace holostream

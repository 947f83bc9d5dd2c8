#include "holostream/media.hpp"

#include <cmath>
#include <limits>

namespace holostream {

void validate_selection(const TileSelection& sel, const FovState& fov,
                        const BitrateLadder& ladder) {
  if (sel.level.size() != sel.compress.size()) {
    throw std::invalid_argument(
        "TileSelection: level and compress arrays must align");
  }
  if (sel.size() != fov.size()) {
    throw std::invalid_argument(
        "TileSelection: one decision per visible tile required");
  }
  for (std::size_t i = 0; i < sel.level.size(); ++i) {
    if (sel.level[i] < 1 || sel.level[i] > ladder.levels()) {
      throw std::invalid_argument("TileSelection: level off the ladder");
    }
    if (sel.compress[i] > 1) {
      throw std::invalid_argument("TileSelection: compress flag must be 0 or 1");
    }
  }
}

double payload_bits(const TileSelection& sel, const BitrateLadder& ladder,
                    const TimingConfig& timing) {
  timing.validate();
  if (sel.level.size() != sel.compress.size()) {
    throw std::invalid_argument(
        "TileSelection: level and compress arrays must align");
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < sel.level.size(); ++i) {
    const double tile_bits = ladder.rate_of(sel.level[i]) * timing.tile_time;
    bits += sel.compress[i] ? timing.compress_ratio * tile_bits : tile_bits;
  }
  return bits;
}

double transmission_time(double bits, double rate_bps) {
  if (bits < 0.0 || rate_bps < 0.0) {
    throw std::invalid_argument("transmission_time: negative input");
  }
  if (bits == 0.0) return 0.0;
  if (rate_bps == 0.0) return std::numeric_limits<double>::infinity();
  return bits / rate_bps;
}

double decoding_time(const TileSelection& sel, const BitrateLadder& ladder,
                     const TimingConfig& timing, const DeviceModel& device) {
  timing.validate();
  device.validate();
  if (sel.level.size() != sel.compress.size()) {
    throw std::invalid_argument(
        "TileSelection: level and compress arrays must align");
  }
  double compressed_bits = 0.0;
  for (std::size_t i = 0; i < sel.level.size(); ++i) {
    if (sel.compress[i]) {
      compressed_bits +=
          timing.compress_ratio * ladder.rate_of(sel.level[i]) * timing.tile_time;
    }
  }
  return compressed_bits / (device.cycles_per_s * device.bits_per_cycle);
}

bool slot_feasible(double tx_time, double decode_time, double deadline) {
  return tx_time + decode_time <= deadline;
}

std::optional<double> required_sinr(const TileSelection& sel,
                                    const BitrateLadder& ladder,
                                    const TimingConfig& timing,
                                    const DeviceModel& device,
                                    const NoiseModel& noise, double min_sinr) {
  noise.validate();
  if (!(min_sinr >= 0.0)) {
    throw std::invalid_argument("required_sinr: min_sinr must be >= 0");
  }
  const double bits = payload_bits(sel, ladder, timing);
  const double decode = decoding_time(sel, ladder, timing, device);
  if (decode >= timing.deadline) {
    return std::nullopt;  // decoding alone blows the deadline
  }
  // Invert r = W log2(1 + gamma) at the tightest admissible air time.
  const double exponent =
      bits / (noise.bandwidth * (timing.deadline - decode));
  const double gamma = std::exp2(exponent) - 1.0;
  return std::max(min_sinr, gamma);
}

}  // namespace holostream

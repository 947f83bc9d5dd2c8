#pragma once

#include <stdexcept>

namespace holostream {

// Problem-size descriptor shared by every subsystem.
//   aps        M  transmitters, each with `antennas` (I) elements
//   users      K  receivers (one stream each)
//   tiles      N  tiles in the full scene
//   levels     L  entries in the bitrate ladder
//   slots      T  decision slots per episode
struct ScenarioDims {
  int aps = 0;
  int users = 0;
  int antennas = 0;
  int tiles = 0;
  int levels = 0;
  int slots = 0;

  void validate() const {
    if (aps < 1 || users < 1 || antennas < 1 || tiles < 1 || levels < 1 ||
        slots < 1) {
      throw std::invalid_argument("ScenarioDims: all dimensions must be >= 1");
    }
  }
};

}  // namespace holostream

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "holostream/scenario.hpp"

namespace holostream {

// Receiver-side noise: flat spectral density n0 [W/Hz] over bandwidth [Hz].
struct NoiseModel {
  double n0 = 0.0;
  double bandwidth = 0.0;

  double power() const { return n0 * bandwidth; }

  void validate() const {
    if (!(n0 > 0.0) || !(bandwidth > 0.0)) {
      throw std::invalid_argument("NoiseModel: n0 and bandwidth must be > 0");
    }
  }
};

// One slot of block-fading channels. coeff(k, m) is the length-I vector from
// AP m to user k; stacked(k) concatenates a user's vectors AP-by-AP into a
// single length M*I vector, the layout used by the beamforming subsystem.
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(int users, int aps, int antennas)
      : users_(users),
        aps_(aps),
        antennas_(antennas),
        coeffs_(static_cast<std::size_t>(users) * aps,
                Eigen::VectorXcd::Zero(antennas)) {}

  int users() const { return users_; }
  int aps() const { return aps_; }
  int antennas() const { return antennas_; }

  Eigen::VectorXcd& coeff(int k, int m) { return coeffs_[index(k, m)]; }
  const Eigen::VectorXcd& coeff(int k, int m) const {
    return coeffs_[index(k, m)];
  }

  Eigen::VectorXcd stacked(int k) const {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(aps_) * antennas_);
    for (int m = 0; m < aps_; ++m) {
      out.segment(static_cast<Eigen::Index>(m) * antennas_, antennas_) =
          coeff(k, m);
    }
    return out;
  }

 private:
  std::size_t index(int k, int m) const {
    if (k < 0 || k >= users_ || m < 0 || m >= aps_) {
      throw std::out_of_range("ChannelRealization: (user, ap) out of range");
    }
    return static_cast<std::size_t>(k) * aps_ + m;
  }

  int users_ = 0;
  int aps_ = 0;
  int antennas_ = 0;
  std::vector<Eigen::VectorXcd> coeffs_;
};

// Draws one slot of i.i.d. Rayleigh-fading vectors. Entry (k, m, i) is
// circularly-symmetric complex Gaussian with variance pathloss(k, m), i.e.
// real and imaginary parts are N(0, pathloss/2). The draw for a given
// (k, m) depends only on (seed, slot, k, m), so slots, users and links can be
// generated independently and in any order.
ChannelRealization sample_channel(const ScenarioDims& dims,
                                  const Eigen::MatrixXd& pathloss,
                                  std::uint64_t seed, int slot);

// Per-user SINR under beamformers w (w[k] stacked across APs, length M*I):
// |h_k^H w_k|^2 / (sum_{k' != k} |h_k^H w_k'|^2 + n0*W).
Eigen::VectorXd sinr(const ChannelRealization& ch,
                     const std::vector<Eigen::VectorXcd>& w,
                     const NoiseModel& noise);

// Shannon rate in bit/s: bandwidth * log2(1 + gamma). Throws std::domain_error
// for negative gamma.
double rate(double gamma, double bandwidth);

}  // namespace holostream

#include "holostream/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "holostream/rng.hpp"

namespace holostream {

ChannelRealization sample_channel(const ScenarioDims& dims,
                                  const Eigen::MatrixXd& pathloss,
                                  std::uint64_t seed, int slot) {
  dims.validate();
  if (pathloss.rows() != dims.users || pathloss.cols() != dims.aps) {
    throw std::invalid_argument("sample_channel: pathloss must be users x aps");
  }
  if ((pathloss.array() <= 0.0).any()) {
    throw std::invalid_argument("sample_channel: pathloss entries must be > 0");
  }

  ChannelRealization ch(dims.users, dims.aps, dims.antennas);
  for (int k = 0; k < dims.users; ++k) {
    for (int m = 0; m < dims.aps; ++m) {
      rng::Engine eng(rng::mix(seed, slot, k, m));
      const double sigma = std::sqrt(pathloss(k, m) / 2.0);
      Eigen::VectorXcd& h = ch.coeff(k, m);
      for (int i = 0; i < dims.antennas; ++i) {
        const double re = sigma * eng.gaussian();
        const double im = sigma * eng.gaussian();
        h(i) = std::complex<double>(re, im);
      }
    }
  }
  return ch;
}

Eigen::VectorXd sinr(const ChannelRealization& ch,
                     const std::vector<Eigen::VectorXcd>& w,
                     const NoiseModel& noise) {
  noise.validate();
  const int users = ch.users();
  const Eigen::Index stacked_len =
      static_cast<Eigen::Index>(ch.aps()) * ch.antennas();
  if (static_cast<int>(w.size()) != users) {
    throw std::invalid_argument("sinr: need one beamformer per user");
  }
  for (const auto& wk : w) {
    if (wk.size() != stacked_len) {
      throw std::invalid_argument("sinr: beamformer length must be aps*antennas");
    }
  }

  Eigen::VectorXd out(users);
  for (int k = 0; k < users; ++k) {
    const Eigen::VectorXcd hk = ch.stacked(k);
    double desired = 0.0;
    double interference = 0.0;
    for (int j = 0; j < users; ++j) {
      const double p = std::norm(hk.dot(w[j]));  // |h_k^H w_j|^2
      if (j == k) {
        desired = p;
      } else {
        interference += p;
      }
    }
    out(k) = desired / (interference + noise.power());
  }
  return out;
}

double rate(double gamma, double bandwidth) {
  if (gamma < 0.0) {
    throw std::domain_error("rate: SINR must be non-negative");
  }
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("rate: bandwidth must be > 0");
  }
  return bandwidth * std::log2(1.0 + gamma);
}

}  // namespace holostream

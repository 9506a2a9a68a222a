#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "clssr/rng.hpp"

namespace clssr {

using cxd = std::complex<double>;

// Radio parameters shared by every link in a scenario. noise_factor_tau
// scales the thermal noise floor and is the knob swept by the experiments.
struct LinkBudget {
  double transmit_power_dbm = 20.0;
  double bandwidth_hz = 1e6;
  double noise_density_dbm_hz = -174.0;
  double noise_factor_tau = 1.0;
  double pathloss_exponent = 2.6;
  double pathloss_ref_db = 30.0;

  // Total transmit power cap in watts.
  double max_transmit_power_w() const;
  void validate() const;
};

double dbm_to_watt(double dbm);

// Thermal noise power in watts over the configured bandwidth, scaled by tau.
double noise_power(const LinkBudget& budget);

// Planar positions of the base station, the legitimate user and the
// eavesdroppers, in meters.
struct NodeGeometry {
  std::array<double, 2> tx_pos{0.0, 0.0};
  std::array<double, 2> user_pos{500.0, 500.0};
  std::vector<std::array<double, 2>> eve_pos{{{400.0, 450.0}, {800.0, 300.0}}};

  std::size_t num_eves() const { return eve_pos.size(); }
  void validate() const;
};

// Selects the receiving end of a link: the user or eavesdropper #index.
struct LinkEnd {
  bool user = true;
  std::size_t eve_index = 0;

  static LinkEnd the_user() { return {true, 0}; }
  static LinkEnd eve(std::size_t index) { return {false, index}; }
};

double node_distance(const NodeGeometry& geometry, LinkEnd end);

// Log-distance path loss: ref + 10 * exponent * log10(d).
double path_loss_db(const LinkBudget& budget, const NodeGeometry& geometry,
                    LinkEnd end);

struct AntennaMode {
  int tx_antennas = 2;
  int rx_antennas = 2;  // 1 selects the single-receive-antenna variant
  void validate() const;
};

// Dense row-major complex matrix sized rx x tx. Channels here never exceed
// 2x2, so no linear algebra library is pulled in for them.
class ChannelMatrix {
 public:
  ChannelMatrix(int rows, int cols);

  cxd& at(int r, int c) { return m_[static_cast<std::size_t>(r) * cols_ + c]; }
  const cxd& at(int r, int c) const {
    return m_[static_cast<std::size_t>(r) * cols_ + c];
  }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double frobenius_sq() const;
  bool finite() const;

 private:
  int rows_, cols_;
  std::vector<cxd> m_;
};

// Rayleigh-faded channel: i.i.d. CN(0,1) entries attenuated by the
// amplitude-domain path loss of the selected link.
ChannelMatrix sample_channel(Philox4x32& rng, const LinkBudget& budget,
                             const NodeGeometry& geometry, LinkEnd end,
                             const AntennaMode& mode);

// Unit-norm transmit direction plus the power allocated to it.
struct Beamformer {
  std::vector<cxd> weights;
  double power_w = 0.0;

  double weight_norm_sq() const;
};

// Received signal power ||H f||^2 * power_w. Throws on shape mismatch.
double beam_gain(const ChannelMatrix& h, const Beamformer& f);

// Capacity B * log2(1 + gain / sigma2) in bit/s.
double shannon_rate(const LinkBudget& budget, double gain_w, double sigma2_w);

// Post-combining SNR of rate-one orthogonal space-time coding across
// tx antennas: (||H||_F^2 / n_tx) * power / sigma2.
double alamouti_snr(const ChannelMatrix& h, double sigma2_w, double power_w);

// Gaussian tail probability Q(x).
double gaussian_q(double x);

// Gray-coded QPSK symbol error rate at post-combining SNR gamma.
double ser_qpsk(double gamma);

// Probability that a codeword of `bits` bits (2 bits per symbol) contains at
// least one symbol error.
double codeword_error(double symbol_error, int bits);

// Maximum-ratio transmission: unit-norm dominant right singular vector of H.
std::vector<cxd> mrt_weights(const ChannelMatrix& h);

}  // namespace clssr

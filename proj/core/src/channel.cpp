#include "clssr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clssr/errors.hpp"

namespace clssr {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double LinkBudget::max_transmit_power_w() const {
  return dbm_to_watt(transmit_power_dbm);
}

void LinkBudget::validate() const {
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be > 0");
  if (!(noise_factor_tau >= 1.0))
    throw ConfigError("noise_factor_tau must be >= 1");
  if (!(pathloss_exponent >= 2.0))
    throw ConfigError("pathloss_exponent must be >= 2");
  if (!std::isfinite(transmit_power_dbm) || !std::isfinite(pathloss_ref_db) ||
      !std::isfinite(noise_density_dbm_hz))
    throw ConfigError("link budget parameters must be finite");
}

double noise_power(const LinkBudget& budget) {
  const double total_dbm =
      budget.noise_density_dbm_hz + 10.0 * std::log10(budget.bandwidth_hz);
  return budget.noise_factor_tau * dbm_to_watt(total_dbm);
}

void NodeGeometry::validate() const {
  if (eve_pos.empty()) throw ConfigError("at least one eavesdropper required");
  const auto dist_sq = [&](const std::array<double, 2>& p) {
    const double dx = p[0] - tx_pos[0];
    const double dy = p[1] - tx_pos[1];
    return dx * dx + dy * dy;
  };
  if (dist_sq(user_pos) <= 0.0)
    throw ConfigError("user must not sit on the transmitter");
  for (const auto& e : eve_pos)
    if (dist_sq(e) <= 0.0)
      throw ConfigError("eavesdropper must not sit on the transmitter");
}

double node_distance(const NodeGeometry& geometry, LinkEnd end) {
  const auto& p = end.user ? geometry.user_pos
                           : geometry.eve_pos.at(end.eve_index);
  const double dx = p[0] - geometry.tx_pos[0];
  const double dy = p[1] - geometry.tx_pos[1];
  return std::hypot(dx, dy);
}

double path_loss_db(const LinkBudget& budget, const NodeGeometry& geometry,
                    LinkEnd end) {
  return budget.pathloss_ref_db +
         10.0 * budget.pathloss_exponent *
             std::log10(node_distance(geometry, end));
}

void AntennaMode::validate() const {
  if (tx_antennas != 2)
    throw ConfigError("only the two-transmit-antenna mode is supported");
  if (rx_antennas != 1 && rx_antennas != 2)
    throw ConfigError("rx_antennas must be 1 or 2");
}

ChannelMatrix::ChannelMatrix(int rows, int cols)
    : rows_(rows), cols_(cols),
      m_(static_cast<std::size_t>(rows) * cols, cxd{}) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("channel matrix dimensions must be positive");
}

double ChannelMatrix::frobenius_sq() const {
  double s = 0.0;
  for (const auto& z : m_) s += std::norm(z);
  return s;
}

bool ChannelMatrix::finite() const {
  for (const auto& z : m_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ChannelMatrix sample_channel(Philox4x32& rng, const LinkBudget& budget,
                             const NodeGeometry& geometry, LinkEnd end,
                             const AntennaMode& mode) {
  const double pl_db = path_loss_db(budget, geometry, end);
  const double amplitude = std::pow(10.0, -pl_db / 20.0);
  ChannelMatrix h(mode.rx_antennas, mode.tx_antennas);
  for (int r = 0; r < h.rows(); ++r)
    for (int c = 0; c < h.cols(); ++c)
      h.at(r, c) = amplitude * rng.next_cgaussian();
  return h;
}

double Beamformer::weight_norm_sq() const {
  double s = 0.0;
  for (const auto& w : weights) s += std::norm(w);
  return s;
}

double beam_gain(const ChannelMatrix& h, const Beamformer& f) {
  if (static_cast<std::size_t>(h.cols()) != f.weights.size())
    throw std::invalid_argument("beamformer length does not match channel");
  double gain = 0.0;
  for (int r = 0; r < h.rows(); ++r) {
    cxd s{};
    for (int c = 0; c < h.cols(); ++c) s += h.at(r, c) * f.weights[c];
    gain += std::norm(s);
  }
  return gain * f.power_w;
}

double shannon_rate(const LinkBudget& budget, double gain_w, double sigma2_w) {
  if (!(sigma2_w > 0.0)) throw std::invalid_argument("noise power must be > 0");
  return budget.bandwidth_hz * std::log2(1.0 + gain_w / sigma2_w);
}

double alamouti_snr(const ChannelMatrix& h, double sigma2_w, double power_w) {
  if (!(sigma2_w > 0.0)) throw std::invalid_argument("noise power must be > 0");
  return h.frobenius_sq() / h.cols() * power_w / sigma2_w;
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double ser_qpsk(double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("SNR must be nonnegative");
  const double q = gaussian_q(std::sqrt(gamma));
  return 2.0 * q - q * q;
}

double codeword_error(double symbol_error, int bits) {
  if (bits <= 0) throw std::invalid_argument("codeword length must be > 0");
  const double p = std::clamp(symbol_error, 0.0, 1.0);
  const int symbols = (bits + 1) / 2;
  return 1.0 - std::pow(1.0 - p, symbols);
}

std::vector<cxd> mrt_weights(const ChannelMatrix& h) {
  if (h.cols() == 1) return {cxd{1.0, 0.0}};
  if (h.cols() != 2)
    throw std::invalid_argument("MRT implemented for at most two tx antennas");
  // Dominant eigenvector of the 2x2 Hermitian Gram matrix H^H H.
  double a = 0.0, d = 0.0;
  cxd b{};
  for (int r = 0; r < h.rows(); ++r) {
    a += std::norm(h.at(r, 0));
    d += std::norm(h.at(r, 1));
    b += std::conj(h.at(r, 0)) * h.at(r, 1);
  }
  const double half_gap = 0.5 * (a - d);
  const double lambda =
      0.5 * (a + d) + std::sqrt(half_gap * half_gap + std::norm(b));
  std::vector<cxd> v(2);
  if (std::abs(b) < 1e-300) {
    v[0] = (a >= d) ? 1.0 : 0.0;
    v[1] = (a >= d) ? 0.0 : 1.0;
    return v;
  }
  v[0] = b;
  v[1] = cxd{lambda - a, 0.0};
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  v[0] /= n;
  v[1] /= n;
  return v;
}

}  // namespace clssr

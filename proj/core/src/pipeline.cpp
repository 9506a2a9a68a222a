#include "clssr/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "clssr/errors.hpp"
#include "clssr/scenario.hpp"

namespace clssr {

LinkDraw sample_links(Philox4x32& rng, const LinkBudget& budget,
                      const NodeGeometry& geometry, const AntennaMode& mode) {
  LinkDraw draw{
      sample_channel(rng, budget, geometry, LinkEnd::the_user(), mode), {}};
  draw.eves.reserve(geometry.num_eves());
  for (std::size_t e = 0; e < geometry.num_eves(); ++e)
    draw.eves.push_back(
        sample_channel(rng, budget, geometry, LinkEnd::eve(e), mode));
  return draw;
}

SecuritySnapshot evaluate_snapshot(const LinkDraw& draw, const Beamformer& f,
                                   int bits, const SemanticConfig& semantic,
                                   const LinkBudget& budget,
                                   const AntennaMode& mode, double t_max_s,
                                   const SchemeRules& rules) {
  const SemanticConfig cfg = semantic.with_bits(bits);
  const double sigma2 = noise_power(budget);
  const TaskSecurityOptions sec_opts{.app_layer_security =
                                         rules.app_layer_security};

  SecuritySnapshot snap;
  snap.r_u = shannon_rate(budget, beam_gain(draw.user, f), sigma2);

  const double gamma_u = alamouti_snr(draw.user, sigma2, f.power_w);
  const double p_cw_u = codeword_error(ser_qpsk(gamma_u), cfg.b);
  snap.g_u = distortion_user(p_cw_u, cfg);

  const std::size_t eves = draw.eves.size();
  snap.r_e.reserve(eves);
  snap.r_sec.reserve(eves);
  snap.g_e.reserve(eves);
  snap.task_sec.reserve(eves);
  snap.phi.reserve(eves);
  snap.omega.reserve(eves);
  for (const ChannelMatrix& h_e : draw.eves) {
    const double r_e = shannon_rate(budget, beam_gain(h_e, f), sigma2);
    const double r_sec = security_rate(snap.r_u, r_e);
    const double gamma_e = alamouti_snr(h_e, sigma2, f.power_w);
    const double p_cw_e = codeword_error(ser_qpsk(gamma_e), cfg.b);
    const double g_e = distortion_eve(p_cw_e, cfg);
    const double g_s =
        task_security(snap.g_u, g_e, r_sec, cfg.epsilon, sec_opts);
    const double phi = semantic_bit_efficiency(g_s, cfg.n, cfg.b);
    snap.r_e.push_back(r_e);
    snap.r_sec.push_back(r_sec);
    snap.g_e.push_back(g_e);
    snap.task_sec.push_back(g_s);
    snap.phi.push_back(phi);
    snap.omega.push_back(clssr(phi, r_sec, snap.r_u));
  }
  snap.omega_u = clssr_multi_eve(snap.omega);
  snap.timely = is_timely(cfg.n, cfg.b, snap.r_u, t_max_s);
  (void)mode;
  return snap;
}

SemanticConfig pretrain_semantic(const std::vector<double>& grid,
                                 const Scenario& scenario) {
  if (grid.empty()) throw ConfigError("pretrain grid must be nonempty");
  scenario.validate();

  const SemanticConfig base = scenario.semantic;
  const double xi = scenario.budget.max_transmit_power_w();
  const std::size_t eves = scenario.geometry.num_eves();
  Philox4x32 rng =
      make_stream(scenario.seed(), scenario.id() + "/pretrain");

  std::vector<double> sum_omega(grid.size(), 0.0);
  std::vector<double> sum_g_u(grid.size(), 0.0);
  std::vector<std::vector<double>> sum_g_e(grid.size(),
                                           std::vector<double>(eves, 0.0));
  // Common random numbers: every grid point sees the same fading draws, so
  // the comparison is a paired one.
  for (int d = 0; d < scenario.pretrain.draws; ++d) {
    const LinkDraw draw = sample_links(rng, scenario.budget,
                                       scenario.geometry, scenario.mode);
    const Beamformer f{mrt_weights(draw.user), xi};
    for (std::size_t g = 0; g < grid.size(); ++g) {
      SemanticConfig cfg = base;
      cfg.delta_z = grid[g];
      const SecuritySnapshot snap =
          evaluate_snapshot(draw, f, cfg.b, cfg, scenario.budget,
                            scenario.mode, scenario.t_max_s);
      sum_omega[g] += snap.omega_u;
      sum_g_u[g] += snap.g_u;
      for (std::size_t e = 0; e < eves; ++e) sum_g_e[g][e] += snap.g_e[e];
    }
  }

  // Scan in ascending delta_z so that requiring strict improvement to move
  // breaks ties toward the smaller noise level.
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grid[a] < grid[b];
  });

  std::size_t best = grid.size();
  double best_omega = -std::numeric_limits<double>::infinity();
  for (const std::size_t g : order) {
    double min_eve = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < eves; ++e)
      min_eve = std::min(min_eve, sum_g_e[g][e]);
    if (!(min_eve > sum_g_u[g])) continue;
    if (sum_omega[g] > best_omega) {
      best_omega = sum_omega[g];
      best = g;
    }
  }
  if (best == grid.size())
    throw InfeasibleError("no feasible semantic config in the given grid");

  SemanticConfig out = base;
  out.delta_z = grid[best];
  return out;
}

}  // namespace clssr

#include "clssr/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "clssr/errors.hpp"

namespace clssr {
namespace {

// Hermitian inner product sum_i a_i * conj(b_i).
cxd inner(std::span<const cxd> a, std::span<const cxd> b) {
  cxd s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

double norm_sq(std::span<const cxd> a) {
  double s = 0.0;
  for (const cxd& z : a) s += std::norm(z);
  return s;
}

std::vector<std::vector<cxd>> stack_rows(const ChannelMatrix& h) {
  std::vector<std::vector<cxd>> rows;
  for (int r = 0; r < h.rows(); ++r) {
    std::vector<cxd> row(h.cols());
    for (int c = 0; c < h.cols(); ++c) row[c] = h.at(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

StateIndexer::StateIndexer(int classes, int bins_user, int bins_eve,
                           std::size_t num_eves)
    : classes_(classes), bins_user_(bins_user), bins_eve_(bins_eve),
      num_eves_(num_eves) {
  if (classes < 1 || bins_user < 1 || bins_eve < 1)
    throw std::invalid_argument("state space dimensions must be >= 1");
  size_ = static_cast<std::size_t>(classes) * bins_user;
  for (std::size_t e = 0; e < num_eves; ++e) size_ *= bins_eve;
}

std::size_t StateIndexer::encode(int cls, int user_bin,
                                 std::span<const int> eve_bins) const {
  if (cls < 0 || cls >= classes_ || user_bin < 0 || user_bin >= bins_user_ ||
      eve_bins.size() != num_eves_)
    throw std::invalid_argument("state component out of range");
  std::size_t s = static_cast<std::size_t>(cls);
  s = s * bins_user_ + user_bin;
  for (const int b : eve_bins) {
    if (b < 0 || b >= bins_eve_)
      throw std::invalid_argument("state component out of range");
    s = s * bins_eve_ + b;
  }
  return s;
}

StateIndexer::Parts StateIndexer::decode(std::size_t state) const {
  Parts p;
  p.eve_bins.resize(num_eves_);
  for (std::size_t e = num_eves_; e-- > 0;) {
    p.eve_bins[e] = static_cast<int>(state % bins_eve_);
    state /= bins_eve_;
  }
  p.user_bin = static_cast<int>(state % bins_user_);
  state /= bins_user_;
  p.cls = static_cast<int>(state);
  return p;
}

double fading_power_cdf(int entries, double x) {
  if (entries < 1) throw std::invalid_argument("entries must be >= 1");
  if (x <= 0.0) return 0.0;
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < entries; ++j) {
    term *= x / j;
    sum += term;
  }
  return 1.0 - std::exp(-x) * sum;
}

double fading_power_quantile(int entries, double p) {
  if (p < 0.0 || p >= 1.0)
    throw std::invalid_argument("quantile probability must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  double hi = static_cast<double>(entries);
  while (fading_power_cdf(entries, hi) < p) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fading_power_cdf(entries, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ChannelQuantizer::ChannelQuantizer(const AntennaMode& mode,
                                   double mean_entry_gain, int bins,
                                   Philox4x32 direction_stream) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  if (!(mean_entry_gain > 0.0))
    throw std::invalid_argument("mean entry gain must be > 0");
  const int entries = mode.rx_antennas * mode.tx_antennas;

  for (int k = 1; k < bins; ++k)
    thresholds_.push_back(
        mean_entry_gain *
        fading_power_quantile(entries, static_cast<double>(k) / bins));

  ChannelMatrix direction(mode.rx_antennas, mode.tx_antennas);
  for (int r = 0; r < direction.rows(); ++r)
    for (int c = 0; c < direction.cols(); ++c)
      direction.at(r, c) = direction_stream.next_cgaussian();
  const double scale = 1.0 / std::sqrt(direction.frobenius_sq());
  for (int r = 0; r < direction.rows(); ++r)
    for (int c = 0; c < direction.cols(); ++c) direction.at(r, c) *= scale;

  for (int k = 0; k < bins; ++k) {
    const double median_power =
        mean_entry_gain *
        fading_power_quantile(entries, (k + 0.5) / bins);
    ChannelMatrix rep = direction;
    const double amp = std::sqrt(median_power);
    for (int r = 0; r < rep.rows(); ++r)
      for (int c = 0; c < rep.cols(); ++c) rep.at(r, c) *= amp;
    reps_.push_back(std::move(rep));
  }
}

int ChannelQuantizer::bin_of(const ChannelMatrix& h) const {
  const double x = h.frobenius_sq();
  return static_cast<int>(
      std::upper_bound(thresholds_.begin(), thresholds_.end(), x) -
      thresholds_.begin());
}

int quantize_channel(const ChannelMatrix& h, const ChannelQuantizer& q) {
  return q.bin_of(h);
}

std::size_t ActionSpace::encode(int beam, int bit_index) const {
  return static_cast<std::size_t>(beam) * bit_choices.size() + bit_index;
}

Action ActionSpace::decode(std::size_t action) const {
  if (action >= size()) throw std::invalid_argument("action index out of range");
  return {static_cast<int>(action / bit_choices.size()),
          bit_choices[action % bit_choices.size()]};
}

LinkDraw ModelContext::representative_draw(std::size_t state) const {
  const StateIndexer::Parts parts = states.decode(state);
  LinkDraw draw{user_quantizer().representative(parts.user_bin), {}};
  draw.eves.reserve(parts.eve_bins.size());
  for (std::size_t e = 0; e < parts.eve_bins.size(); ++e)
    draw.eves.push_back(eve_quantizer(e).representative(parts.eve_bins[e]));
  return draw;
}

std::vector<ChannelQuantizer> build_quantizers(const Scenario& scenario) {
  const std::string id = scenario.id();
  std::vector<ChannelQuantizer> qs;
  const auto mean_gain = [&](LinkEnd end) {
    return std::pow(
        10.0, -path_loss_db(scenario.budget, scenario.geometry, end) / 10.0);
  };
  qs.emplace_back(scenario.mode, mean_gain(LinkEnd::the_user()),
                  scenario.discretization.fading_bins_user,
                  make_stream(scenario.seed(), id + "/binrep/user"));
  for (std::size_t e = 0; e < scenario.geometry.num_eves(); ++e)
    qs.emplace_back(scenario.mode, mean_gain(LinkEnd::eve(e)),
                    scenario.discretization.fading_bins_eve,
                    make_stream(scenario.seed(),
                                id + "/binrep/eve" + std::to_string(e)));
  return qs;
}

std::vector<Beamformer> build_beam_codebook(
    const Scenario& scenario, int levels, std::span<const double> power_fracs,
    const std::vector<ChannelQuantizer>& quantizers) {
  if (levels < 2) throw ConfigError("codebook levels must be >= 2");
  if (power_fracs.empty()) throw ConfigError("power_fracs must be nonempty");

  const std::vector<cxd> mrt =
      mrt_weights(quantizers.front().representative(0));

  // Null direction of the stacked eavesdropper representative rows, if the
  // stack has rank < 2 in C^2.
  std::vector<std::vector<cxd>> rows;
  for (std::size_t e = 1; e < quantizers.size(); ++e) {
    auto r = stack_rows(quantizers[e].representative(0));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::vector<cxd> null_dir;
  {
    const std::vector<cxd>* pivot = nullptr;
    bool full_rank = false;
    for (const auto& row : rows) {
      const double n2 = norm_sq(row);
      if (n2 < 1e-30) continue;
      if (pivot == nullptr) {
        pivot = &row;
        continue;
      }
      const cxd c = inner(row, *pivot) / norm_sq(*pivot);
      double resid = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i)
        resid += std::norm(row[i] - c * (*pivot)[i]);
      if (resid > 1e-18 * n2) {
        full_rank = true;
        break;
      }
    }
    if (pivot != nullptr && !full_rank) {
      // Row (u0, u1) is annihilated by (u1, -u0).
      const auto& u = *pivot;
      std::vector<cxd> nd{u[1], -u[0]};
      const double nn = std::sqrt(norm_sq(nd));
      for (cxd& z : nd) z /= nn;
      // Phase-align by projecting the user-aligned beam onto the null line.
      const cxd coeff = inner(mrt, nd);
      if (std::abs(coeff) > 1e-12) {
        for (cxd& z : nd) z *= coeff / std::abs(coeff);
        null_dir = std::move(nd);
      }
    }
  }

  std::vector<std::vector<cxd>> directions;
  if (null_dir.empty()) {
    directions.push_back(mrt);
  } else {
    for (int k = 0; k < levels; ++k) {
      const double t = static_cast<double>(k) / (levels - 1);
      std::vector<cxd> v(mrt.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = (1.0 - t) * mrt[i] + t * null_dir[i];
      const double n2 = norm_sq(v);
      if (n2 < 1e-18) continue;
      const double inv = 1.0 / std::sqrt(n2);
      for (cxd& z : v) z *= inv;
      directions.push_back(std::move(v));
    }
  }

  const double xi = scenario.budget.max_transmit_power_w();
  std::vector<Beamformer> book;
  for (const auto& dir : directions) {
    for (const double frac : power_fracs) {
      Beamformer f{dir, frac * xi};
      const bool dup = std::any_of(
          book.begin(), book.end(), [&](const Beamformer& g) {
            if (g.power_w != f.power_w) return false;
            const double c = std::min(
                1.0, std::abs(inner(f.weights, g.weights)));
            return std::acos(c) <= 1e-6;
          });
      if (!dup) book.push_back(std::move(f));
    }
  }
  return book;
}

ModelContext compile_scenario(const Scenario& scenario,
                              const SemanticConfig& semantic,
                              SchemeRules rules) {
  scenario.validate();
  semantic.validate();
  auto quantizers = build_quantizers(scenario);
  ActionSpace actions{
      build_beam_codebook(scenario, scenario.codebook.levels,
                          scenario.codebook.power_fracs, quantizers),
      scenario.codebook.expanded_bits(semantic)};
  StateIndexer states(scenario.discretization.codeword_classes,
                      scenario.discretization.fading_bins_user,
                      scenario.discretization.fading_bins_eve,
                      scenario.geometry.num_eves());
  return ModelContext{scenario, semantic, rules, states, std::move(actions),
                      std::move(quantizers)};
}

double reward(const ModelContext& ctx, std::size_t state, std::size_t action) {
  const Action act = ctx.actions.decode(action);
  const Beamformer& f = ctx.actions.beam_codebook[act.beam];
  const LinkDraw draw = ctx.representative_draw(state);
  const SecuritySnapshot snap =
      evaluate_snapshot(draw, f, act.bits, ctx.semantic, ctx.scenario.budget,
                        ctx.scenario.mode, ctx.scenario.t_max_s, ctx.rules);
  const double user_gain = beam_gain(draw.user, f);
  double shaping = 0.0;
  for (const ChannelMatrix& h_e : draw.eves)
    shaping += user_gain - beam_gain(h_e, f);
  return snap.omega_u + shaping;
}

void Mdp::validate() const {
  for (std::size_t s = 0; s < num_states; ++s)
    for (std::size_t a = 0; a < num_actions; ++a) {
      double row = 0.0;
      for (std::size_t n = 0; n < num_states; ++n) {
        const double pr = p(s, a, n);
        if (pr < 0.0) throw std::logic_error("negative transition probability");
        row += pr;
      }
      if (std::abs(row - 1.0) > 1e-9)
        throw std::logic_error("transition row does not sum to 1");
      if (!std::isfinite(r(s, a))) throw std::logic_error("non-finite reward");
    }
}

nlohmann::json Mdp::to_json() const {
  nlohmann::json j;
  j["num_states"] = num_states;
  j["num_actions"] = num_actions;
  j["gamma"] = gamma;
  auto& rj = j["reward"] = nlohmann::json::array();
  for (std::size_t s = 0; s < num_states; ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t a = 0; a < num_actions; ++a) row.push_back(r(s, a));
    rj.push_back(std::move(row));
  }
  auto& tj = j["transition"] = nlohmann::json::array();
  for (std::size_t s = 0; s < num_states; ++s) {
    nlohmann::json per_action = nlohmann::json::array();
    for (std::size_t a = 0; a < num_actions; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t n = 0; n < num_states; ++n) row.push_back(p(s, a, n));
      per_action.push_back(std::move(row));
    }
    tj.push_back(std::move(per_action));
  }
  return j;
}

Mdp build_mdp(const ModelContext& ctx) {
  const std::size_t S = ctx.states.size();
  const std::size_t A = ctx.actions.size();
  if (S == 0) throw ConfigError("empty state space");
  if (A == 0) throw ConfigError("empty action space");

  Mdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.gamma = ctx.scenario.gamma;
  mdp.reward.resize(S * A);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a)
      mdp.reward[s * A + a] = reward(ctx, s, a);

  const auto& disc = ctx.scenario.discretization;
  const double bin_prob =
      (1.0 / disc.fading_bins_user) *
      std::pow(1.0 / disc.fading_bins_eve,
               static_cast<double>(ctx.states.num_eves()));
  mdp.transition.resize(S * A * S);
  for (std::size_t s = 0; s < S; ++s) {
    const int cls = ctx.states.decode(s).cls;
    for (std::size_t next = 0; next < S; ++next) {
      const int next_cls = ctx.states.decode(next).cls;
      const double pr = ctx.scenario.source.prob(cls, next_cls) * bin_prob;
      for (std::size_t a = 0; a < A; ++a)
        mdp.transition[(s * A + a) * S + next] = pr;
    }
  }
  mdp.validate();
  return mdp;
}

}  // namespace clssr

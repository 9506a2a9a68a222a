#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "clssr/channel.hpp"
#include "clssr/pipeline.hpp"
#include "clssr/scenario.hpp"

namespace clssr {

// Mixed-radix layout of the decision state: codeword class, user fading bin,
// then one fading bin per eavesdropper (most significant first).
class StateIndexer {
 public:
  StateIndexer(int classes, int bins_user, int bins_eve, std::size_t num_eves);

  std::size_t size() const { return size_; }
  std::size_t num_eves() const { return num_eves_; }
  std::size_t encode(int cls, int user_bin,
                     std::span<const int> eve_bins) const;

  struct Parts {
    int cls = 0;
    int user_bin = 0;
    std::vector<int> eve_bins;
  };
  Parts decode(std::size_t state) const;

 private:
  int classes_, bins_user_, bins_eve_;
  std::size_t num_eves_, size_;
};

// CDF of the sum of `entries` unit-mean exponential powers (the squared
// Frobenius norm of a matrix of i.i.d. CN(0,1) entries).
double fading_power_cdf(int entries, double x);
// Its inverse by bisection; p in [0, 1).
double fading_power_quantile(int entries, double p);

// Equal-probability quantization of one link's fading power, with a fixed
// bin-median representative matrix per bin. All representatives of a link
// share one random direction template so the beam codebook does not grow
// with the bin count.
class ChannelQuantizer {
 public:
  ChannelQuantizer(const AntennaMode& mode, double mean_entry_gain, int bins,
                   Philox4x32 direction_stream);

  int bins() const { return static_cast<int>(reps_.size()); }
  int bin_of(const ChannelMatrix& h) const;
  const ChannelMatrix& representative(int bin) const { return reps_.at(bin); }
  const std::vector<double>& thresholds() const { return thresholds_; }

 private:
  std::vector<double> thresholds_;  // bins-1 ascending power boundaries
  std::vector<ChannelMatrix> reps_;
};

int quantize_channel(const ChannelMatrix& h, const ChannelQuantizer& q);

struct Action {
  int beam = 0;
  int bits = 0;
};

// Finite action set: every codebook beamformer crossed with every bit depth.
// Index layout is beam-major.
struct ActionSpace {
  std::vector<Beamformer> beam_codebook;
  std::vector<int> bit_choices;

  std::size_t size() const { return beam_codebook.size() * bit_choices.size(); }
  std::size_t encode(int beam, int bit_index) const;
  Action decode(std::size_t action) const;  // bits is the depth, not an index
};

// Everything deterministic derived from a scenario before the tensors are
// filled: resolved semantics, scheme rules, state/action spaces and the
// per-link quantizers (index 0 = user, then eavesdroppers in order).
struct ModelContext {
  Scenario scenario;
  SemanticConfig semantic;
  SchemeRules rules;
  StateIndexer states;
  ActionSpace actions;
  std::vector<ChannelQuantizer> quantizers;

  const ChannelQuantizer& user_quantizer() const { return quantizers.front(); }
  const ChannelQuantizer& eve_quantizer(std::size_t e) const {
    return quantizers.at(e + 1);
  }
  // The bin-representative link draw for a state.
  LinkDraw representative_draw(std::size_t state) const;
};

std::vector<ChannelQuantizer> build_quantizers(const Scenario& scenario);

// Beam codebook from the representative channels: maximum-ratio transmission
// toward the user, its projection onto the null space of the stacked
// eavesdropper rows when that space is nonempty, and convex mixtures of the
// two at `levels` weights; each direction at every power fraction.
// Deduplicated within an angular tolerance of 1e-6 rad.
std::vector<Beamformer> build_beam_codebook(
    const Scenario& scenario, int levels, std::span<const double> power_fracs,
    const std::vector<ChannelQuantizer>& quantizers);

ModelContext compile_scenario(const Scenario& scenario,
                              const SemanticConfig& semantic,
                              SchemeRules rules);

// Shaped reward: the secure rate at the state's representative channels plus
// the beam-gain advantage over every eavesdropper.
double reward(const ModelContext& ctx, std::size_t state, std::size_t action);

struct Mdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> transition;  // [s][a][s'], each (s,a) row stochastic
  std::vector<double> reward;      // [s][a]
  double gamma = 0.9;

  double p(std::size_t s, std::size_t a, std::size_t next) const {
    return transition[(s * num_actions + a) * num_states + next];
  }
  double r(std::size_t s, std::size_t a) const {
    return reward[s * num_actions + a];
  }
  void validate() const;
  nlohmann::json to_json() const;
};

// Transitions factor into the source chain times independent equal-probability
// fading bins, identical for every action.
Mdp build_mdp(const ModelContext& ctx);

}  // namespace clssr

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clssr/channel.hpp"
#include "clssr/semantics.hpp"

namespace clssr {

// Discretization of the decision state: source codeword class times one
// fading bin per link.
struct StateSpace {
  int codeword_classes = 4;
  int fading_bins_user = 3;
  int fading_bins_eve = 2;  // per eavesdropper

  std::size_t size(std::size_t num_eves) const;
  void validate() const;
};

// Markov chain over codeword classes.
struct SourceChain {
  int classes = 0;
  std::vector<double> transition;  // row-major classes x classes

  static SourceChain uniform_persistence(int classes, double stay_prob);

  double prob(int from, int to) const;
  std::vector<double> stationary() const;
  void validate() const;
};

// Transmit-side design space: convex mixtures between the user-aligned beam
// and its projection onto the eavesdroppers' null space, at `levels` mixing
// weights, each offered at every fraction of the power cap. Empty bit_choices
// expands to every depth in [b_min, b_max].
struct CodebookParams {
  int levels = 5;
  std::vector<double> power_fracs{0.25, 0.5, 1.0};
  std::vector<int> bit_choices{};

  std::vector<int> expanded_bits(const SemanticConfig& cfg) const;
  void validate() const;
};

struct PretrainParams {
  std::vector<double> grid{0.0, 0.005, 0.01, 0.02, 0.05, 0.1};
  int draws = 512;
  void validate() const;
};

// Complete experiment description. Serializes to/from JSON; unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct Scenario {
  NodeGeometry geometry;
  LinkBudget budget;
  AntennaMode mode;
  SemanticConfig semantic;
  StateSpace discretization;
  SourceChain source;
  CodebookParams codebook;
  PretrainParams pretrain;
  double gamma = 0.9;
  double t_max_s = 0.01;
  int episodes = 10000;
  std::vector<std::uint64_t> seeds{1, 2, 3};

  void validate() const;

  // Stable content hash over the physics-defining fields (everything except
  // seeds and episode count). Used to label RNG streams, so two scenarios
  // share draws exactly when they share physics.
  std::string id() const;

  std::uint64_t seed() const { return seeds.front(); }

  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  static Scenario load_file(const std::string& path);

  static Scenario defaults();
  // Reduced scenario whose policy space is small enough for exhaustive
  // enumeration oracles.
  static Scenario small_default();
};

}  // namespace clssr

#include "clssr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "clssr/errors.hpp"

namespace clssr {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return key == k;
        }) == allowed.end())
      throw ConfigError("unknown key \"" + path + key + "\"");
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::size_t StateSpace::size(std::size_t num_eves) const {
  std::size_t n = static_cast<std::size_t>(codeword_classes) *
                  static_cast<std::size_t>(fading_bins_user);
  for (std::size_t e = 0; e < num_eves; ++e)
    n *= static_cast<std::size_t>(fading_bins_eve);
  return n;
}

void StateSpace::validate() const {
  if (codeword_classes < 1)
    throw ConfigError("codeword_classes must be >= 1");
  if (fading_bins_user < 1 || fading_bins_eve < 1)
    throw ConfigError("fading bin counts must be >= 1");
}

SourceChain SourceChain::uniform_persistence(int classes, double stay_prob) {
  if (classes < 1) throw ConfigError("source chain needs >= 1 class");
  if (stay_prob < 0.0 || stay_prob > 1.0)
    throw ConfigError("persistence must lie in [0, 1]");
  SourceChain chain;
  chain.classes = classes;
  chain.transition.assign(static_cast<std::size_t>(classes) * classes, 0.0);
  const double off =
      classes > 1 ? (1.0 - stay_prob) / (classes - 1) : 0.0;
  for (int i = 0; i < classes; ++i)
    for (int j = 0; j < classes; ++j)
      chain.transition[static_cast<std::size_t>(i) * classes + j] =
          (i == j) ? (classes > 1 ? stay_prob : 1.0) : off;
  return chain;
}

double SourceChain::prob(int from, int to) const {
  return transition.at(static_cast<std::size_t>(from) * classes + to);
}

std::vector<double> SourceChain::stationary() const {
  std::vector<double> v(classes, 1.0 / classes);
  std::vector<double> next(classes);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < classes; ++i)
      for (int j = 0; j < classes; ++j) next[j] += v[i] * prob(i, j);
    double diff = 0.0;
    for (int j = 0; j < classes; ++j) diff += std::abs(next[j] - v[j]);
    v.swap(next);
    if (diff < 1e-15) break;
  }
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& p : v) p /= total;
  return v;
}

void SourceChain::validate() const {
  if (classes < 1) throw ConfigError("source chain needs >= 1 class");
  if (transition.size() != static_cast<std::size_t>(classes) * classes)
    throw ConfigError("source transition matrix has wrong shape");
  for (int i = 0; i < classes; ++i) {
    double row = 0.0;
    for (int j = 0; j < classes; ++j) {
      const double p = prob(i, j);
      if (p < 0.0) throw ConfigError("source transition entries must be >= 0");
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw ConfigError("source transition rows must sum to 1");
  }
}

std::vector<int> CodebookParams::expanded_bits(const SemanticConfig& cfg) const {
  std::vector<int> bits = bit_choices;
  if (bits.empty())
    for (int b = cfg.b_min; b <= cfg.b_max; ++b) bits.push_back(b);
  for (const int b : bits)
    if (b < cfg.b_min || b > cfg.b_max)
      throw ConfigError("bit choice outside [b_min, b_max]");
  return bits;
}

void CodebookParams::validate() const {
  if (levels < 2) throw ConfigError("codebook levels must be >= 2");
  if (power_fracs.empty()) throw ConfigError("power_fracs must be nonempty");
  for (const double f : power_fracs)
    if (!(f > 0.0) || f > 1.0)
      throw ConfigError("power fractions must lie in (0, 1]");
  for (const int b : bit_choices)
    if (b < 1) throw ConfigError("bit choices must be >= 1");
}

void PretrainParams::validate() const {
  if (grid.empty()) throw ConfigError("pretrain grid must be nonempty");
  for (const double g : grid)
    if (g < 0.0 || g > 1.0)
      throw ConfigError("pretrain grid values must lie in [0, 1]");
  if (draws < 1) throw ConfigError("pretrain draws must be >= 1");
}

void Scenario::validate() const {
  geometry.validate();
  budget.validate();
  mode.validate();
  semantic.validate();
  discretization.validate();
  source.validate();
  codebook.validate();
  pretrain.validate();
  if (source.classes != discretization.codeword_classes)
    throw ConfigError("source chain size must match codeword_classes");
  codebook.expanded_bits(semantic);
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw ConfigError("gamma must lie in (0, 1)");
  if (!(t_max_s > 0.0)) throw ConfigError("t_max_s must be > 0");
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed required");
}

std::string Scenario::id() const {
  json j = to_json();
  j.erase("seeds");
  j.erase("episodes");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

json Scenario::to_json() const {
  json j;
  j["geometry"] = {{"tx", geometry.tx_pos},
                   {"user", geometry.user_pos},
                   {"eves", geometry.eve_pos}};
  j["budget"] = {{"transmit_power_dbm", budget.transmit_power_dbm},
                 {"bandwidth_hz", budget.bandwidth_hz},
                 {"noise_density_dbm_hz", budget.noise_density_dbm_hz},
                 {"noise_factor_tau", budget.noise_factor_tau},
                 {"pathloss_exponent", budget.pathloss_exponent},
                 {"pathloss_ref_db", budget.pathloss_ref_db}};
  j["antennas"] = {{"tx", mode.tx_antennas}, {"rx", mode.rx_antennas}};
  j["semantic"] = {{"n", semantic.n},       {"b", semantic.b},
                   {"b_min", semantic.b_min}, {"b_max", semantic.b_max},
                   {"delta_z", semantic.delta_z}, {"rho", semantic.rho},
                   {"kappa", semantic.kappa},  {"epsilon", semantic.epsilon}};
  j["discretization"] = {
      {"codeword_classes", discretization.codeword_classes},
      {"fading_bins_user", discretization.fading_bins_user},
      {"fading_bins_eve", discretization.fading_bins_eve}};
  j["source"] = {{"transition", [&] {
                    std::vector<std::vector<double>> rows(source.classes);
                    for (int i = 0; i < source.classes; ++i)
                      for (int k = 0; k < source.classes; ++k)
                        rows[i].push_back(source.prob(i, k));
                    return rows;
                  }()}};
  j["codebook"] = {{"levels", codebook.levels},
                   {"power_fracs", codebook.power_fracs},
                   {"bit_choices", codebook.bit_choices}};
  j["pretrain"] = {{"grid", pretrain.grid}, {"draws", pretrain.draws}};
  j["gamma"] = gamma;
  j["t_max_s"] = t_max_s;
  j["episodes"] = episodes;
  j["seeds"] = seeds;
  return j;
}

Scenario Scenario::from_json(const json& j) {
  Scenario s = defaults();
  try {
    check_keys(j, "", {"geometry", "budget", "antennas", "semantic",
                       "discretization", "source", "codebook", "pretrain",
                       "gamma", "t_max_s", "episodes", "seeds"});
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      check_keys(g, "geometry.", {"tx", "user", "eves"});
      maybe(g, "tx", s.geometry.tx_pos);
      maybe(g, "user", s.geometry.user_pos);
      maybe(g, "eves", s.geometry.eve_pos);
    }
    if (j.contains("budget")) {
      const auto& b = j.at("budget");
      check_keys(b, "budget.",
                 {"transmit_power_dbm", "bandwidth_hz", "noise_density_dbm_hz",
                  "noise_factor_tau", "pathloss_exponent", "pathloss_ref_db"});
      maybe(b, "transmit_power_dbm", s.budget.transmit_power_dbm);
      maybe(b, "bandwidth_hz", s.budget.bandwidth_hz);
      maybe(b, "noise_density_dbm_hz", s.budget.noise_density_dbm_hz);
      maybe(b, "noise_factor_tau", s.budget.noise_factor_tau);
      maybe(b, "pathloss_exponent", s.budget.pathloss_exponent);
      maybe(b, "pathloss_ref_db", s.budget.pathloss_ref_db);
    }
    if (j.contains("antennas")) {
      const auto& a = j.at("antennas");
      check_keys(a, "antennas.", {"tx", "rx"});
      maybe(a, "tx", s.mode.tx_antennas);
      maybe(a, "rx", s.mode.rx_antennas);
    }
    if (j.contains("semantic")) {
      const auto& m = j.at("semantic");
      check_keys(m, "semantic.",
                 {"n", "b", "b_min", "b_max", "delta_z", "rho", "kappa",
                  "epsilon"});
      maybe(m, "n", s.semantic.n);
      maybe(m, "b", s.semantic.b);
      maybe(m, "b_min", s.semantic.b_min);
      maybe(m, "b_max", s.semantic.b_max);
      maybe(m, "delta_z", s.semantic.delta_z);
      maybe(m, "rho", s.semantic.rho);
      maybe(m, "kappa", s.semantic.kappa);
      maybe(m, "epsilon", s.semantic.epsilon);
    }
    if (j.contains("discretization")) {
      const auto& d = j.at("discretization");
      check_keys(d, "discretization.",
                 {"codeword_classes", "fading_bins_user", "fading_bins_eve"});
      maybe(d, "codeword_classes", s.discretization.codeword_classes);
      maybe(d, "fading_bins_user", s.discretization.fading_bins_user);
      maybe(d, "fading_bins_eve", s.discretization.fading_bins_eve);
    }
    if (j.contains("source")) {
      const auto& c = j.at("source");
      check_keys(c, "source.", {"persistence", "transition"});
      if (c.contains("persistence") && c.contains("transition"))
        throw ConfigError(
            "source: give either persistence or transition, not both");
      if (c.contains("persistence"))
        s.source = SourceChain::uniform_persistence(
            s.discretization.codeword_classes, c.at("persistence").get<double>());
      else if (c.contains("transition")) {
        const auto rows =
            c.at("transition").get<std::vector<std::vector<double>>>();
        SourceChain chain;
        chain.classes = static_cast<int>(rows.size());
        for (const auto& row : rows) {
          if (row.size() != rows.size())
            throw ConfigError("source transition matrix must be square");
          chain.transition.insert(chain.transition.end(), row.begin(),
                                  row.end());
        }
        s.source = std::move(chain);
      }
    } else if (j.contains("discretization")) {
      // Keep the default persistence structure at the requested size.
      s.source = SourceChain::uniform_persistence(
          s.discretization.codeword_classes, 0.6);
    }
    if (j.contains("codebook")) {
      const auto& c = j.at("codebook");
      check_keys(c, "codebook.", {"levels", "power_fracs", "bit_choices"});
      maybe(c, "levels", s.codebook.levels);
      maybe(c, "power_fracs", s.codebook.power_fracs);
      maybe(c, "bit_choices", s.codebook.bit_choices);
    }
    if (j.contains("pretrain")) {
      const auto& p = j.at("pretrain");
      check_keys(p, "pretrain.", {"grid", "draws"});
      maybe(p, "grid", s.pretrain.grid);
      maybe(p, "draws", s.pretrain.draws);
    }
    maybe(j, "gamma", s.gamma);
    maybe(j, "t_max_s", s.t_max_s);
    maybe(j, "episodes", s.episodes);
    maybe(j, "seeds", s.seeds);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " +
                      e.what());
  }
  return from_json(j);
}

Scenario Scenario::defaults() {
  Scenario s;
  s.budget.noise_factor_tau = 2.0;
  s.source = SourceChain::uniform_persistence(
      s.discretization.codeword_classes, 0.6);
  return s;
}

Scenario Scenario::small_default() {
  Scenario s = defaults();
  s.geometry.eve_pos = {{400.0, 450.0}};
  s.mode.rx_antennas = 1;
  s.discretization = StateSpace{.codeword_classes = 3,
                                .fading_bins_user = 2,
                                .fading_bins_eve = 2};
  s.source = SourceChain::uniform_persistence(3, 0.6);
  s.codebook = CodebookParams{
      .levels = 2, .power_fracs = {1.0}, .bit_choices = {8}};
  s.pretrain.draws = 256;
  s.episodes = 2000;
  return s;
}

}  // namespace clssr

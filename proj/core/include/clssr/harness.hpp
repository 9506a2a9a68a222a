#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "clssr/mdp.hpp"
#include "clssr/solver.hpp"

namespace clssr {

enum class Scheme {
  clss,  // cross-layer: pretrained semantic noise, both security branches
  plss,  // physical layer only: no semantic noise, secrecy-rate branch only
  ao,    // alternating optimization on the cross-layer reward
};

std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> scheme_from_name(std::string_view name);

// One fully solved (tau, scheme) operating point. For clss and plss the
// report comes from policy iteration on the scheme's own objective; for ao
// it records the evaluation of the terminal policy.
struct SolvedCell {
  double tau = 0.0;
  Scheme scheme = Scheme::clss;
  std::optional<ModelContext> ctx;
  std::optional<Mdp> mdp;
  Policy policy;
  SolveReport report;
};

// Pretrains (where the scheme calls for it), compiles, builds the MDP and
// solves one operating point. Propagates InfeasibleError from pretraining.
SolvedCell solve_cell(const Scenario& scenario, double tau, Scheme scheme);

// Walks the source chain for `steps` tasks from the stationary distribution,
// quantizing a fresh fading draw each step to find the state, applying the
// policy's action, and measuring the pipeline on the continuous draw (not
// the bin representative the policy was trained on).
std::vector<TaskRecord> run_episode(const ModelContext& ctx,
                                    const Policy& policy, int steps,
                                    std::uint64_t seed);

struct SweepRow {
  double tau = 0.0;
  Scheme scheme = Scheme::clss;
  bool feasible = true;
  double mean_omega_u = 0.0;
  double reliability_pct = 0.0;
  double mean_r_u = 0.0;
  double mean_r_sec = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // tau-major, schemes in given order
  int episodes = 0;
  std::uint64_t seed = 0;
};

// Solves and simulates every (tau, scheme) cell. Cells run concurrently up
// to the CLSSR_SIM_THREADS cap; every cell's draws come from its own derived
// stream, so results do not depend on the worker count. Infeasible cells are
// reported as rows, not errors.
SweepResult sweep_tau(const Scenario& scenario,
                      const std::vector<double>& taus,
                      const std::vector<Scheme>& schemes, int episodes);

// Task reliability of the greedy policy after each improvement sweep
// (rounds, for ao), at the scenario's own tau. Stops when the policy is
// stable or after `iterations` points, whichever is first. Every point is
// measured on the same evaluation draws, so a repeated policy repeats its
// reliability exactly.
std::vector<std::pair<int, double>> reliability_curve(const Scenario& scenario,
                                                      Scheme scheme,
                                                      int iterations);

std::string sweep_csv(const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result);

// One reliability curve per (scheme, seed) pair, in given order.
struct ReliabilityCurves {
  struct Entry {
    Scheme scheme;
    std::uint64_t seed;
    std::vector<std::pair<int, double>> points;
  };
  std::vector<Entry> entries;
};

std::string reliability_csv(const ReliabilityCurves& curves);
nlohmann::json reliability_json(const ReliabilityCurves& curves);

// Worker cap: CLSSR_SIM_THREADS when set (minimum 1), else the hardware
// concurrency.
unsigned worker_cap();

}  // namespace clssr

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "clssr/mdp.hpp"

namespace clssr {

// Deterministic stationary policy: one action index per state.
struct Policy {
  std::vector<std::size_t> action_of;
  bool operator==(const Policy&) const = default;
};

struct ValueFn {
  std::vector<double> v;
};

struct SolveReport {
  Policy policy;
  ValueFn value;
  int iterations = 0;  // improvement sweeps performed
  std::vector<double> value_trace;  // mean value after each evaluation
  // Full per-state values after each evaluation; the monotonic-improvement
  // guarantee is asserted against this.
  std::vector<std::vector<double>> state_value_trace;

  nlohmann::json to_json() const;
};

// Solves v = r_pi + gamma * P_pi * v. Direct linear solve for small state
// spaces, fixed-point iteration otherwise; the returned value always
// satisfies the sup-norm residual bound ||v - (r_pi + gamma P_pi v)|| < tol.
ValueFn policy_evaluation(const Mdp& mdp, const Policy& policy,
                          double tol = 1e-9);

// q(s,a) = sum_s' p(s'|s,a) (r(s,a) + gamma v(s')), row-major |S| x |A|.
std::vector<double> q_from_v(const Mdp& mdp, const ValueFn& value);

// Greedy policy, ties toward the lowest action index.
Policy policy_improvement(const Mdp& mdp, const std::vector<double>& q);

SolveReport policy_iteration(const Mdp& mdp, double tol = 1e-9);

// Fixed-point iteration of the Bellman optimality operator.
ValueFn value_iteration(const Mdp& mdp, double tol = 1e-6);

// Ground-truth oracle: evaluates every deterministic policy. Refuses with
// BudgetError when |A|^|S| exceeds max_policies.
Policy exhaustive_policy_search(const Mdp& mdp, double tol = 1e-9,
                                std::uint64_t max_policies = 1000000);

// Worst-case secrecy rate at each (state, action) over the representative
// channels; |S| x |A| row-major.
std::vector<double> secrecy_rate_tensor(const ModelContext& ctx);

// Physical-layer-only baseline: per state, the action maximizing the
// worst-case secrecy rate; ties (the secrecy rate ignores the bit depth) go
// to the higher secure rate, then the lower action index. Never credits the
// semantic-noise branch.
Policy plss_baseline(const ModelContext& ctx);

// Alternating optimization baseline: per state, alternates best beam given
// bit depth and best bit depth given beam on the shaped reward.
Policy ao_baseline(const ModelContext& ctx, const Mdp& mdp, int max_rounds);

// Scenario-level action feasibility: power cap, bit-depth bounds, and the
// application-layer security constraint established (or not) at pretrain.
struct FeasibilityLimits {
  double xi_w = 0.0;
  int b_min = 1;
  int b_max = 1;
  bool app_constraint_ok = true;
};

bool check_feasibility(const Beamformer& f, int bits,
                       const FeasibilityLimits& limits);

}  // namespace clssr

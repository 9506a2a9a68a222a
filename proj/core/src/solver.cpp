#include "clssr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "clssr/errors.hpp"

namespace clssr {
namespace {

constexpr std::size_t kDirectSolveLimit = 256;

double residual_inf(const Mdp& mdp, const Policy& policy,
                    const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    const std::size_t a = policy.action_of[s];
    double rhs = mdp.r(s, a);
    for (std::size_t n = 0; n < mdp.num_states; ++n)
      rhs += mdp.gamma * mdp.p(s, a, n) * v[n];
    worst = std::max(worst, std::abs(v[s] - rhs));
  }
  return worst;
}

// Gaussian elimination with partial pivoting on (I - gamma P_pi) v = r_pi.
std::vector<double> solve_linear(const Mdp& mdp, const Policy& policy) {
  const std::size_t S = mdp.num_states;
  std::vector<double> m(S * S);
  std::vector<double> b(S);
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t a = policy.action_of[s];
    b[s] = mdp.r(s, a);
    for (std::size_t n = 0; n < S; ++n)
      m[s * S + n] = (s == n ? 1.0 : 0.0) - mdp.gamma * mdp.p(s, a, n);
  }
  for (std::size_t col = 0; col < S; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < S; ++row)
      if (std::abs(m[row * S + col]) > std::abs(m[pivot * S + col]))
        pivot = row;
    if (pivot != col) {
      for (std::size_t k = col; k < S; ++k)
        std::swap(m[col * S + k], m[pivot * S + k]);
      std::swap(b[col], b[pivot]);
    }
    const double d = m[col * S + col];
    for (std::size_t row = col + 1; row < S; ++row) {
      const double factor = m[row * S + col] / d;
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < S; ++k)
        m[row * S + k] -= factor * m[col * S + k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<double> v(S);
  for (std::size_t row = S; row-- > 0;) {
    double acc = b[row];
    for (std::size_t k = row + 1; k < S; ++k) acc -= m[row * S + k] * v[k];
    v[row] = acc / m[row * S + row];
  }
  return v;
}

std::uint64_t checked_policy_count(std::size_t actions, std::size_t states,
                                   std::uint64_t budget) {
  std::uint64_t count = 1;
  for (std::size_t s = 0; s < states; ++s) {
    if (count > budget / actions + 1) return budget + 1;
    count *= actions;
    if (count > budget) return budget + 1;
  }
  return count;
}

}  // namespace

ValueFn policy_evaluation(const Mdp& mdp, const Policy& policy, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (policy.action_of.size() != mdp.num_states)
    throw std::invalid_argument("policy does not cover the state space");

  std::vector<double> v;
  if (mdp.num_states <= kDirectSolveLimit) v = solve_linear(mdp, policy);
  else v.assign(mdp.num_states, 0.0);

  // Polish (or, in the iterative regime, produce) the fixed point until the
  // contractually promised residual bound holds.
  std::vector<double> next(mdp.num_states);
  for (int iter = 0; residual_inf(mdp, policy, v) >= tol; ++iter) {
    if (iter > 1000000)
      throw std::logic_error("policy evaluation failed to converge");
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
      const std::size_t a = policy.action_of[s];
      double acc = mdp.r(s, a);
      for (std::size_t n = 0; n < mdp.num_states; ++n)
        acc += mdp.gamma * mdp.p(s, a, n) * v[n];
      next[s] = acc;
    }
    v.swap(next);
  }
  return ValueFn{std::move(v)};
}

std::vector<double> q_from_v(const Mdp& mdp, const ValueFn& value) {
  std::vector<double> q(mdp.num_states * mdp.num_actions);
  for (std::size_t s = 0; s < mdp.num_states; ++s)
    for (std::size_t a = 0; a < mdp.num_actions; ++a) {
      double acc = 0.0;
      for (std::size_t n = 0; n < mdp.num_states; ++n)
        acc += mdp.p(s, a, n) * (mdp.r(s, a) + mdp.gamma * value.v[n]);
      q[s * mdp.num_actions + a] = acc;
    }
  return q;
}

Policy policy_improvement(const Mdp& mdp, const std::vector<double>& q) {
  Policy policy;
  policy.action_of.resize(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    std::size_t best = 0;
    double best_q = q[s * mdp.num_actions];
    for (std::size_t a = 1; a < mdp.num_actions; ++a) {
      const double qa = q[s * mdp.num_actions + a];
      if (qa > best_q) {
        best_q = qa;
        best = a;
      }
    }
    policy.action_of[s] = best;
  }
  return policy;
}

SolveReport policy_iteration(const Mdp& mdp, double tol) {
  SolveReport report;
  Policy policy;
  policy.action_of.assign(mdp.num_states, 0);

  for (;;) {
    ValueFn value = policy_evaluation(mdp, policy, tol);
    report.value_trace.push_back(
        std::accumulate(value.v.begin(), value.v.end(), 0.0) /
        static_cast<double>(value.v.size()));
    report.state_value_trace.push_back(value.v);
    const Policy improved = policy_improvement(mdp, q_from_v(mdp, value));
    ++report.iterations;
    if (improved == policy) {
      report.policy = std::move(policy);
      report.value = std::move(value);
      return report;
    }
    if (report.iterations > 100000)
      throw std::logic_error("policy iteration failed to terminate");
    policy = improved;
  }
}

ValueFn value_iteration(const Mdp& mdp, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  std::vector<double> v(mdp.num_states, 0.0);
  std::vector<double> next(mdp.num_states);
  for (int iter = 0;; ++iter) {
    if (iter > 10000000)
      throw std::logic_error("value iteration failed to converge");
    double delta = 0.0;
    for (std::size_t s = 0; s < mdp.num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mdp.num_actions; ++a) {
        double acc = mdp.r(s, a);
        for (std::size_t n = 0; n < mdp.num_states; ++n)
          acc += mdp.gamma * mdp.p(s, a, n) * v[n];
        best = std::max(best, acc);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - v[s]));
    }
    v.swap(next);
    if (delta <= tol) return ValueFn{std::move(v)};
  }
}

Policy exhaustive_policy_search(const Mdp& mdp, double tol,
                                std::uint64_t max_policies) {
  const std::uint64_t count =
      checked_policy_count(mdp.num_actions, mdp.num_states, max_policies);
  if (count > max_policies)
    throw BudgetError("policy enumeration exceeds the budget of " +
                      std::to_string(max_policies) + " policies");

  Policy candidate;
  candidate.action_of.assign(mdp.num_states, 0);
  Policy best = candidate;
  double best_sum = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < count; ++i) {
    const ValueFn value = policy_evaluation(mdp, candidate, tol);
    const double sum =
        std::accumulate(value.v.begin(), value.v.end(), 0.0);
    if (sum > best_sum) {
      best_sum = sum;
      best = candidate;
    }
    // Odometer increment, last state fastest: enumeration is lexicographic,
    // so ties keep the lexicographically smallest policy.
    for (std::size_t s = mdp.num_states; s-- > 0;) {
      if (++candidate.action_of[s] < mdp.num_actions) break;
      candidate.action_of[s] = 0;
    }
  }
  return best;
}

std::vector<double> secrecy_rate_tensor(const ModelContext& ctx) {
  const std::size_t S = ctx.states.size();
  const std::size_t A = ctx.actions.size();
  std::vector<double> tensor(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    const LinkDraw draw = ctx.representative_draw(s);
    for (std::size_t a = 0; a < A; ++a) {
      const Action act = ctx.actions.decode(a);
      const SecuritySnapshot snap = evaluate_snapshot(
          draw, ctx.actions.beam_codebook[act.beam], act.bits, ctx.semantic,
          ctx.scenario.budget, ctx.scenario.mode, ctx.scenario.t_max_s,
          ctx.rules);
      tensor[s * A + a] = snap.r_sec_min();
    }
  }
  return tensor;
}

Policy plss_baseline(const ModelContext& ctx) {
  const std::size_t S = ctx.states.size();
  const std::size_t A = ctx.actions.size();
  Policy policy;
  policy.action_of.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    const LinkDraw draw = ctx.representative_draw(s);
    std::size_t best = 0;
    double best_sec = -1.0, best_omega = -1.0;
    for (std::size_t a = 0; a < A; ++a) {
      const Action act = ctx.actions.decode(a);
      const SecuritySnapshot snap = evaluate_snapshot(
          draw, ctx.actions.beam_codebook[act.beam], act.bits, ctx.semantic,
          ctx.scenario.budget, ctx.scenario.mode, ctx.scenario.t_max_s,
          ctx.rules);
      const double sec = snap.r_sec_min();
      // The secrecy rate does not depend on the bit depth, so ties are
      // routine; resolve them by the baseline's own secure rate, then by
      // action index.
      if (sec > best_sec ||
          (sec == best_sec && snap.omega_u > best_omega)) {
        best_sec = sec;
        best_omega = snap.omega_u;
        best = a;
      }
    }
    policy.action_of[s] = best;
  }
  return policy;
}

Policy ao_baseline(const ModelContext& ctx, const Mdp& mdp, int max_rounds) {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  const std::size_t beams = ctx.actions.beam_codebook.size();
  const std::size_t depths = ctx.actions.bit_choices.size();
  Policy policy;
  policy.action_of.resize(mdp.num_states);
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    std::size_t beam = 0, depth = 0;
    for (int round = 0; round < max_rounds; ++round) {
      const std::size_t beam_in = beam, depth_in = depth;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t f = 0; f < beams; ++f) {
        const double r =
            mdp.r(s, ctx.actions.encode(static_cast<int>(f),
                                        static_cast<int>(depth)));
        if (r > best) {
          best = r;
          beam = f;
        }
      }
      best = -std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < depths; ++b) {
        const double r =
            mdp.r(s, ctx.actions.encode(static_cast<int>(beam),
                                        static_cast<int>(b)));
        if (r > best) {
          best = r;
          depth = b;
        }
      }
      if (beam == beam_in && depth == depth_in) break;
    }
    policy.action_of[s] = ctx.actions.encode(static_cast<int>(beam),
                                             static_cast<int>(depth));
  }
  return policy;
}

bool check_feasibility(const Beamformer& f, int bits,
                       const FeasibilityLimits& limits) {
  const double spent = f.weight_norm_sq() * f.power_w;
  if (spent > limits.xi_w * (1.0 + 1e-12)) return false;
  if (bits < limits.b_min || bits > limits.b_max) return false;
  return limits.app_constraint_ok;
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j;
  j["iterations"] = iterations;
  j["policy"] = policy.action_of;
  j["value"] = value.v;
  j["value_trace"] = value_trace;
  return j;
}

}  // namespace clssr

#include "clssr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "clssr/errors.hpp"
#include "clssr/pipeline.hpp"

namespace clssr {
namespace {

constexpr int kAoMaxRounds = 16;

int sample_index(Philox4x32& rng, const std::vector<double>& pmf) {
  const double u = rng.next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(pmf.size()) - 1;
}

SolveReport evaluate_only_report(const Mdp& mdp, Policy policy) {
  SolveReport report;
  report.value = policy_evaluation(mdp, policy);
  double mean = 0.0;
  for (const double v : report.value.v) mean += v;
  mean /= static_cast<double>(report.value.v.size());
  report.value_trace.push_back(mean);
  report.state_value_trace.push_back(report.value.v);
  report.iterations = 1;
  report.policy = std::move(policy);
  return report;
}

Mdp with_secrecy_reward(Mdp mdp, const ModelContext& ctx) {
  mdp.reward = secrecy_rate_tensor(ctx);
  return mdp;
}

double mean_over(const std::vector<TaskRecord>& records,
                 double (*field)(const TaskRecord&)) {
  double acc = 0.0;
  for (const auto& rec : records) acc += field(rec);
  return acc / static_cast<double>(records.size());
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::clss: return "clss";
    case Scheme::plss: return "plss";
    case Scheme::ao: return "ao";
  }
  throw std::logic_error("unknown scheme");
}

std::optional<Scheme> scheme_from_name(std::string_view name) {
  if (name == "clss") return Scheme::clss;
  if (name == "plss") return Scheme::plss;
  if (name == "ao") return Scheme::ao;
  return std::nullopt;
}

SolvedCell solve_cell(const Scenario& scenario, double tau, Scheme scheme) {
  Scenario sc = scenario;
  sc.budget.noise_factor_tau = tau;

  SchemeRules rules{.app_layer_security = scheme != Scheme::plss};
  SemanticConfig semantic = sc.semantic;
  if (scheme == Scheme::plss) semantic.delta_z = 0.0;
  else semantic = pretrain_semantic(sc.pretrain.grid, sc);

  SolvedCell cell;
  cell.tau = tau;
  cell.scheme = scheme;
  cell.ctx = compile_scenario(sc, semantic, rules);
  cell.mdp = build_mdp(*cell.ctx);

  switch (scheme) {
    case Scheme::clss:
      cell.report = policy_iteration(*cell.mdp);
      break;
    case Scheme::plss:
      // The baseline optimizes its own objective: the worst-case secrecy
      // rate at the representative channels.
      cell.mdp = with_secrecy_reward(std::move(*cell.mdp), *cell.ctx);
      cell.report = evaluate_only_report(*cell.mdp, plss_baseline(*cell.ctx));
      break;
    case Scheme::ao:
      cell.report = evaluate_only_report(
          *cell.mdp, ao_baseline(*cell.ctx, *cell.mdp, kAoMaxRounds));
      break;
  }
  cell.policy = cell.report.policy;
  return cell;
}

std::vector<TaskRecord> run_episode(const ModelContext& ctx,
                                    const Policy& policy, int steps,
                                    std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (policy.action_of.size() != ctx.states.size())
    throw std::invalid_argument("policy does not cover the state space");

  Philox4x32 rng = make_stream(seed, ctx.scenario.id() + "/episode");
  const std::vector<double> stationary = ctx.scenario.source.stationary();
  int cls = sample_index(rng, stationary);

  std::vector<double> row(ctx.scenario.source.classes);
  std::vector<int> eve_bins(ctx.states.num_eves());
  std::vector<TaskRecord> records;
  records.reserve(static_cast<std::size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    const LinkDraw draw = sample_links(rng, ctx.scenario.budget,
                                       ctx.scenario.geometry,
                                       ctx.scenario.mode);
    const int user_bin = ctx.user_quantizer().bin_of(draw.user);
    for (std::size_t e = 0; e < eve_bins.size(); ++e)
      eve_bins[e] = ctx.eve_quantizer(e).bin_of(draw.eves[e]);
    const std::size_t state = ctx.states.encode(cls, user_bin, eve_bins);
    const Action act = ctx.actions.decode(policy.action_of[state]);
    records.push_back(make_task_record(evaluate_snapshot(
        draw, ctx.actions.beam_codebook[act.beam], act.bits, ctx.semantic,
        ctx.scenario.budget, ctx.scenario.mode, ctx.scenario.t_max_s,
        ctx.rules)));

    for (int j = 0; j < ctx.scenario.source.classes; ++j)
      row[j] = ctx.scenario.source.prob(cls, j);
    cls = sample_index(rng, row);
  }
  return records;
}

unsigned worker_cap() {
  if (const char* env = std::getenv("CLSSR_SIM_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SweepResult sweep_tau(const Scenario& scenario,
                      const std::vector<double>& taus,
                      const std::vector<Scheme>& schemes, int episodes) {
  if (taus.empty()) throw ConfigError("tau list must be nonempty");
  if (schemes.empty()) throw ConfigError("scheme list must be nonempty");
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  scenario.validate();

  struct Cell {
    double tau;
    Scheme scheme;
  };
  std::vector<Cell> cells;
  for (const double tau : taus)
    for (const Scheme scheme : schemes) cells.push_back({tau, scheme});

  SweepResult result;
  result.rows.resize(cells.size());
  result.episodes = episodes;
  result.seed = scenario.seed();

  std::atomic<std::size_t> cursor{0};
  const auto work = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= cells.size()) return;
      SweepRow& out = result.rows[i];
      out.tau = cells[i].tau;
      out.scheme = cells[i].scheme;
      try {
        const SolvedCell cell =
            solve_cell(scenario, cells[i].tau, cells[i].scheme);
        const std::vector<TaskRecord> records =
            run_episode(*cell.ctx, cell.policy, episodes, scenario.seed());
        out.mean_omega_u = mean_over(records, [](const TaskRecord& r) {
          return r.snapshot.omega_u;
        });
        out.reliability_pct = task_reliability(records);
        out.mean_r_u = mean_over(
            records, [](const TaskRecord& r) { return r.snapshot.r_u; });
        out.mean_r_sec = mean_over(records, [](const TaskRecord& r) {
          return r.snapshot.r_sec_min();
        });
      } catch (const InfeasibleError&) {
        out.feasible = false;
      }
    }
  };

  const unsigned workers =
      std::min<unsigned>(worker_cap(),
                         static_cast<unsigned>(cells.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

std::vector<std::pair<int, double>> reliability_curve(const Scenario& scenario,
                                                      Scheme scheme,
                                                      int iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");

  const Scenario& sc = scenario;
  SchemeRules rules{.app_layer_security = scheme != Scheme::plss};
  SemanticConfig semantic = sc.semantic;
  if (scheme == Scheme::plss) semantic.delta_z = 0.0;
  else semantic = pretrain_semantic(sc.pretrain.grid, sc);

  const ModelContext ctx = compile_scenario(sc, semantic, rules);
  Mdp mdp = build_mdp(ctx);
  if (scheme == Scheme::plss) mdp = with_secrecy_reward(std::move(mdp), ctx);

  const auto measure = [&](const Policy& policy) {
    return task_reliability(
        run_episode(ctx, policy, sc.episodes, sc.seed()));
  };

  std::vector<std::pair<int, double>> curve;
  if (scheme == Scheme::ao) {
    Policy prev;
    for (int k = 1; k <= iterations; ++k) {
      Policy policy = ao_baseline(ctx, mdp, k);
      curve.emplace_back(k, measure(policy));
      if (k > 1 && policy == prev) break;
      prev = std::move(policy);
    }
    return curve;
  }

  Policy policy;
  policy.action_of.assign(mdp.num_states, 0);
  for (int k = 1; k <= iterations; ++k) {
    Policy improved;
    if (scheme == Scheme::plss) {
      improved = plss_baseline(ctx);
    } else {
      const ValueFn value = policy_evaluation(mdp, policy);
      improved = policy_improvement(mdp, q_from_v(mdp, value));
    }
    curve.emplace_back(k, measure(improved));
    if (improved == policy) break;
    policy = improved;
  }
  return curve;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "tau,scheme,mean_omega_u,reliability_pct,mean_r_u,mean_r_sec,status\n";
  for (const SweepRow& row : result.rows) {
    out += format_double(row.tau);
    out += ',';
    out += scheme_name(row.scheme);
    for (const double v :
         {row.mean_omega_u, row.reliability_pct, row.mean_r_u, row.mean_r_sec}) {
      out += ',';
      out += format_double(v);
    }
    out += row.feasible ? ",ok\n" : ",infeasible\n";
  }
  return out;
}

nlohmann::json sweep_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : result.rows)
    rows.push_back({{"tau", row.tau},
                    {"scheme", scheme_name(row.scheme)},
                    {"mean_omega_u", row.mean_omega_u},
                    {"reliability_pct", row.reliability_pct},
                    {"mean_r_u", row.mean_r_u},
                    {"mean_r_sec", row.mean_r_sec},
                    {"status", row.feasible ? "ok" : "infeasible"}});
  return {{"episodes", result.episodes},
          {"seed", result.seed},
          {"rows", std::move(rows)}};
}

std::string reliability_csv(const ReliabilityCurves& curves) {
  std::string out = "scheme,seed,iteration,reliability_pct\n";
  for (const auto& entry : curves.entries)
    for (const auto& [iteration, reliability] : entry.points) {
      out += scheme_name(entry.scheme);
      out += ',';
      out += std::to_string(entry.seed);
      out += ',';
      out += std::to_string(iteration);
      out += ',';
      out += format_double(reliability);
      out += '\n';
    }
  return out;
}

nlohmann::json reliability_json(const ReliabilityCurves& curves) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& entry : curves.entries) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& [iteration, reliability] : entry.points)
      points.push_back({{"iteration", iteration},
                        {"reliability_pct", reliability}});
    entries.push_back({{"scheme", scheme_name(entry.scheme)},
                       {"seed", entry.seed},
                       {"points", std::move(points)}});
  }
  return {{"curves", std::move(entries)}};
}

}  // namespace clssr

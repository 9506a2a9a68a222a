#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "clssr/errors.hpp"
#include "clssr/harness.hpp"
#include "clssr/pipeline.hpp"
#include "doctest.h"

using namespace clssr;

namespace {

// Restores an environment variable on scope exit.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) saved_ = old;
    ::setenv(name, value, 1);
  }
  ~ScopedEnv() {
    if (saved_.has_value())
      ::setenv(name_.c_str(), saved_->c_str(), 1);
    else
      ::unsetenv(name_.c_str());
  }

 private:
  std::string name_;
  std::optional<std::string> saved_;
};

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (const Scheme s : {Scheme::clss, Scheme::plss, Scheme::ao})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  CHECK_FALSE(scheme_from_name("qkd").has_value());
}

TEST_CASE("solved cells expose context, model and a consistent report") {
  const Scenario sc = Scenario::small_default();
  for (const Scheme scheme : {Scheme::clss, Scheme::plss, Scheme::ao}) {
    const SolvedCell cell = solve_cell(sc, 2.0, scheme);
    CHECK(cell.tau == doctest::Approx(2.0));
    REQUIRE(cell.ctx.has_value());
    REQUIRE(cell.mdp.has_value());
    CHECK(cell.ctx->scenario.budget.noise_factor_tau == doctest::Approx(2.0));
    CHECK(cell.policy.action_of.size() == cell.ctx->states.size());
    CHECK(cell.policy == cell.report.policy);
    // The scheme's rules took effect.
    CHECK(cell.ctx->rules.app_layer_security == (scheme != Scheme::plss));
    if (scheme == Scheme::plss)
      CHECK(cell.ctx->semantic.delta_z == 0.0);
    else
      CHECK(cell.ctx->semantic.delta_z > 0.0);  // pretraining picked a level
  }
}

TEST_CASE("episodes are deterministic in the seed and sized as asked") {
  const Scenario sc = Scenario::small_default();
  const SolvedCell cell = solve_cell(sc, sc.budget.noise_factor_tau,
                                     Scheme::clss);
  const auto a = run_episode(*cell.ctx, cell.policy, 200, 7);
  const auto b = run_episode(*cell.ctx, cell.policy, 200, 7);
  const auto c = run_episode(*cell.ctx, cell.policy, 200, 8);
  REQUIRE(a.size() == 200);
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical = identical && a[i].snapshot.r_u == b[i].snapshot.r_u &&
                a[i].snapshot.omega_u == b[i].snapshot.omega_u;
    differs = differs || a[i].snapshot.r_u != c[i].snapshot.r_u;
  }
  CHECK(identical);
  CHECK(differs);

  CHECK_THROWS(run_episode(*cell.ctx, cell.policy, 0, 7));
  Policy short_policy;
  short_policy.action_of = {0};
  CHECK_THROWS(run_episode(*cell.ctx, short_policy, 10, 7));
}

TEST_CASE("episode records are honest pipeline measurements") {
  // Spot-check one record against a direct recomputation: collapse the
  // scenario to one class and one bin per link so the state and hence the
  // action is known a priori.
  Scenario sc = Scenario::small_default();
  sc.discretization.codeword_classes = 1;
  sc.discretization.fading_bins_user = 1;
  sc.discretization.fading_bins_eve = 1;
  sc.source = SourceChain::uniform_persistence(1, 1.0);
  sc.semantic.n = 16;
  sc.validate();

  const SolvedCell cell = solve_cell(sc, sc.budget.noise_factor_tau,
                                     Scheme::clss);
  REQUIRE(cell.ctx->states.size() == 1);

  const auto records = run_episode(*cell.ctx, cell.policy, 3, 11);
  Philox4x32 rng = make_stream(11, cell.ctx->scenario.id() + "/episode");
  (void)rng.next_unit();  // the initial stationary class draw
  for (const TaskRecord& rec : records) {
    const LinkDraw draw =
        sample_links(rng, cell.ctx->scenario.budget,
                     cell.ctx->scenario.geometry, cell.ctx->scenario.mode);
    const Action act = cell.ctx->actions.decode(cell.policy.action_of[0]);
    const SecuritySnapshot snap = evaluate_snapshot(
        draw, cell.ctx->actions.beam_codebook[act.beam], act.bits,
        cell.ctx->semantic, cell.ctx->scenario.budget, cell.ctx->scenario.mode,
        cell.ctx->scenario.t_max_s, cell.ctx->rules);
    CHECK(rec.snapshot.r_u == doctest::Approx(snap.r_u).epsilon(1e-15));
    CHECK(rec.snapshot.omega_u ==
          doctest::Approx(snap.omega_u).epsilon(1e-15));
    CHECK(rec.secure == (snap.task_sec_min() > 0.0));
    CHECK(rec.timely == snap.timely);
    (void)rng.next_unit();  // the class transition draw
  }
}

TEST_CASE("episode class visits follow the stationary distribution") {
  Scenario sc = Scenario::small_default();
  sc.discretization.fading_bins_user = 1;
  sc.discretization.fading_bins_eve = 1;
  // Biased two-class chain with stationary (0.75, 0.25).
  sc.discretization.codeword_classes = 2;
  sc.source.classes = 2;
  sc.source.transition = {0.9, 0.1, 0.3, 0.7};
  sc.validate();

  const SolvedCell cell = solve_cell(sc, sc.budget.noise_factor_tau,
                                     Scheme::clss);
  // With one bin per link the state is the class itself; count visits via
  // a per-class action fingerprint only if actions differ, so instead track
  // the chain directly: re-run the episode generator's own draws.
  const int steps = 20000;
  Philox4x32 rng = make_stream(3, cell.ctx->scenario.id() + "/episode");
  const std::vector<double> pi = sc.source.stationary();
  CHECK(pi[0] == doctest::Approx(0.75).epsilon(1e-9));

  // Consume exactly like run_episode: one stationary draw, then per step a
  // link draw plus one class transition. Count the class sequence.
  std::vector<int> visits(2, 0);
  double u = rng.next_unit();
  int cls = u < pi[0] ? 0 : 1;
  for (int step = 0; step < steps; ++step) {
    ++visits[static_cast<std::size_t>(cls)];
    (void)sample_links(rng, cell.ctx->scenario.budget,
                       cell.ctx->scenario.geometry, cell.ctx->scenario.mode);
    const double t = rng.next_unit();
    cls = t < sc.source.prob(cls, 0) ? 0 : 1;
  }
  CHECK(static_cast<double>(visits[0]) / steps ==
        doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("sweep produces one row per cell and keeps going on infeasible "
          "cells") {
  Scenario sc = Scenario::small_default();
  sc.episodes = 200;

  const SweepResult result =
      sweep_tau(sc, {1.0, 2.0}, {Scheme::clss, Scheme::plss}, 200);
  REQUIRE(result.rows.size() == 4);
  CHECK(result.rows[0].tau == doctest::Approx(1.0));
  CHECK(result.rows[0].scheme == Scheme::clss);
  CHECK(result.rows[1].scheme == Scheme::plss);
  CHECK(result.rows[2].tau == doctest::Approx(2.0));
  for (const SweepRow& row : result.rows) {
    CHECK(row.feasible);
    CHECK(row.mean_r_u > 0.0);
  }

  // A pretraining grid without any eavesdropper-denying level makes the
  // cross-layer cells infeasible; the sweep must report and continue.
  Scenario rigged = sc;
  rigged.pretrain.grid = {0.0};
  const SweepResult mixed =
      sweep_tau(rigged, {1.0}, {Scheme::clss, Scheme::plss}, 100);
  REQUIRE(mixed.rows.size() == 2);
  CHECK_FALSE(mixed.rows[0].feasible);  // clss needs the semantic branch
  CHECK(mixed.rows[1].feasible);        // plss never pretrains

  CHECK_THROWS_AS(sweep_tau(sc, {}, {Scheme::clss}, 10), ConfigError);
  CHECK_THROWS_AS(sweep_tau(sc, {1.0}, {}, 10), ConfigError);
  CHECK_THROWS_AS(sweep_tau(sc, {1.0}, {Scheme::clss}, 0), ConfigError);
}

TEST_CASE("sweep output is byte-identical across worker counts") {
  Scenario sc = Scenario::small_default();
  sc.episodes = 300;
  const std::vector<double> taus{1.0, 2.0, 3.0};
  const std::vector<Scheme> schemes{Scheme::clss, Scheme::plss, Scheme::ao};

  std::string serial, parallel;
  {
    ScopedEnv env("CLSSR_SIM_THREADS", "1");
    CHECK(worker_cap() == 1);
    serial = sweep_csv(sweep_tau(sc, taus, schemes, 300));
  }
  {
    ScopedEnv env("CLSSR_SIM_THREADS", "8");
    CHECK(worker_cap() == 8);
    parallel = sweep_csv(sweep_tau(sc, taus, schemes, 300));
  }
  CHECK(serial == parallel);
  CHECK(serial.find("tau,scheme,mean_omega_u,reliability_pct,mean_r_u,"
                    "mean_r_sec,status") == 0);
}

TEST_CASE("reliability curves stop at a stable policy and repeat exactly") {
  Scenario sc = Scenario::small_default();
  sc.episodes = 500;

  for (const Scheme scheme : {Scheme::clss, Scheme::plss, Scheme::ao}) {
    const auto curve = reliability_curve(sc, scheme, 32);
    REQUIRE(!curve.empty());
    CHECK(curve.size() < 32);  // converged long before the cap
    CHECK(curve.front().first == 1);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      CHECK(curve[i].first == static_cast<int>(i) + 1);
      CHECK(curve[i].second >= 0.0);
      CHECK(curve[i].second <= 100.0);
    }
    // The last two points belong to identical policies measured on identical
    // draws, so they match exactly.
    if (curve.size() >= 2)
      CHECK(curve.back().second == curve[curve.size() - 2].second);
  }

  CHECK_THROWS(reliability_curve(sc, Scheme::clss, 0));
}

TEST_CASE("csv writers emit stable headers and one line per datum") {
  SweepResult result;
  result.episodes = 10;
  result.seed = 1;
  SweepRow row;
  row.tau = 1.5;
  row.scheme = Scheme::ao;
  row.mean_omega_u = 12.5;
  row.reliability_pct = 99.5;
  row.mean_r_u = 1e6;
  row.mean_r_sec = 0.0;
  result.rows = {row};
  SweepRow bad = row;
  bad.feasible = false;
  bad.scheme = Scheme::clss;
  result.rows.push_back(bad);

  const std::string csv = sweep_csv(result);
  CHECK(csv ==
        "tau,scheme,mean_omega_u,reliability_pct,mean_r_u,mean_r_sec,status\n"
        "1.5,ao,12.5,99.5,1000000,0,ok\n"
        "1.5,clss,12.5,99.5,1000000,0,infeasible\n");

  const nlohmann::json j = sweep_json(result);
  CHECK(j["episodes"] == 10);
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][1]["status"] == "infeasible");

  ReliabilityCurves curves;
  curves.entries.push_back({Scheme::plss, 3, {{1, 50.0}, {2, 75.5}}});
  CHECK(reliability_csv(curves) ==
        "scheme,seed,iteration,reliability_pct\n"
        "plss,3,1,50\n"
        "plss,3,2,75.5\n");
  const nlohmann::json rj = reliability_json(curves);
  CHECK(rj["curves"][0]["scheme"] == "plss");
  CHECK(rj["curves"][0]["points"][1]["reliability_pct"] ==
        doctest::Approx(75.5));
}

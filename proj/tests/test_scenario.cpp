#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "clssr/errors.hpp"
#include "clssr/scenario.hpp"
#include "doctest.h"

using namespace clssr;
using nlohmann::json;

TEST_CASE("defaults validate and have the documented shape") {
  const Scenario sc = Scenario::defaults();
  CHECK_NOTHROW(sc.validate());
  CHECK(sc.geometry.num_eves() == 2);
  CHECK(sc.discretization.size(2) == 48);  // 4 * 3 * 2 * 2
  CHECK(sc.gamma == doctest::Approx(0.9));
  CHECK(sc.seeds == std::vector<std::uint64_t>{1, 2, 3});

  const Scenario small = Scenario::small_default();
  CHECK_NOTHROW(small.validate());
  CHECK(small.geometry.num_eves() == 1);
  CHECK(small.discretization.size(1) == 12);  // 3 * 2 * 2
  CHECK(small.mode.rx_antennas == 1);
}

TEST_CASE("json round trip preserves the scenario") {
  const Scenario sc = Scenario::defaults();
  const Scenario back = Scenario::from_json(sc.to_json());
  CHECK(back.to_json() == sc.to_json());
  CHECK(back.id() == sc.id());

  const Scenario small = Scenario::small_default();
  CHECK(Scenario::from_json(small.to_json()).to_json() == small.to_json());
}

TEST_CASE("scenario id ignores seeds and episode count") {
  Scenario a = Scenario::defaults();
  Scenario b = Scenario::defaults();
  b.seeds = {7, 8};
  b.episodes = 123;
  CHECK(a.id() == b.id());
  CHECK(a.id().size() == 16);

  Scenario c = Scenario::defaults();
  c.budget.noise_factor_tau = 3.0;
  CHECK(c.id() != a.id());

  Scenario d = Scenario::defaults();
  d.semantic.rho = 0.2;
  CHECK(d.id() != a.id());
  CHECK(d.id() != c.id());
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = Scenario::defaults().to_json();
  j["budget"]["bandwidt_hz"] = 1e6;
  try {
    Scenario::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("budget.bandwidt_hz") !=
          std::string::npos);
  }

  json top = Scenario::defaults().to_json();
  top["episodess"] = 5;
  CHECK_THROWS_AS(Scenario::from_json(top), ConfigError);
}

TEST_CASE("partial configs overlay the defaults") {
  const Scenario sc = Scenario::from_json(json::parse(R"({
    "budget": {"noise_factor_tau": 4.0},
    "episodes": 50
  })"));
  CHECK(sc.budget.noise_factor_tau == doctest::Approx(4.0));
  CHECK(sc.episodes == 50);
  CHECK(sc.budget.bandwidth_hz ==
        doctest::Approx(Scenario::defaults().budget.bandwidth_hz));
  CHECK(sc.geometry.num_eves() == 2);
}

TEST_CASE("source chain accepts persistence or an explicit matrix") {
  const Scenario persist = Scenario::from_json(json::parse(R"({
    "source": {"persistence": 0.7}
  })"));
  CHECK(persist.source.prob(0, 0) == doctest::Approx(0.7));
  CHECK(persist.source.prob(0, 1) == doctest::Approx(0.1));

  const Scenario matrix = Scenario::from_json(json::parse(R"({
    "discretization": {"codeword_classes": 2},
    "semantic": {"n": 16},
    "source": {"transition": [[0.9, 0.1], [0.2, 0.8]]}
  })"));
  CHECK(matrix.source.classes == 2);
  CHECK(matrix.source.prob(1, 0) == doctest::Approx(0.2));

  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({
    "source": {"persistence": 0.7, "transition": [[1.0]]}
  })")),
                  ConfigError);
}

TEST_CASE("malformed values raise config errors") {
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"gamma": "high"})")),
                  ConfigError);
  CHECK_THROWS_AS(Scenario::from_json(json::parse(R"({"seeds": []})")).validate(),
                  ConfigError);

  Scenario bad_gamma = Scenario::defaults();
  bad_gamma.gamma = 1.0;
  CHECK_THROWS_AS(bad_gamma.validate(), ConfigError);

  Scenario bad_classes = Scenario::defaults();
  bad_classes.discretization.codeword_classes = 3;  // chain stays 4x4
  CHECK_THROWS_AS(bad_classes.validate(), ConfigError);

  Scenario bad_tmax = Scenario::defaults();
  bad_tmax.t_max_s = 0.0;
  CHECK_THROWS_AS(bad_tmax.validate(), ConfigError);
}

TEST_CASE("uniform persistence chain") {
  const SourceChain chain = SourceChain::uniform_persistence(4, 0.6);
  CHECK(chain.prob(2, 2) == doctest::Approx(0.6));
  CHECK(chain.prob(2, 0) == doctest::Approx(0.4 / 3.0));
  for (int i = 0; i < 4; ++i) {
    double row = 0.0;
    for (int j = 0; j < 4; ++j) row += chain.prob(i, j);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }

  const std::vector<double> pi = chain.stationary();
  for (const double p : pi) CHECK(p == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("stationary distribution of a biased chain") {
  SourceChain chain;
  chain.classes = 2;
  chain.transition = {0.9, 0.1, 0.3, 0.7};
  CHECK_NOTHROW(chain.validate());
  const std::vector<double> pi = chain.stationary();
  CHECK(pi[0] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(pi[1] == doctest::Approx(0.25).epsilon(1e-9));

  SourceChain broken = chain;
  broken.transition[0] = 0.95;  // row no longer sums to one
  CHECK_THROWS(broken.validate());
}

TEST_CASE("codebook bit choices expand to the semantic range") {
  const Scenario sc = Scenario::defaults();
  const std::vector<int> bits = sc.codebook.expanded_bits(sc.semantic);
  REQUIRE(!bits.empty());
  CHECK(bits.front() == sc.semantic.b_min);
  CHECK(bits.back() == sc.semantic.b_max);

  CodebookParams explicit_bits;
  explicit_bits.bit_choices = {4, 8};
  CHECK(explicit_bits.expanded_bits(sc.semantic) == std::vector<int>{4, 8});

  CodebookParams bad;
  bad.levels = 1;
  CHECK_THROWS(bad.validate());
  bad = CodebookParams{};
  bad.power_fracs = {0.0};
  CHECK_THROWS(bad.validate());
  bad = CodebookParams{};
  bad.power_fracs = {1.5};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("file loading reports missing files as config errors") {
  CHECK_THROWS_AS(Scenario::load_file("/nonexistent/path.json"), ConfigError);
}

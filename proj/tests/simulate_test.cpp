#include <cmath>
#include <random>

#include "doctest.h"
#include "strainmix/error.hpp"
#include "strainmix/exact.hpp"
#include "strainmix/simulate.hpp"
#include "support/random_scenarios.hpp"

using namespace strainmix;

namespace {

constexpr std::uint64_t kSeed = 0x5eed5eedULL;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Usage;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("derive_seed is a fixed function of (master, index)") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  // splitmix64 finalizer of 0x9E3779B97F4A7C15: first output of splitmix64 seeded with 0.
  CHECK(derive_seed(0, 0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("sample_cohort basics") {
  const auto s = fixtures::panel_b();
  CHECK(sample_cohort(s, 0, kSeed).empty());

  const auto a = sample_cohort(s, 5000, kSeed);
  const auto b = sample_cohort(s, 5000, kSeed);
  CHECK(a.size() == 5000);
  CHECK(a == b);
  CHECK_FALSE(a == sample_cohort(s, 5000, kSeed + 1));

  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto r = a.record(i);
    REQUIRE(r.exposure == (r.version != "none" ? 1 : 0));
  }
}

TEST_CASE("coarsening holds on random scenarios") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto s = testing::random_scenario(testing::case_seed(i), {.outcomes = 2});
    const auto c = sample_cohort(s, 500, i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const auto r = c.record(k);
      REQUIRE(r.exposure == (is_strain(r.version) ? 1 : 0));
      REQUIRE(r.outcomes.size() == 2);
    }
  }
}

TEST_CASE("exposure frequency and joint (L,K) frequencies converge") {
  constexpr std::size_t n = 1'000'000;
  SUBCASE("S_B exposure") {
    const auto c = sample_cohort(fixtures::panel_b(), n, kSeed);
    std::size_t exposed = 0;
    for (std::size_t i = 0; i < n; ++i) exposed += c.exposed(i);
    CHECK(std::abs(static_cast<double>(exposed) / n - 0.5) < 0.002);
  }
  SUBCASE("S_CONF cells") {
    const auto s = fixtures::confounded();
    const auto c = sample_cohort(s, n, kSeed);
    std::vector<std::vector<std::size_t>> counts(2, std::vector<std::size_t>(3, 0));
    for (std::size_t i = 0; i < n; ++i) ++counts[c.stratum_index(i)][c.version_index(i)];
    for (std::size_t l = 0; l < 2; ++l) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double p = s.strata[l].weight * s.strata[l].mixture.entries[k].prob;
        const double observed = static_cast<double>(counts[l][k]) / n;
        CAPTURE(l);
        CAPTURE(k);
        CHECK(std::abs(observed - p) < 4.0 * std::sqrt(p * (1 - p) / n));
      }
    }
  }
}

TEST_CASE("conditional-form strata sample 'none' first") {
  const auto c = sample_cohort(fixtures::panel_c(), 10, 1);
  CHECK(c.versions(0) == std::vector<std::string>{"none", "s1", "s2", "s3"});
}

TEST_CASE("estimate_blind") {
  SUBCASE("S_B at n = 1e6") {
    const auto r = estimate_blind(sample_cohort(fixtures::panel_b(), 1'000'000, kSeed), "hosp");
    CHECK(std::abs(r.estimate - 0.16) < 0.005);
    std::size_t total = 0;
    for (const auto& c : r.cells) total += c.n;
    CHECK(total == r.n);
  }
  SUBCASE("S_TRIV at n = 1e6") {
    const auto r = estimate_blind(sample_cohort(fixtures::trivial(), 1'000'000, kSeed), "hosp");
    CHECK(std::abs(r.estimate - 0.20) < 0.005);
  }
  SUBCASE("all unexposed") {
    Cohort c(fixtures::panel_b());
    const std::uint8_t y[] = {0};
    for (int i = 0; i < 20; ++i) c.add("l0", "none", y);
    CHECK(kind_of([&] { estimate_blind(c, "hosp"); }) == ErrorKind::EmptyCell);
    CHECK(message_of([&] { estimate_blind(c, "hosp"); }).find("(l0, A=1)") != std::string::npos);
  }
  SUBCASE("empty cohort") {
    CHECK(kind_of([] { estimate_blind(Cohort(fixtures::panel_b()), "hosp"); }) == ErrorKind::EmptyCell);
  }
  SUBCASE("empty strata and small cells warn") {
    Cohort c(fixtures::confounded());
    const std::uint8_t yes[] = {1}, no[] = {0};
    for (int i = 0; i < 3; ++i) c.add("old", "s1", yes);
    for (int i = 0; i < 20; ++i) c.add("old", "none", no);
    const auto r = estimate_blind(c, "hosp");
    CHECK(r.estimate == doctest::Approx(1.0));
    REQUIRE(r.warnings.size() == 2);
    CHECK(r.warnings[0].find("\"young\" has no records") != std::string::npos);
    CHECK(r.warnings[1].find("small cell (old, A=1)") != std::string::npos);
  }
  SUBCASE("unknown outcome") {
    CHECK(kind_of([] { estimate_blind(sample_cohort(fixtures::panel_b(), 10, 1), "fever"); }) ==
          ErrorKind::UnknownOutcome);
  }
}

TEST_CASE("estimate_blind ignores the latent version column") {
  const auto s = fixtures::confounded();
  auto c = sample_cohort(s, 20000, kSeed);
  const auto before = estimate_blind(c, "hosp").estimate;
  std::mt19937_64 rng(3);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.exposed(i)) continue;
    c.set_version(i, rng() % 2 ? "s1" : "s2");
  }
  CHECK(estimate_blind(c, "hosp").estimate == before);
}

TEST_CASE("estimate_aware") {
  SUBCASE("S_B effects at n = 1e6") {
    const auto c = sample_cohort(fixtures::panel_b(), 1'000'000, kSeed);
    const auto r = estimate_aware(c, "hosp");
    REQUIRE(r.effects.size() == 3);
    const double exact[] = {0.20, 0.0, 0.40};
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r.effects[i].effect - exact[i]) < 0.01);
    CHECK(std::abs(r.contrast - estimate_blind(c, "hosp").estimate) < 1e-12);
  }
  SUBCASE("recombination identity on random cohorts") {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto s = testing::random_scenario(testing::case_seed(i));
      const auto c = sample_cohort(s, 3000, i);
      try {
        const auto aware = estimate_aware(c, "y0");
        CHECK(std::abs(aware.contrast - estimate_blind(c, "y0").estimate) < 1e-12);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyCell);
      }
    }
  }
  SUBCASE("missing strain cell") {
    Cohort c(fixtures::panel_b());
    const std::uint8_t y[] = {0};
    for (const char* v : {"none", "s1", "s2"})
      for (int i = 0; i < 5; ++i) c.add("l0", v, y);
    CHECK(kind_of([&] { estimate_aware(c, "hosp"); }) == ErrorKind::EmptyCell);
    CHECK(message_of([&] { estimate_aware(c, "hosp"); }).find("(l0, s3)") != std::string::npos);
  }
}

TEST_CASE("cohort rejects labels outside the layout") {
  Cohort c(fixtures::panel_b());
  const std::uint8_t y[] = {0};
  CHECK(kind_of([&] { c.add("l9", "none", y); }) == ErrorKind::UnknownStratum);
  CHECK(kind_of([&] { c.add("l0", "s9", y); }) == ErrorKind::UnknownStrain);
}

TEST_CASE("monte carlo replicates") {
  const auto s = fixtures::panel_b();
  SUBCASE("parallel kernel matches the serial reference for any thread count") {
    const auto serial = replicate_estimates_serial(s, "hosp", 2000, 40, kSeed);
    for (int threads : {1, 2, 3, 8}) {
      CAPTURE(threads);
      CHECK(replicate_estimates_parallel(s, "hosp", 2000, 40, kSeed, threads) == serial);
    }
  }
  SUBCASE("summary") {
    const auto a = monte_carlo_study(s, "hosp", 2000, 30, kSeed, Execution::Parallel, 4);
    const auto b = monte_carlo_study(s, "hosp", 2000, 30, kSeed, Execution::Serial);
    CHECK(a.mean_estimate == b.mean_estimate);
    CHECK(a.empirical_se == b.empirical_se);
    CHECK(a.mean_bias == a.mean_estimate - a.exact_value);
    CHECK(std::abs(a.exact_value - 0.16) < 1e-12);
    CHECK(a.reps == 30);
  }
  SUBCASE("summarize") {
    const double xs[] = {1.0, 2.0, 3.0};
    const auto m = summarize_replicates("hosp", 10, xs, 2.5);
    CHECK(m.mean_estimate == 2.0);
    CHECK(m.empirical_se == 1.0);
    CHECK(m.mean_bias == -0.5);
  }
  SUBCASE("empty cells abort with the replicate index") {
    // Tiny cohorts of a rare exposure hit empty cells quickly.
    auto rare = fixtures::trivial();
    rare.strata[0].mixture.entries = {{"none", 0.999}, {"s1", 0.001}};
    const auto msg = message_of([&] { monte_carlo_study(rare, "hosp", 20, 50, kSeed); });
    CHECK(msg.find("replicate 0") != std::string::npos);
    CHECK(kind_of([&] { monte_carlo_study(rare, "hosp", 20, 50, kSeed, Execution::Serial); }) ==
          ErrorKind::EmptyCell);
  }
  SUBCASE("reps must be positive") {
    CHECK(kind_of([&] { monte_carlo_study(s, "hosp", 100, 0, kSeed); }) == ErrorKind::Usage);
  }
}

#include "strainmix/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "strainmix/error.hpp"
#include "strainmix/exact.hpp"

namespace strainmix {

namespace {

std::string dq(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// 53 random bits -> [0, 1).
double uniform01(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

std::size_t inverse_cdf(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<MixtureEntry> positive_marginal(const Stratum& stratum) {
  std::vector<MixtureEntry> out;
  for (auto& e : to_marginal(stratum.mixture).entries)
    if (e.prob > 0.0) out.push_back(std::move(e));
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

Cohort::Cohort(const Scenario& scenario) : outcomes_(scenario.outcomes) {
  for (const auto& s : scenario.strata) {
    strata_.push_back(s.label);
    auto& versions = versions_.emplace_back();
    for (const auto& e : positive_marginal(s)) versions.push_back(e.label);
  }
}

std::uint32_t Cohort::find_stratum(std::string_view label) const {
  auto it = std::find(strata_.begin(), strata_.end(), label);
  if (it == strata_.end()) throw Error(ErrorKind::UnknownStratum, "unknown stratum " + dq(label));
  return static_cast<std::uint32_t>(it - strata_.begin());
}

std::uint32_t Cohort::find_version(std::uint32_t stratum, std::string_view label) const {
  const auto& versions = versions_[stratum];
  auto it = std::find(versions.begin(), versions.end(), label);
  if (it == versions.end())
    throw Error(ErrorKind::UnknownStrain,
                "version " + dq(label) + " has no mass in stratum " + dq(strata_[stratum]));
  return static_cast<std::uint32_t>(it - versions.begin());
}

std::size_t Cohort::outcome_index(std::string_view outcome) const {
  auto it = std::find(outcomes_.begin(), outcomes_.end(), outcome);
  if (it == outcomes_.end()) throw Error(ErrorKind::UnknownOutcome, "unknown outcome " + dq(outcome));
  return static_cast<std::size_t>(it - outcomes_.begin());
}

void Cohort::reserve(std::size_t n) {
  stratum_.reserve(n);
  version_.reserve(n);
  exposed_.reserve(n);
  outcomes_flat_.reserve(n * outcomes_.size());
}

void Cohort::push(std::uint32_t stratum, std::uint32_t version, const std::uint8_t* outcomes) {
  stratum_.push_back(stratum);
  version_.push_back(version);
  exposed_.push_back(is_strain(versions_[stratum][version]) ? 1 : 0);
  outcomes_flat_.insert(outcomes_flat_.end(), outcomes, outcomes + outcomes_.size());
}

void Cohort::add(std::string_view stratum, std::string_view version, std::span<const std::uint8_t> outcomes) {
  if (outcomes.size() != outcomes_.size())
    throw Error(ErrorKind::UnknownOutcome, "record has " + std::to_string(outcomes.size()) +
                                               " outcomes, cohort declares " + std::to_string(outcomes_.size()));
  const auto s = find_stratum(stratum);
  push(s, find_version(s, version), outcomes.data());
}

void Cohort::set_version(std::size_t i, std::string_view version) {
  version_[i] = find_version(stratum_[i], version);
  exposed_[i] = is_strain(version) ? 1 : 0;
}

CohortRecord Cohort::record(std::size_t i) const {
  const auto s = stratum_[i];
  return {strata_[s], versions_[s][version_[i]], exposed_[i],
          std::span<const std::uint8_t>(outcomes_flat_.data() + i * outcomes_.size(), outcomes_.size())};
}

Cohort sample_cohort(const Scenario& scenario, std::size_t n, std::uint64_t seed) {
  Cohort cohort(scenario);
  if (n == 0) return cohort;
  cohort.reserve(n);

  const std::size_t n_outcomes = scenario.outcomes.size();
  std::vector<double> strata_cdf;
  std::vector<std::vector<double>> version_cdf;
  std::vector<std::vector<double>> risks;  // [stratum][version * n_outcomes + outcome]
  double acc = 0.0;
  for (const auto& s : scenario.strata) {
    strata_cdf.push_back(acc += s.weight);
    auto& cdf = version_cdf.emplace_back();
    auto& r = risks.emplace_back();
    double v_acc = 0.0;
    for (const auto& e : positive_marginal(s)) {
      cdf.push_back(v_acc += e.prob);
      for (const auto& o : scenario.outcomes) r.push_back(s.risk(o, e.label));
    }
  }

  std::mt19937_64 engine(seed);
  std::vector<std::uint8_t> ys(n_outcomes);
  for (std::size_t i = 0; i < n; ++i) {
    const auto l = inverse_cdf(strata_cdf, uniform01(engine));
    const auto k = inverse_cdf(version_cdf[l], uniform01(engine));
    for (std::size_t o = 0; o < n_outcomes; ++o)
      ys[o] = uniform01(engine) < risks[l][k * n_outcomes + o] ? 1 : 0;
    cohort.push(static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(k), ys.data());
  }
  return cohort;
}

EstimateReport estimate_blind(const Cohort& cohort, std::string_view outcome) {
  const auto o = cohort.outcome_index(outcome);
  if (cohort.empty()) throw Error(ErrorKind::EmptyCell, "empty cohort");

  const std::size_t n_strata = cohort.strata().size();
  std::vector<std::size_t> n1(n_strata, 0), n0(n_strata, 0), y1(n_strata, 0), y0(n_strata, 0);
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto l = cohort.stratum_index(i);
    const bool y = cohort.outcome(i, o);
    if (cohort.exposed(i)) {
      ++n1[l];
      y1[l] += y;
    } else {
      ++n0[l];
      y0[l] += y;
    }
  }

  EstimateReport report;
  report.estimand = "standardized_contrast";
  report.outcome = std::string(outcome);
  report.n = cohort.size();

  std::string missing;
  for (std::size_t l = 0; l < n_strata; ++l) {
    const auto& label = cohort.strata()[l];
    report.cells.push_back({label, n1[l] + n0[l], n1[l], n0[l]});
    if (n1[l] + n0[l] == 0) {
      report.warnings.push_back("stratum " + dq(label) + " has no records");
      continue;
    }
    if (n1[l] == 0) missing += (missing.empty() ? "" : ", ") + ("(" + label + ", A=1)");
    if (n0[l] == 0) missing += (missing.empty() ? "" : ", ") + ("(" + label + ", A=0)");
    if (n1[l] > 0 && n1[l] < kSmallCell)
      report.warnings.push_back("small cell (" + label + ", A=1): " + std::to_string(n1[l]) + " records");
    if (n0[l] > 0 && n0[l] < kSmallCell)
      report.warnings.push_back("small cell (" + label + ", A=0): " + std::to_string(n0[l]) + " records");
  }
  if (!missing.empty()) throw Error(ErrorKind::EmptyCell, "empty cells: " + missing);

  const double n = static_cast<double>(cohort.size());
  double estimate = 0.0;
  for (std::size_t l = 0; l < n_strata; ++l) {
    const std::size_t n_l = n1[l] + n0[l];
    if (n_l == 0) continue;
    const double mean1 = static_cast<double>(y1[l]) / static_cast<double>(n1[l]);
    const double mean0 = static_cast<double>(y0[l]) / static_cast<double>(n0[l]);
    estimate += (mean1 - mean0) * (static_cast<double>(n_l) / n);
  }
  report.estimate = estimate;
  return report;
}

AwareReport estimate_aware(const Cohort& cohort, std::string_view outcome) {
  const auto o = cohort.outcome_index(outcome);
  if (cohort.empty()) throw Error(ErrorKind::EmptyCell, "empty cohort");

  const std::size_t n_strata = cohort.strata().size();
  std::vector<std::vector<std::size_t>> counts(n_strata), events(n_strata);
  for (std::size_t l = 0; l < n_strata; ++l) {
    counts[l].assign(cohort.versions(l).size(), 0);
    events[l].assign(cohort.versions(l).size(), 0);
  }
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto l = cohort.stratum_index(i);
    const auto k = cohort.version_index(i);
    ++counts[l][k];
    events[l][k] += cohort.outcome(i, o);
  }

  std::string missing;
  for (std::size_t l = 0; l < n_strata; ++l) {
    if (std::accumulate(counts[l].begin(), counts[l].end(), std::size_t{0}) == 0) continue;
    for (std::size_t k = 0; k < counts[l].size(); ++k)
      if (counts[l][k] == 0)
        missing += (missing.empty() ? "" : ", ") + ("(" + cohort.strata()[l] + ", " + cohort.versions(l)[k] + ")");
  }
  if (!missing.empty()) throw Error(ErrorKind::EmptyCell, "empty cells: " + missing);

  AwareReport report;
  report.outcome = std::string(outcome);
  report.n = cohort.size();
  const double n = static_cast<double>(cohort.size());
  for (std::size_t l = 0; l < n_strata; ++l) {
    const auto& versions = cohort.versions(l);
    std::vector<std::size_t> order(versions.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return versions[a] < versions[b]; });

    std::size_t n_l = 0;
    std::size_t n_infected = 0;
    double mean_none = 0.0;
    for (std::size_t k = 0; k < versions.size(); ++k) {
      n_l += counts[l][k];
      if (is_strain(versions[k]))
        n_infected += counts[l][k];
      else
        mean_none = static_cast<double>(events[l][k]) / static_cast<double>(counts[l][k]);
    }
    if (n_l == 0) continue;

    double stratum_effect = 0.0;
    for (auto k : order) {
      if (!is_strain(versions[k])) continue;
      const double effect = static_cast<double>(events[l][k]) / static_cast<double>(counts[l][k]) - mean_none;
      report.effects.push_back({cohort.strata()[l], versions[k], effect, counts[l][k]});
      stratum_effect += effect * (static_cast<double>(counts[l][k]) / static_cast<double>(n_infected));
    }
    report.contrast += stratum_effect * (static_cast<double>(n_l) / n);
  }
  return report;
}

namespace {

double replicate_estimate(const Scenario& scenario, std::string_view outcome, std::size_t n,
                          std::uint64_t master_seed, std::size_t r) {
  try {
    return estimate_blind(sample_cohort(scenario, n, derive_seed(master_seed, r)), outcome).estimate;
  } catch (const Error& e) {
    throw Error(e.kind(), "replicate " + std::to_string(r) + ": " + e.what());
  }
}

}  // namespace

std::vector<double> replicate_estimates_serial(const Scenario& scenario, std::string_view outcome,
                                               std::size_t n, std::size_t reps, std::uint64_t master_seed) {
  std::vector<double> estimates(reps);
  for (std::size_t r = 0; r < reps; ++r) estimates[r] = replicate_estimate(scenario, outcome, n, master_seed, r);
  return estimates;
}

std::vector<double> replicate_estimates_parallel(const Scenario& scenario, std::string_view outcome,
                                                 std::size_t n, std::size_t reps, std::uint64_t master_seed,
                                                 int threads) {
  std::vector<double> estimates(reps);
  std::vector<std::exception_ptr> failures(reps);
  const auto count = static_cast<std::int64_t>(reps);
#ifdef _OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
#else
  (void)threads;
#endif
  for (std::int64_t r = 0; r < count; ++r) {
    const auto i = static_cast<std::size_t>(r);
    try {
      estimates[i] = replicate_estimate(scenario, outcome, n, master_seed, i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  // Lowest failing replicate wins, matching the serial kernel.
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return estimates;
}

McSummary summarize_replicates(std::string_view outcome, std::size_t n, std::span<const double> estimates,
                               double exact_value) {
  McSummary s;
  s.outcome = std::string(outcome);
  s.reps = estimates.size();
  s.n = n;
  s.exact_value = exact_value;
  if (estimates.empty()) return s;

  double sum = 0.0;
  for (double x : estimates) sum += x;
  s.mean_estimate = sum / static_cast<double>(estimates.size());
  if (estimates.size() > 1) {
    double ss = 0.0;
    for (double x : estimates) ss += (x - s.mean_estimate) * (x - s.mean_estimate);
    s.empirical_se = std::sqrt(ss / static_cast<double>(estimates.size() - 1));
  }
  s.mean_bias = s.mean_estimate - s.exact_value;
  return s;
}

McSummary monte_carlo_study(const Scenario& scenario, std::string_view outcome, std::size_t n, std::size_t reps,
                            std::uint64_t master_seed, Execution execution, int threads) {
  if (reps == 0) throw Error(ErrorKind::Usage, "monte carlo study needs at least one replicate");
  const double exact = standardized_contrast(scenario, outcome);
  const auto estimates = execution == Execution::Serial
                             ? replicate_estimates_serial(scenario, outcome, n, reps, master_seed)
                             : replicate_estimates_parallel(scenario, outcome, n, reps, master_seed, threads);
  return summarize_replicates(outcome, n, estimates, exact);
}

}  // namespace strainmix

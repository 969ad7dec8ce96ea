#pragma once

// Finite-cohort sampling from a Scenario's data-generating process
// (L -> K -> A = 1[K != none]; {L, K} -> Y) and the two estimators an analyst
// could run on it: strain-blind standardization and strain-aware effects.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strainmix/scenario.hpp"

namespace strainmix {

/// Replicate seed: splitmix64's output finalizer applied to
/// master + 0x9E3779B97F4A7C15 * (index + 1). Distinct indices give
/// decorrelated streams for the per-replicate generator.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct CohortRecord {
  std::string_view stratum;
  std::string_view version;  // latent K
  int exposure = 0;          // A
  std::span<const std::uint8_t> outcomes;  // aligned with Cohort::outcomes()
};

/// Column-compact cohort. The layout (strata, versions with positive mass per
/// stratum, outcomes) comes from the scenario it was built for.
class Cohort {
 public:
  explicit Cohort(const Scenario& scenario);

  /// Throws UnknownStratum / UnknownStrain for labels outside the layout.
  void add(std::string_view stratum, std::string_view version, std::span<const std::uint8_t> outcomes);
  /// Relabels the latent version of record i; the exposure is re-derived.
  void set_version(std::size_t i, std::string_view version);

  std::size_t size() const { return stratum_.size(); }
  bool empty() const { return stratum_.empty(); }
  CohortRecord record(std::size_t i) const;

  const std::vector<std::string>& strata() const { return strata_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  /// Versions with positive marginal mass in stratum s, "none" included.
  const std::vector<std::string>& versions(std::size_t s) const { return versions_[s]; }

  std::size_t outcome_index(std::string_view outcome) const;
  std::uint32_t stratum_index(std::size_t i) const { return stratum_[i]; }
  std::uint32_t version_index(std::size_t i) const { return version_[i]; }
  bool exposed(std::size_t i) const { return exposed_[i] != 0; }
  bool outcome(std::size_t i, std::size_t k) const { return outcomes_flat_[i * outcomes_.size() + k] != 0; }

  void reserve(std::size_t n);
  /// Appends by layout indices; used by the sampler.
  void push(std::uint32_t stratum, std::uint32_t version, const std::uint8_t* outcomes);

  friend bool operator==(const Cohort&, const Cohort&) = default;

 private:
  std::uint32_t find_stratum(std::string_view label) const;
  std::uint32_t find_version(std::uint32_t stratum, std::string_view label) const;

  std::vector<std::string> strata_;
  std::vector<std::vector<std::string>> versions_;
  std::vector<std::string> outcomes_;

  std::vector<std::uint32_t> stratum_;
  std::vector<std::uint32_t> version_;
  std::vector<std::uint8_t> exposed_;
  std::vector<std::uint8_t> outcomes_flat_;
};

/// Draws n independent records. L and K use inverse-CDF over the declared
/// category order (for conditional-form strata: "none" first, then strains);
/// each outcome is Bernoulli(r(K | L)) in declared outcome order. The result
/// depends only on (scenario, n, seed).
Cohort sample_cohort(const Scenario& scenario, std::size_t n, std::uint64_t seed);

struct CellCount {
  std::string stratum;
  std::size_t n = 0;
  std::size_t exposed = 0;
  std::size_t unexposed = 0;
};

struct EstimateReport {
  std::string estimand;
  std::string outcome;
  double estimate = 0.0;
  std::size_t n = 0;
  std::vector<CellCount> cells;  // stratum order; n sums to the report n
  std::vector<std::string> warnings;
};

/// Cells below this size are flagged in EstimateReport warnings.
inline constexpr std::size_t kSmallCell = 10;

/// Standardization from (L, A, Y) only with empirical Pr(L):
///   sum_l [mean(Y|A=1,l) - mean(Y|A=0,l)] * n_l / n.
/// Strata without records are skipped with a warning. Throws EmptyCell naming
/// every stratum that has records but lacks an exposed or unexposed one.
EstimateReport estimate_blind(const Cohort& cohort, std::string_view outcome);

struct StrainEffectEstimate {
  std::string stratum;
  std::string version;
  double effect = 0.0;  // mean(Y|K=k,l) - mean(Y|K=none,l)
  std::size_t n = 0;    // records with K = k in stratum l
};

struct AwareReport {
  std::string outcome;
  std::vector<StrainEffectEstimate> effects;  // stratum order, version label ascending
  double contrast = 0.0;                      // effects reweighted by empirical mixtures
  std::size_t n = 0;
};

/// Strain-specific effect estimates for an analyst who observes K. The
/// recombined contrast reassembles the same cell means estimate_blind uses.
/// Throws EmptyCell naming every (stratum, version) cell without records.
AwareReport estimate_aware(const Cohort& cohort, std::string_view outcome);

struct McSummary {
  std::string outcome;
  std::size_t reps = 0;
  std::size_t n = 0;
  double mean_estimate = 0.0;
  double empirical_se = 0.0;  // sample SD of replicate estimates
  double exact_value = 0.0;
  double mean_bias = 0.0;
};

/// Replicate r estimates estimate_blind on sample_cohort(s, n, derive_seed(master, r)).
/// Serial reference kernel.
std::vector<double> replicate_estimates_serial(const Scenario& scenario, std::string_view outcome,
                                               std::size_t n, std::size_t reps, std::uint64_t master_seed);

/// OpenMP kernel over replicates; output equals the serial kernel's for any
/// thread count. threads <= 0 uses the runtime default.
std::vector<double> replicate_estimates_parallel(const Scenario& scenario, std::string_view outcome,
                                                 std::size_t n, std::size_t reps, std::uint64_t master_seed,
                                                 int threads = 0);

/// Mean, sample SD and bias of replicate estimates, reduced in replicate order.
McSummary summarize_replicates(std::string_view outcome, std::size_t n, std::span<const double> estimates,
                               double exact_value);

enum class Execution { Serial, Parallel };

/// Throws EmptyCell annotated with the first failing replicate; no replicate
/// is ever skipped.
McSummary monte_carlo_study(const Scenario& scenario, std::string_view outcome, std::size_t n, std::size_t reps,
                            std::uint64_t master_seed, Execution execution = Execution::Parallel,
                            int threads = 0);

}  // namespace strainmix

#pragma once

// Closed-form population quantities for a Scenario. Every sum runs over strata
// in declared order and, within a stratum, over versions sorted by label, so
// equal inputs give bit-identical outputs.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "strainmix/scenario.hpp"

namespace strainmix {

enum class Exposure { Unexposed = 0, Exposed = 1 };

/// Internal identities (arm difference, decomposition sum, oracle agreement)
/// hold to this tolerance.
inline constexpr double kIdentityTolerance = 1e-12;

/// E[Y | A = a, L = l].
double observed_risk(const Scenario& scenario, std::string_view outcome, Exposure a,
                     std::string_view stratum);

/// Standardized contrast over L:
///   sum_l E[Y|A=1,L=l] Pr(L=l) - sum_l E[Y|A=0,L=l] Pr(L=l).
/// Every stratum needs prevalence strictly inside (0, 1); otherwise a single
/// PositivityViolation names all offending strata.
double standardized_contrast(const Scenario& scenario, std::string_view outcome);

struct ContrastTerm {
  std::string stratum;
  std::string version;
  double effect = 0.0;        // E[Y^k - Y^0 | L = l]
  double mixture = 0.0;       // Pr(K = k | A = 1, L = l)
  double weight = 0.0;        // mixture * Pr(L = l)
  double contribution = 0.0;  // effect * weight
};

struct ContrastReport {
  std::string outcome;
  double contrast = 0.0;
  double arm1_mean = 0.0;
  double arm0_mean = 0.0;
  std::vector<ContrastTerm> terms;  // stratum declared order, version label ascending
};

/// Strain-effect decomposition of the contrast. Strains with zero mass among
/// the infected are omitted from the terms. `contrast` is the exact
/// standardized_contrast value.
ContrastReport decompose_contrast(const Scenario& scenario, std::string_view outcome);

struct StrainEffect {
  std::string stratum;
  std::string version;
  double effect = 0.0;
};

/// r(k | l) - r(none | l). Throws UnknownStrain for "none" or an absent version.
StrainEffect strain_specific_effect(const Scenario& scenario, std::string_view outcome,
                                    std::string_view version, std::string_view stratum);

struct TrialArms {
  double arm1_mean = 0.0;
  double arm0_mean = 0.0;
};

/// Arm means of the hypothetical trial that, within each stratum, assigns a
/// version to the infection arm with the observed strain frequencies and
/// "none" to the other arm.
TrialArms trial_view(const Scenario& scenario, std::string_view outcome);

/// Independent check of standardized_contrast: builds the joint table over
/// (L, K, Y) by direct multiplication and reads the stratified arm means off
/// table marginals. Shares no code with the closed-form path.
double oracle_contrast(const Scenario& scenario, std::string_view outcome);

struct StratumMixture {
  std::string stratum;
  std::vector<MixtureEntry> strains;  // Pr(K = k | A = 1, L = l), "none" excluded
};

struct TransportTarget {
  /// Pr_target(L = l). Strata missing from the list get weight 0; nullopt
  /// keeps the source distribution.
  std::optional<std::vector<MixtureEntry>> strata_weights;
  /// Strata without an entry keep the source's infected mixture.
  std::vector<StratumMixture> mixtures;
};

/// Target distributions of a second scenario; its risks are ignored.
TransportTarget target_from_scenario(const Scenario& target);

struct StratumDivergence {
  std::string stratum;
  double total_variation = 0.0;
};

struct TransportReport {
  std::string outcome;
  double source_contrast = 0.0;
  double target_contrast = 0.0;
  std::vector<StratumDivergence> mixture_divergence;  // source stratum order
  double strata_divergence = 0.0;                     // TV between Pr(L) distributions
};

/// Recombines the source's strain-specific effects with target strain and
/// stratum distributions. Zero divergences give a target contrast bit-equal to
/// the source contrast.
TransportReport transport_contrast(const Scenario& source, std::string_view outcome,
                                   const TransportTarget& target);

struct ScheduleEntry {
  std::string time;
  std::vector<StratumMixture> strata;
};

struct TimePoint {
  std::string time;
  double contrast = 0.0;
  std::vector<StratumMixture> mixtures;  // effective infected mixture per source stratum
};

/// Contrast under each scheduled strain composition, with risks and Pr(L)
/// held at the source values. Errors carry the time tag.
std::vector<TimePoint> contrast_timeseries(const Scenario& scenario, std::string_view outcome,
                                           const std::vector<ScheduleEntry>& schedule);

struct StratumIrrelevance {
  std::string stratum;
  double spread = 0.0;  // max - min strain risk
  bool irrelevant = false;
};

struct IrrelevanceReport {
  std::string outcome;
  double tolerance = 0.0;
  std::vector<StratumIrrelevance> strata;
  bool irrelevant = false;  // all strata irrelevant
};

/// Mean-level version irrelevance: within each stratum, all strain risks lie
/// within `tolerance` of each other. This is implied by, but weaker than,
/// individual-level irrelevance of the potential outcomes.
IrrelevanceReport version_irrelevance_check(const Scenario& scenario, std::string_view outcome,
                                            double tolerance = 0.0);

/// Total-variation distance between two discrete distributions given as
/// labelled entries; labels absent on one side count as zero mass.
double total_variation(const std::vector<MixtureEntry>& p, const std::vector<MixtureEntry>& q);

}  // namespace strainmix

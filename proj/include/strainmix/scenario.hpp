#pragma once

// Discrete world model: confounder strata L, exposure versions K (strains plus
// the reserved no-infection version), and per-outcome risks E[Y^k | L = l].
// The binary exposure A is never stored; it is always derived as K != "none".

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace strainmix {

/// Reserved version label for absence of infection (K = 0).
inline constexpr std::string_view kNoInfection = "none";

/// Tolerance for probability sums read from scenario inputs.
inline constexpr double kInputTolerance = 1e-9;

inline bool is_strain(std::string_view version) { return version != kNoInfection; }

struct MixtureEntry {
  std::string label;
  double prob = 0.0;

  friend bool operator==(const MixtureEntry&, const MixtureEntry&) = default;
};

enum class MixtureForm {
  Marginal,                ///< Pr(K = k | L = l), "none" included.
  ConditionalOnInfection,  ///< Pr(K = k | A = 1, L = l), "none" excluded, plus prevalence.
};

struct VersionMixture {
  MixtureForm form = MixtureForm::Marginal;
  std::vector<MixtureEntry> entries;  // declared order
  double prevalence = 0.0;            // Pr(A = 1 | L = l); conditional form only

  friend bool operator==(const VersionMixture&, const VersionMixture&) = default;
};

/// version label -> risk
using RiskTable = std::map<std::string, double, std::less<>>;

struct Stratum {
  std::string label;
  double weight = 0.0;  // Pr(L = l)
  VersionMixture mixture;
  std::map<std::string, RiskTable, std::less<>> risks;  // outcome -> version -> risk

  /// All versions of this stratum, "none" included. Declared order for the
  /// marginal form; "none" first, then strains, for the conditional form.
  std::vector<std::string> versions() const;

  /// Throws UnknownOutcome or UnknownStrain.
  double risk(std::string_view outcome, std::string_view version) const;
  const RiskTable& risk_table(std::string_view outcome) const;

  friend bool operator==(const Stratum&, const Stratum&) = default;
};

struct Scenario {
  std::string name;
  std::vector<std::string> outcomes;
  std::vector<Stratum> strata;

  /// Throws UnknownStratum.
  const Stratum& stratum(std::string_view label) const;
  /// Throws UnknownOutcome.
  void require_outcome(std::string_view outcome) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Violation {
  std::string stratum;  // empty for scenario-level rules
  std::string version;
  std::string outcome;
  std::string rule;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  /// One violation per line.
  std::string summary() const;
};

/// Checks every structural and probabilistic invariant of the world model.
/// Violations are collected, never thrown.
ValidationReport validate_scenario(const Scenario& scenario);

struct InfectionMixture {
  double prevalence = 0.0;            // Pr(A = 1 | L = l)
  std::vector<MixtureEntry> strains;  // Pr(K = k | A = 1, L = l), declared order
};

/// Prevalence and strain composition among the infected in one stratum.
/// Conditional-form strata are returned unchanged. Throws UnknownStratum, or
/// PositivityViolation when the stratum has no infected mass.
InfectionMixture mixture_given_infection(const Scenario& scenario, std::string_view stratum);
InfectionMixture mixture_given_infection(const Stratum& stratum);

/// Marginal form of a mixture: "none" first with 1 - prevalence, then strains.
VersionMixture to_marginal(const InfectionMixture& mixture);
VersionMixture to_marginal(const VersionMixture& mixture);

/// Fixed worlds used throughout the tests and the shipped scenario files.
/// Single outcome "hosp" unless stated otherwise.
namespace fixtures {
Scenario trivial();      ///< one strain, contrast 0.2
Scenario panel_b();      ///< null strain s2 common, contrast 0.16
Scenario panel_c();      ///< same risks, s2 rare (conditional form), contrast 0.28
Scenario confounded();   ///< two age strata, contrast 0.072
Scenario fever_hosp();   ///< outcomes "fever" (strain-irrelevant) and "hosp" (compound)
}  // namespace fixtures

}  // namespace strainmix

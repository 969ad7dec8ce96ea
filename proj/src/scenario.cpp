#include "strainmix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "strainmix/error.hpp"

namespace strainmix {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string dq(std::string_view s) { return "\"" + std::string(s) + "\""; }

}  // namespace

std::vector<std::string> Stratum::versions() const {
  std::vector<std::string> out;
  if (mixture.form == MixtureForm::ConditionalOnInfection) out.emplace_back(kNoInfection);
  for (const auto& e : mixture.entries) out.push_back(e.label);
  return out;
}

const RiskTable& Stratum::risk_table(std::string_view outcome) const {
  auto it = risks.find(outcome);
  if (it == risks.end())
    throw Error(ErrorKind::UnknownOutcome,
                "unknown outcome " + dq(outcome) + " in stratum " + dq(label));
  return it->second;
}

double Stratum::risk(std::string_view outcome, std::string_view version) const {
  const auto& table = risk_table(outcome);
  auto it = table.find(version);
  if (it == table.end())
    throw Error(ErrorKind::UnknownStrain,
                "unknown version " + dq(version) + " in stratum " + dq(label));
  return it->second;
}

const Stratum& Scenario::stratum(std::string_view label) const {
  auto it = std::find_if(strata.begin(), strata.end(),
                         [&](const Stratum& s) { return s.label == label; });
  if (it == strata.end()) throw Error(ErrorKind::UnknownStratum, "unknown stratum " + dq(label));
  return *it;
}

void Scenario::require_outcome(std::string_view outcome) const {
  if (std::find(outcomes.begin(), outcomes.end(), outcome) == outcomes.end())
    throw Error(ErrorKind::UnknownOutcome, "unknown outcome " + dq(outcome));
}

std::string Violation::describe() const {
  std::string out = rule;
  if (!stratum.empty()) out += " [stratum " + dq(stratum) + "]";
  if (!version.empty()) out += " [version " + dq(version) + "]";
  if (!outcome.empty()) out += " [outcome " + dq(outcome) + "]";
  return out;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += '\n';
    out += v.describe();
  }
  return out;
}

ValidationReport validate_scenario(const Scenario& scenario) {
  ValidationReport report;
  auto add = [&](std::string stratum, std::string version, std::string outcome, std::string rule) {
    report.violations.push_back(
        {std::move(stratum), std::move(version), std::move(outcome), std::move(rule)});
  };

  if (scenario.outcomes.empty()) add("", "", "", "scenario has no outcomes");
  std::set<std::string, std::less<>> outcomes;
  for (const auto& o : scenario.outcomes) {
    if (o.empty()) add("", "", "", "empty outcome name");
    if (!outcomes.insert(o).second) add("", "", o, "duplicate outcome");
  }

  if (scenario.strata.empty()) add("", "", "", "scenario has no strata");
  std::set<std::string, std::less<>> stratum_labels;
  double weight_sum = 0.0;
  for (const auto& s : scenario.strata) {
    if (s.label.empty()) add("", "", "", "empty stratum label");
    if (!stratum_labels.insert(s.label).second) add(s.label, "", "", "duplicate stratum");
    if (!is_probability(s.weight)) add(s.label, "", "", "weight out of [0,1]");
    weight_sum += s.weight;

    const auto& mix = s.mixture;
    std::set<std::string, std::less<>> versions;
    double mass = 0.0;
    for (const auto& e : mix.entries) {
      if (e.label.empty()) add(s.label, "", "", "empty version label");
      if (!versions.insert(e.label).second) add(s.label, e.label, "", "duplicate version");
      if (!is_probability(e.prob)) add(s.label, e.label, "", "probability out of [0,1]");
      mass += e.prob;
    }
    if (mix.form == MixtureForm::Marginal) {
      if (!versions.contains(kNoInfection)) add(s.label, "", "", "missing none version");
    } else {
      if (versions.contains(kNoInfection))
        add(s.label, std::string(kNoInfection), "", "none in conditional mixture");
      if (!is_probability(mix.prevalence)) add(s.label, "", "", "prevalence out of [0,1]");
      versions.insert(std::string(kNoInfection));
    }
    if (!(std::abs(mass - 1.0) <= kInputTolerance)) add(s.label, "", "", "mixture not stochastic");

    for (const auto& o : scenario.outcomes) {
      auto it = s.risks.find(o);
      for (const auto& v : versions) {
        if (it == s.risks.end() || !it->second.contains(v)) add(s.label, v, o, "missing risk");
      }
    }
    for (const auto& [o, table] : s.risks) {
      if (!outcomes.contains(o)) {
        add(s.label, "", o, "risk for undeclared outcome");
        continue;
      }
      for (const auto& [v, r] : table) {
        if (!versions.contains(v)) add(s.label, v, o, "risk for undeclared version");
        if (!is_probability(r)) add(s.label, v, o, "risk out of [0,1]");
      }
    }
  }
  if (!scenario.strata.empty() && !(std::abs(weight_sum - 1.0) <= kInputTolerance))
    add("", "", "", "strata weights not stochastic");
  return report;
}

InfectionMixture mixture_given_infection(const Stratum& stratum) {
  const auto& mix = stratum.mixture;
  if (mix.form == MixtureForm::ConditionalOnInfection) {
    if (!(mix.prevalence > 0.0))
      throw Error(ErrorKind::PositivityViolation,
                  "positivity violated: stratum " + dq(stratum.label) + " has no infected mass");
    return {mix.prevalence, mix.entries};
  }

  double none = 0.0;
  double strain_mass = 0.0;
  for (const auto& e : mix.entries) {
    if (is_strain(e.label))
      strain_mass += e.prob;
    else
      none = e.prob;
  }
  const double prevalence = 1.0 - none;
  if (!(prevalence > 0.0) || !(strain_mass > 0.0))
    throw Error(ErrorKind::PositivityViolation,
                "positivity violated: stratum " + dq(stratum.label) + " has no infected mass");

  // Normalizing by the strain mass rather than 1 - Pr(none) keeps the
  // conditional mixture stochastic to rounding even when the input sums to 1
  // only within the input tolerance.
  InfectionMixture out{prevalence, {}};
  for (const auto& e : mix.entries) {
    if (is_strain(e.label)) out.strains.push_back({e.label, e.prob / strain_mass});
  }
  return out;
}

InfectionMixture mixture_given_infection(const Scenario& scenario, std::string_view stratum) {
  return mixture_given_infection(scenario.stratum(stratum));
}

VersionMixture to_marginal(const InfectionMixture& mixture) {
  VersionMixture out;
  out.form = MixtureForm::Marginal;
  out.entries.push_back({std::string(kNoInfection), 1.0 - mixture.prevalence});
  for (const auto& e : mixture.strains) out.entries.push_back({e.label, e.prob * mixture.prevalence});
  return out;
}

VersionMixture to_marginal(const VersionMixture& mixture) {
  if (mixture.form == MixtureForm::Marginal) return mixture;
  return to_marginal(InfectionMixture{mixture.prevalence, mixture.entries});
}

}  // namespace strainmix

#include "strainmix/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "strainmix/error.hpp"

namespace strainmix {

namespace {

std::string dq(std::string_view s) { return "\"" + std::string(s) + "\""; }

void sort_by_label(std::vector<MixtureEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const MixtureEntry& a, const MixtureEntry& b) { return a.label < b.label; });
}

// Infected mixture of every stratum, strains sorted by label. Requires
// 0 < Pr(A=1|L=l) < 1 in every stratum and reports all offenders at once.
std::vector<InfectionMixture> contrast_mixtures(const Scenario& scenario) {
  std::vector<InfectionMixture> out;
  std::vector<std::string> offenders;
  out.reserve(scenario.strata.size());
  for (const auto& stratum : scenario.strata) {
    try {
      auto mix = mixture_given_infection(stratum);
      if (!(mix.prevalence < 1.0)) offenders.push_back(dq(stratum.label) + " (no uninfected mass)");
      sort_by_label(mix.strains);
      out.push_back(std::move(mix));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PositivityViolation) throw;
      offenders.push_back(dq(stratum.label) + " (no infected mass)");
      out.emplace_back();
    }
  }
  if (!offenders.empty()) {
    std::string msg = "positivity violated in strata ";
    for (std::size_t i = 0; i < offenders.size(); ++i) msg += (i ? ", " : "") + offenders[i];
    throw Error(ErrorKind::PositivityViolation, msg);
  }
  return out;
}

// sum_k Pr(K=k|A=1,L=l) r(k|l), strains already in summation order.
double infected_mean(const std::vector<MixtureEntry>& strains, const Stratum& stratum,
                     std::string_view outcome) {
  double mean = 0.0;
  for (const auto& e : strains) mean += e.prob * stratum.risk(outcome, e.label);
  return mean;
}

double uninfected_mean(const Stratum& stratum, std::string_view outcome) {
  return stratum.risk(outcome, kNoInfection);
}

struct TransportResult {
  TransportReport report;
  std::vector<StratumMixture> effective;
};

void check_distribution(const std::vector<MixtureEntry>& entries, const std::string& what) {
  double sum = 0.0;
  std::set<std::string_view> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.label).second)
      throw Error(ErrorKind::NonStochastic, what + ": label " + dq(e.label) + " listed twice");
    if (!(e.prob >= 0.0 && e.prob <= 1.0))
      throw Error(ErrorKind::NonStochastic, what + ": probability of " + dq(e.label) + " out of [0,1]");
    sum += e.prob;
  }
  if (!(std::abs(sum - 1.0) <= kInputTolerance))
    throw Error(ErrorKind::NonStochastic, what + " not stochastic (sums to " + std::to_string(sum) + ")");
}

TransportResult transport(const Scenario& source, std::string_view outcome, const TransportTarget& target) {
  source.require_outcome(outcome);
  const auto source_mixtures = contrast_mixtures(source);

  std::vector<double> source_weights;
  for (const auto& s : source.strata) source_weights.push_back(s.weight);
  std::vector<double> target_weights = source_weights;

  if (target.strata_weights) {
    for (const auto& e : *target.strata_weights) source.stratum(e.label);
    check_distribution(*target.strata_weights, "target stratum distribution");
    for (std::size_t i = 0; i < source.strata.size(); ++i) {
      auto it = std::find_if(target.strata_weights->begin(), target.strata_weights->end(),
                             [&](const MixtureEntry& e) { return e.label == source.strata[i].label; });
      target_weights[i] = it == target.strata_weights->end() ? 0.0 : it->prob;
    }
  }

  std::map<std::string_view, const StratumMixture*> overrides;
  for (const auto& m : target.mixtures) {
    const Stratum& stratum = source.stratum(m.stratum);
    if (!overrides.emplace(m.stratum, &m).second)
      throw Error(ErrorKind::NonStochastic, "target mixture for stratum " + dq(m.stratum) + " listed twice");
    const auto& risks = stratum.risk_table(outcome);
    for (const auto& e : m.strains) {
      if (!is_strain(e.label))
        throw Error(ErrorKind::UnknownStrain,
                    "target mixture for stratum " + dq(m.stratum) + " lists \"none\", which is not a strain");
      if (!risks.contains(e.label))
        throw Error(ErrorKind::UnknownStrain, "target strain " + dq(e.label) +
                                                  " has no source effect in stratum " + dq(m.stratum));
    }
    check_distribution(m.strains, "target mixture for stratum " + dq(m.stratum));
  }

  TransportResult result;
  auto& report = result.report;
  report.outcome = std::string(outcome);

  double source_contrast = 0.0;
  double target_contrast = 0.0;
  for (std::size_t i = 0; i < source.strata.size(); ++i) {
    const Stratum& stratum = source.strata[i];
    const auto& own = source_mixtures[i].strains;
    std::vector<MixtureEntry> mix = own;
    if (auto it = overrides.find(stratum.label); it != overrides.end()) {
      mix = it->second->strains;
      sort_by_label(mix);
    }
    const double r0 = uninfected_mean(stratum, outcome);
    source_contrast += (infected_mean(own, stratum, outcome) - r0) * source_weights[i];
    target_contrast += (infected_mean(mix, stratum, outcome) - r0) * target_weights[i];
    report.mixture_divergence.push_back({stratum.label, total_variation(own, mix)});
    result.effective.push_back({stratum.label, std::move(mix)});
  }
  report.source_contrast = source_contrast;
  report.target_contrast = target_contrast;

  double l_diff = 0.0;
  for (std::size_t i = 0; i < source_weights.size(); ++i)
    l_diff += std::abs(source_weights[i] - target_weights[i]);
  report.strata_divergence = 0.5 * l_diff;
  return result;
}

}  // namespace

double observed_risk(const Scenario& scenario, std::string_view outcome, Exposure a,
                     std::string_view stratum_label) {
  const Stratum& stratum = scenario.stratum(stratum_label);
  scenario.require_outcome(outcome);
  if (a == Exposure::Unexposed) return uninfected_mean(stratum, outcome);
  auto mix = mixture_given_infection(stratum);
  sort_by_label(mix.strains);
  return infected_mean(mix.strains, stratum, outcome);
}

double standardized_contrast(const Scenario& scenario, std::string_view outcome) {
  scenario.require_outcome(outcome);
  const auto mixtures = contrast_mixtures(scenario);
  double contrast = 0.0;
  for (std::size_t i = 0; i < scenario.strata.size(); ++i) {
    const Stratum& stratum = scenario.strata[i];
    contrast += (infected_mean(mixtures[i].strains, stratum, outcome) - uninfected_mean(stratum, outcome)) *
                stratum.weight;
  }
  return contrast;
}

TrialArms trial_view(const Scenario& scenario, std::string_view outcome) {
  scenario.require_outcome(outcome);
  const auto mixtures = contrast_mixtures(scenario);
  TrialArms arms;
  for (std::size_t i = 0; i < scenario.strata.size(); ++i) {
    const Stratum& stratum = scenario.strata[i];
    arms.arm1_mean += infected_mean(mixtures[i].strains, stratum, outcome) * stratum.weight;
    arms.arm0_mean += uninfected_mean(stratum, outcome) * stratum.weight;
  }
  return arms;
}

ContrastReport decompose_contrast(const Scenario& scenario, std::string_view outcome) {
  ContrastReport report;
  report.outcome = std::string(outcome);
  report.contrast = standardized_contrast(scenario, outcome);
  const auto arms = trial_view(scenario, outcome);
  report.arm1_mean = arms.arm1_mean;
  report.arm0_mean = arms.arm0_mean;

  const auto mixtures = contrast_mixtures(scenario);
  for (std::size_t i = 0; i < scenario.strata.size(); ++i) {
    const Stratum& stratum = scenario.strata[i];
    const double r0 = uninfected_mean(stratum, outcome);
    for (const auto& e : mixtures[i].strains) {
      if (e.prob == 0.0) continue;
      ContrastTerm term{stratum.label, e.label, stratum.risk(outcome, e.label) - r0, e.prob,
                        e.prob * stratum.weight, 0.0};
      term.contribution = term.effect * term.weight;
      report.terms.push_back(std::move(term));
    }
  }
  return report;
}

StrainEffect strain_specific_effect(const Scenario& scenario, std::string_view outcome,
                                    std::string_view version, std::string_view stratum_label) {
  const Stratum& stratum = scenario.stratum(stratum_label);
  scenario.require_outcome(outcome);
  const auto versions = stratum.versions();
  if (!is_strain(version) || std::find(versions.begin(), versions.end(), version) == versions.end())
    throw Error(ErrorKind::UnknownStrain,
                "unknown strain " + dq(version) + " in stratum " + dq(stratum_label));
  return {stratum.label, std::string(version),
          stratum.risk(outcome, version) - uninfected_mean(stratum, outcome)};
}

TransportTarget target_from_scenario(const Scenario& target) {
  TransportTarget out;
  out.strata_weights.emplace();
  for (const auto& s : target.strata) {
    out.strata_weights->push_back({s.label, s.weight});
    out.mixtures.push_back({s.label, mixture_given_infection(s).strains});
  }
  return out;
}

TransportReport transport_contrast(const Scenario& source, std::string_view outcome,
                                   const TransportTarget& target) {
  return transport(source, outcome, target).report;
}

std::vector<TimePoint> contrast_timeseries(const Scenario& scenario, std::string_view outcome,
                                           const std::vector<ScheduleEntry>& schedule) {
  std::vector<TimePoint> series;
  series.reserve(schedule.size());
  for (const auto& entry : schedule) {
    try {
      auto result = transport(scenario, outcome, TransportTarget{std::nullopt, entry.strata});
      series.push_back({entry.time, result.report.target_contrast, std::move(result.effective)});
    } catch (const Error& e) {
      throw Error(e.kind(), "time " + dq(entry.time) + ": " + e.what());
    }
  }
  return series;
}

IrrelevanceReport version_irrelevance_check(const Scenario& scenario, std::string_view outcome,
                                            double tolerance) {
  scenario.require_outcome(outcome);
  IrrelevanceReport report;
  report.outcome = std::string(outcome);
  report.tolerance = tolerance;
  report.irrelevant = true;
  for (const auto& stratum : scenario.strata) {
    const auto& risks = stratum.risk_table(outcome);
    bool any = false;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& version : stratum.versions()) {
      if (!is_strain(version)) continue;
      const double r = risks.at(version);
      lo = any ? std::min(lo, r) : r;
      hi = any ? std::max(hi, r) : r;
      any = true;
    }
    const double spread = hi - lo;
    const bool irrelevant = spread <= tolerance;
    report.strata.push_back({stratum.label, spread, irrelevant});
    report.irrelevant = report.irrelevant && irrelevant;
  }
  return report;
}

double total_variation(const std::vector<MixtureEntry>& p, const std::vector<MixtureEntry>& q) {
  std::map<std::string_view, std::pair<double, double>> joint;
  for (const auto& e : p) joint[e.label].first += e.prob;
  for (const auto& e : q) joint[e.label].second += e.prob;
  double sum = 0.0;
  for (const auto& [label, pq] : joint) sum += std::abs(pq.first - pq.second);
  return 0.5 * sum;
}

}  // namespace strainmix

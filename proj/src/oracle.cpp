// Brute-force joint-table evaluation of the standardized contrast. Deliberately
// avoids the closed-form helpers in exact.cpp and scenario.cpp: the marginal
// version distribution, exposure coarsening, and conditional means are all
// rebuilt here from the raw scenario fields.

#include <string>
#include <vector>

#include "strainmix/error.hpp"
#include "strainmix/exact.hpp"

namespace strainmix {

namespace {

struct JointCell {
  std::size_t stratum;
  bool exposed;  // A = 1[K != none]
  bool outcome;  // Y
  double mass;   // Pr(L = l, K = k, Y = y)
};

// Pr(K = k | L = l) for every declared version, including "none".
std::vector<std::pair<std::string, double>> version_distribution(const Stratum& s) {
  std::vector<std::pair<std::string, double>> out;
  if (s.mixture.form == MixtureForm::Marginal) {
    for (const auto& e : s.mixture.entries) out.emplace_back(e.label, e.prob);
  } else {
    out.emplace_back("none", 1.0 - s.mixture.prevalence);
    for (const auto& e : s.mixture.entries) out.emplace_back(e.label, s.mixture.prevalence * e.prob);
  }
  return out;
}

}  // namespace

double oracle_contrast(const Scenario& scenario, std::string_view outcome) {
  scenario.require_outcome(outcome);

  std::vector<JointCell> table;
  std::vector<std::string> offenders;
  for (std::size_t l = 0; l < scenario.strata.size(); ++l) {
    const Stratum& s = scenario.strata[l];
    const auto risks = s.risks.find(outcome);
    if (risks == s.risks.end()) throw Error(ErrorKind::UnknownOutcome, "missing outcome in stratum " + s.label);

    double exposed_mass = 0.0;
    double unexposed_mass = 0.0;
    for (const auto& [version, p] : version_distribution(s)) {
      const auto r = risks->second.find(version);
      if (r == risks->second.end()) throw Error(ErrorKind::UnknownStrain, "missing risk for " + version);
      const bool exposed = version != "none";
      (exposed ? exposed_mass : unexposed_mass) += p;
      table.push_back({l, exposed, true, s.weight * p * r->second});
      table.push_back({l, exposed, false, s.weight * p * (1.0 - r->second)});
    }
    if (!(exposed_mass > 0.0) || !(unexposed_mass > 0.0)) offenders.push_back(s.label);
  }
  if (!offenders.empty()) {
    std::string msg = "positivity violated in strata ";
    for (std::size_t i = 0; i < offenders.size(); ++i) msg += (i ? ", \"" : "\"") + offenders[i] + "\"";
    throw Error(ErrorKind::PositivityViolation, msg);
  }

  // Marginals of the joint table per stratum.
  const std::size_t n = scenario.strata.size();
  std::vector<double> p_l(n, 0.0);
  std::vector<double> p_a1(n, 0.0), p_a0(n, 0.0);
  std::vector<double> p_y1_a1(n, 0.0), p_y1_a0(n, 0.0);
  for (const auto& c : table) {
    p_l[c.stratum] += c.mass;
    (c.exposed ? p_a1 : p_a0)[c.stratum] += c.mass;
    if (c.outcome) (c.exposed ? p_y1_a1 : p_y1_a0)[c.stratum] += c.mass;
  }

  double contrast = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    if (p_l[l] == 0.0) continue;
    contrast += (p_y1_a1[l] / p_a1[l] - p_y1_a0[l] / p_a0[l]) * p_l[l];
  }
  return contrast;
}

}  // namespace strainmix

#include "support/properties.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "strainmix/error.hpp"
#include "strainmix/exact.hpp"
#include "strainmix/simulate.hpp"
#include "support/random_scenarios.hpp"

namespace strainmix::testing {

namespace {

constexpr const char* kOutcome = "y0";

// Distinct seed families so properties never share generated worlds.
std::uint64_t trial_seed(std::uint64_t family, std::size_t trial) {
  return case_seed(family * 1'000'003ULL + trial);
}

// Rewrites a stratum into conditional form so mixture edits keep prevalence fixed.
void make_conditional(Stratum& st) {
  const auto mix = mixture_given_infection(st);
  st.mixture = {MixtureForm::ConditionalOnInfection, mix.strains, mix.prevalence};
}

std::vector<std::string> strains_of(const Stratum& st) {
  std::vector<std::string> out;
  for (const auto& v : st.versions())
    if (is_strain(v)) out.push_back(v);
  return out;
}

}  // namespace

void PropertyResult::record(std::size_t trial, double error, double tolerance, const std::string& what) {
  max_error = std::max(max_error, error);
  if (!(error <= tolerance)) fail(trial, what + " error " + std::to_string(error));
}

void PropertyResult::fail(std::size_t trial, const std::string& what) {
  if (failures++ == 0) first_failure = "trial " + std::to_string(trial) + ": " + what;
}

PropertyResult check_identities(std::size_t trials, double tolerance) {
  PropertyResult result;
  for (std::size_t t = 0; t < trials; ++t, ++result.trials) {
    const auto s = random_scenario(trial_seed(1, t));
    const double c = standardized_contrast(s, kOutcome);
    const auto arms = trial_view(s, kOutcome);
    const auto report = decompose_contrast(s, kOutcome);
    double sum = 0.0;
    for (const auto& term : report.terms) sum += term.contribution;
    const double oracle = oracle_contrast(s, kOutcome);

    result.record(t, std::abs(arms.arm1_mean - arms.arm0_mean - c), tolerance, "trial view");
    result.record(t, std::abs(sum - c), tolerance, "decomposition");
    result.record(t, std::abs(oracle - c), tolerance, "oracle");
    if (report.contrast != c) result.fail(t, "decomposition contrast not bit-equal");
  }
  return result;
}

PropertyResult check_refinement(std::size_t trials, double tolerance) {
  PropertyResult result;
  for (std::size_t t = 0; t < trials; ++t, ++result.trials) {
    std::mt19937_64 rng(trial_seed(2, t));
    auto s = random_scenario(rng());
    const double before = standardized_contrast(s, kOutcome);

    auto& st = s.strata[rng() % s.strata.size()];
    const auto strains = strains_of(st);
    const std::string k = strains[rng() % strains.size()];
    const double share = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    auto& entries = st.mixture.entries;
    auto it = std::find_if(entries.begin(), entries.end(), [&](const MixtureEntry& e) { return e.label == k; });
    const double mass = it->prob;
    const auto pos = entries.erase(it);
    entries.insert(pos, {{k + "a", mass * share}, {k + "b", mass - mass * share}});
    for (auto& [outcome, table] : st.risks) {
      const double r = table.at(k);
      table.erase(k);
      table[k + "a"] = r;
      table[k + "b"] = r;
    }
    result.record(t, std::abs(standardized_contrast(s, kOutcome) - before), tolerance, "refinement");
  }
  return result;
}

PropertyResult check_monotonicity(std::size_t trials, double tolerance) {
  PropertyResult result;
  std::size_t t = 0;
  for (std::uint64_t attempt = 0; result.trials < trials; ++attempt) {
    std::mt19937_64 rng(trial_seed(3, attempt));
    auto s = random_scenario(rng());
    const std::size_t l = rng() % s.strata.size();
    if (strains_of(s.strata[l]).size() < 2) continue;
    make_conditional(s.strata[l]);
    const double before = standardized_contrast(s, kOutcome);

    auto& st = s.strata[l];
    auto& entries = st.mixture.entries;
    std::size_t j = rng() % entries.size();
    std::size_t k = rng() % (entries.size() - 1);
    if (k >= j) ++k;
    const double r0 = st.risk(kOutcome, kNoInfection);
    double effect_j = st.risk(kOutcome, entries[j].label) - r0;
    double effect_k = st.risk(kOutcome, entries[k].label) - r0;
    if (effect_k < effect_j) {
      std::swap(j, k);
      std::swap(effect_j, effect_k);
    }
    const double eps = entries[j].prob * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    entries[j].prob -= eps;
    entries[k].prob += eps;

    const double delta = standardized_contrast(s, kOutcome) - before;
    const double expected = eps * (effect_k - effect_j) * st.weight;
    result.record(t, std::abs(delta - expected), tolerance, "monotonicity");
    if (delta < -tolerance) result.fail(t, "contrast decreased by " + std::to_string(-delta));
    ++t;
    ++result.trials;
  }
  return result;
}

PropertyResult check_relabel(std::size_t trials, double tolerance) {
  PropertyResult result;
  for (std::size_t t = 0; t < trials; ++t, ++result.trials) {
    std::mt19937_64 rng(trial_seed(4, t));
    const auto s = random_scenario(rng());

    // Permute s0..s9 among themselves so the label sort order changes too.
    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::map<std::string, std::string> rename{{"none", "none"}};
    for (int i = 0; i < 10; ++i) rename["s" + std::to_string(i)] = "s" + std::to_string(perm[i]);

    auto r = s;
    for (auto& st : r.strata) {
      for (auto& e : st.mixture.entries) e.label = rename.at(e.label);
      for (auto& [outcome, table] : st.risks) {
        RiskTable renamed;
        for (const auto& [v, risk] : table) renamed[rename.at(v)] = risk;
        table = std::move(renamed);
      }
    }

    result.record(t, std::abs(standardized_contrast(s, kOutcome) - standardized_contrast(r, kOutcome)), tolerance,
                  "contrast");
    result.record(t, std::abs(oracle_contrast(s, kOutcome) - oracle_contrast(r, kOutcome)), tolerance, "oracle");
    const auto arms_s = trial_view(s, kOutcome);
    const auto arms_r = trial_view(r, kOutcome);
    result.record(t, std::abs(arms_s.arm1_mean - arms_r.arm1_mean), tolerance, "arm1");
    result.record(t, std::abs(arms_s.arm0_mean - arms_r.arm0_mean), tolerance, "arm0");

    const auto dec_s = decompose_contrast(s, kOutcome);
    const auto dec_r = decompose_contrast(r, kOutcome);
    if (dec_s.terms.size() != dec_r.terms.size()) result.fail(t, "term count changed");
    for (const auto& term : dec_s.terms) {
      auto it = std::find_if(dec_r.terms.begin(), dec_r.terms.end(), [&](const ContrastTerm& x) {
        return x.stratum == term.stratum && x.version == rename.at(term.version);
      });
      if (it == dec_r.terms.end()) {
        result.fail(t, "term missing after rename");
        continue;
      }
      result.record(t, std::abs(it->contribution - term.contribution), tolerance, "contribution");
      result.record(t, std::abs(it->effect - term.effect), tolerance, "effect");
    }

    const auto irr_s = version_irrelevance_check(s, kOutcome);
    const auto irr_r = version_irrelevance_check(r, kOutcome);
    for (std::size_t i = 0; i < irr_s.strata.size(); ++i)
      result.record(t, std::abs(irr_s.strata[i].spread - irr_r.strata[i].spread), tolerance, "spread");

    // Sampling draws by declared position, so cohorts match record for record.
    const auto seed = rng();
    const auto cs = sample_cohort(s, 400, seed);
    const auto cr = sample_cohort(r, 400, seed);
    std::string err_s, err_r;
    double est_s = 0.0, est_r = 0.0;
    try {
      est_s = estimate_blind(cs, kOutcome).estimate;
    } catch (const Error& e) {
      err_s = to_string(e.kind());
    }
    try {
      est_r = estimate_blind(cr, kOutcome).estimate;
    } catch (const Error& e) {
      err_r = to_string(e.kind());
    }
    if (err_s != err_r) result.fail(t, "estimator error changed under rename");
    result.record(t, std::abs(est_s - est_r), tolerance, "blind estimate");
  }
  return result;
}

PropertyResult check_scaling(std::size_t trials, double tolerance) {
  PropertyResult result;
  for (std::size_t t = 0; t < trials; ++t, ++result.trials) {
    std::mt19937_64 rng(trial_seed(5, t));
    const auto s = random_scenario(rng());
    const double c = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto scaled = s;
    for (auto& st : scaled.strata)
      for (auto& [outcome, table] : st.risks)
        for (auto& [v, r] : table) r *= c;

    const auto a = decompose_contrast(s, kOutcome);
    const auto b = decompose_contrast(scaled, kOutcome);
    result.record(t, std::abs(b.contrast - c * a.contrast), tolerance, "contrast");
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      result.record(t, std::abs(b.terms[i].effect - c * a.terms[i].effect), tolerance, "effect");
      result.record(t, std::abs(b.terms[i].contribution - c * a.terms[i].contribution), tolerance, "contribution");
    }
  }
  return result;
}

PropertyResult check_null_collapse(std::size_t trials) {
  PropertyResult result;
  for (std::size_t t = 0; t < trials; ++t, ++result.trials) {
    auto s = random_scenario(trial_seed(6, t));
    for (auto& st : s.strata)
      for (auto& [outcome, table] : st.risks) {
        const double r0 = table.at(std::string(kNoInfection));
        for (auto& [v, r] : table) r = r0;
      }
    // Weighted sums of equal risks can differ from r0 by a rounding step.
    result.record(t, std::abs(standardized_contrast(s, kOutcome)), 1e-15, "null contrast");
    for (const auto& term : decompose_contrast(s, kOutcome).terms)
      if (term.contribution != 0.0) result.fail(t, "nonzero contribution under null effects");
  }
  return result;
}

PropertyResult check_transport(std::size_t trials, double gap) {
  PropertyResult result;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t, ++result.trials) {
    std::mt19937_64 rng(trial_seed(7, t));
    const auto s = random_scenario(rng());
    auto target = target_from_scenario(s);

    // Perturb some trials in the mixtures, some in Pr(L), some not at all.
    const auto mode = rng() % 4;
    if (mode == 1 || mode == 3) {
      auto& m = target.mixtures[rng() % target.mixtures.size()].strains;
      double total = 0.0;
      for (auto& e : m) total += (e.prob = unit(rng) + 0.01);
      for (auto& e : m) e.prob /= total;
    }
    if (mode == 2 || mode == 3) {
      auto& w = *target.strata_weights;
      double total = 0.0;
      for (auto& e : w) total += (e.prob = unit(rng) + 0.01);
      for (auto& e : w) e.prob /= total;
    }

    const auto report = transport_contrast(s, kOutcome, target);
    double max_tv = report.strata_divergence;
    for (const auto& d : report.mixture_divergence) max_tv = std::max(max_tv, d.total_variation);
    if (max_tv == 0.0 && report.target_contrast != report.source_contrast)
      result.fail(t, "zero divergence but contrasts differ");
    if (std::abs(report.target_contrast - report.source_contrast) > gap && !(max_tv > 0.0))
      result.fail(t, "contrasts differ without divergence");
    if (mode == 0 && max_tv != 0.0) result.fail(t, "self transport reports divergence");
  }
  return result;
}

}  // namespace strainmix::testing

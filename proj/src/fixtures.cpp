#include "strainmix/scenario.hpp"

namespace strainmix::fixtures {

namespace {

struct VersionSpec {
  const char* label;
  double prob;
  double risk;
};

Stratum marginal_stratum(const char* label, double weight, std::initializer_list<VersionSpec> versions) {
  Stratum s;
  s.label = label;
  s.weight = weight;
  s.mixture.form = MixtureForm::Marginal;
  for (const auto& v : versions) {
    s.mixture.entries.push_back({v.label, v.prob});
    s.risks["hosp"][v.label] = v.risk;
  }
  return s;
}

}  // namespace

Scenario trivial() {
  return {"S_TRIV", {"hosp"}, {marginal_stratum("l0", 1.0, {{"none", 0.5, 0.1}, {"s1", 0.5, 0.3}})}};
}

Scenario panel_b() {
  return {"S_B",
          {"hosp"},
          {marginal_stratum("l0", 1.0,
                            {{"none", 0.5, 0.05}, {"s1", 0.10, 0.25}, {"s2", 0.25, 0.05}, {"s3", 0.15, 0.45}})}};
}

Scenario panel_c() {
  Stratum s;
  s.label = "l0";
  s.weight = 1.0;
  s.mixture.form = MixtureForm::ConditionalOnInfection;
  s.mixture.prevalence = 0.5;
  s.mixture.entries = {{"s1", 0.4}, {"s2", 0.1}, {"s3", 0.5}};
  s.risks["hosp"] = {{"none", 0.05}, {"s1", 0.25}, {"s2", 0.05}, {"s3", 0.45}};
  return {"S_C", {"hosp"}, {s}};
}

Scenario confounded() {
  return {"S_CONF",
          {"hosp"},
          {marginal_stratum("young", 0.6, {{"none", 0.7, 0.02}, {"s1", 0.2, 0.10}, {"s2", 0.1, 0.02}}),
           marginal_stratum("old", 0.4, {{"none", 0.4, 0.10}, {"s1", 0.3, 0.30}, {"s2", 0.3, 0.10}})}};
}

Scenario fever_hosp() {
  Stratum s;
  s.label = "l0";
  s.weight = 1.0;
  s.mixture.entries = {{"none", 0.6}, {"s1", 0.25}, {"s2", 0.15}};
  s.risks["fever"] = {{"none", 0.02}, {"s1", 0.3}, {"s2", 0.3}};
  s.risks["hosp"] = {{"none", 0.01}, {"s1", 0.05}, {"s2", 0.20}};
  return {"FEVER_HOSP", {"fever", "hosp"}, {s}};
}

}  // namespace strainmix::fixtures

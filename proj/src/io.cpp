#include "strainmix/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "strainmix/error.hpp"

namespace strainmix {

namespace {

using Json = nlohmann::json;

std::string dq(std::string_view s) { return "\"" + std::string(s) + "\""; }

// ---------------------------------------------------------------- parsing

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Schema, path + ": " + message);
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::Syntax, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                       ": malformed JSON");
  }
}

void check_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto k : allowed) known = known || item.key() == k;
    if (!known) schema_error(path, "unknown key " + dq(item.key()));
  }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing key ") + dq(key));
  return *it;
}

double get_number(const Json& value, const std::string& path) {
  if (!value.is_number()) schema_error(path, "expected a number");
  return value.get<double>();
}

std::string get_string(const Json& value, const std::string& path) {
  if (!value.is_string()) schema_error(path, "expected a string");
  return value.get<std::string>();
}

const Json& get_array(const Json& value, const std::string& path) {
  if (!value.is_array()) schema_error(path, "expected an array");
  return value;
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<MixtureEntry> parse_strain_list(const Json& value, const std::string& path) {
  std::vector<MixtureEntry> out;
  const auto& arr = get_array(value, path);
  for (std::size_t j = 0; j < arr.size(); ++j) {
    const auto p = index_path(path, j);
    check_keys(arr[j], p, {"label", "prob"});
    out.push_back({get_string(require(arr[j], p, "label"), p + ".label"),
                   get_number(require(arr[j], p, "prob"), p + ".prob")});
  }
  return out;
}

// ---------------------------------------------------------------- writing

std::string escape(std::string_view s) { return Json(std::string(s)).dump(); }

class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separator();
    out_ += escape(k);
    out_ += ": ";
    after_key_ = true;
    return *this;
  }
  JsonWriter& value(double v) { return scalar(std::isfinite(v) ? format_number(v) : "null"); }
  JsonWriter& value(std::string_view s) { return scalar(escape(s)); }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(bool b) { return scalar(b ? "true" : "false"); }
  JsonWriter& value(std::size_t n) { return scalar(std::to_string(n)); }

  template <typename T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  std::string finish() { return out_ + "\n"; }

 private:
  void separator() {
    if (depth_.empty()) return;
    if (depth_.back()++ > 0) out_ += ',';
    out_ += '\n';
    out_.append(2 * depth_.size(), ' ');
  }
  JsonWriter& scalar(const std::string& text) {
    if (!after_key_) separator();
    after_key_ = false;
    out_ += text;
    return *this;
  }
  JsonWriter& open(char c) {
    if (!after_key_) separator();
    after_key_ = false;
    out_ += c;
    depth_.push_back(0);
    return *this;
  }
  JsonWriter& close(char c) {
    const bool had_items = depth_.back() > 0;
    depth_.pop_back();
    if (had_items) {
      out_ += '\n';
      out_.append(2 * depth_.size(), ' ');
    }
    out_ += c;
    return *this;
  }

  std::string out_;
  std::vector<std::size_t> depth_;
  bool after_key_ = false;
};

std::string csv_field(std::string_view s) {
  const bool needs_quotes = s.find_first_of(",\"\n\r") != std::string_view::npos || (!s.empty() && s[0] == '#');
  if (!needs_quotes) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  template <typename... Fields>
  CsvWriter& row(const Fields&... fields) {
    std::size_t i = 0;
    ((out_ += (i++ ? "," : ""), out_ += cell(fields)), ...);
    out_ += '\n';
    return *this;
  }
  template <typename... Fields>
  CsvWriter& summary(std::string_view name, const Fields&... fields) {
    out_ += "# ";
    out_ += csv_field(name);
    ((out_ += ",", out_ += cell(fields)), ...);
    out_ += '\n';
    return *this;
  }
  std::string str() const { return out_; }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(std::string_view s) { return csv_field(s); }
  static std::string cell(const std::string& s) { return csv_field(s); }
  static std::string cell(const char* s) { return csv_field(s); }

  std::string out_;
};

void write_mixture(JsonWriter& w, const std::vector<MixtureEntry>& entries) {
  w.begin_array();
  for (const auto& e : entries) w.begin_object().field("label", e.label).field("prob", e.prob).end_object();
  w.end_array();
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Usage, "cannot read " + dq(path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario parse_scenario_unchecked(std::string_view text) {
  const Json doc = parse_json(text);
  check_keys(doc, "$", {"name", "outcomes", "strata"});

  Scenario scenario;
  scenario.name = get_string(require(doc, "$", "name"), "name");
  const auto& outcomes = get_array(require(doc, "$", "outcomes"), "outcomes");
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    scenario.outcomes.push_back(get_string(outcomes[i], index_path("outcomes", i)));

  const auto& strata = get_array(require(doc, "$", "strata"), "strata");
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const auto path = index_path("strata", i);
    const auto& node = strata[i];
    check_keys(node, path, {"label", "weight", "versions", "prevalence"});

    Stratum stratum;
    stratum.label = get_string(require(node, path, "label"), path + ".label");
    stratum.weight = get_number(require(node, path, "weight"), path + ".weight");
    const bool conditional = node.contains("prevalence");
    if (conditional) {
      stratum.mixture.form = MixtureForm::ConditionalOnInfection;
      stratum.mixture.prevalence = get_number(node["prevalence"], path + ".prevalence");
    }

    bool has_none = false;
    const auto& versions = get_array(require(node, path, "versions"), path + ".versions");
    for (std::size_t j = 0; j < versions.size(); ++j) {
      const auto vpath = index_path(path + ".versions", j);
      const auto& v = versions[j];
      check_keys(v, vpath, {"label", "prob", "risks", "risk"});
      const auto label = get_string(require(v, vpath, "label"), vpath + ".label");
      const bool none = !is_strain(label);
      has_none = has_none || none;

      if (conditional && none) {
        if (v.contains("prob"))
          schema_error(vpath, "\"none\" takes no prob when the stratum gives a prevalence");
      } else {
        stratum.mixture.entries.push_back({label, get_number(require(v, vpath, "prob"), vpath + ".prob")});
      }

      const bool has_risks = v.contains("risks");
      const bool has_risk = v.contains("risk");
      if (has_risks == has_risk) schema_error(vpath, "exactly one of \"risks\" or \"risk\" is required");
      if (has_risk) {
        if (scenario.outcomes.size() != 1)
          schema_error(vpath + ".risk", "shorthand needs exactly one declared outcome");
        stratum.risks[scenario.outcomes.front()][label] = get_number(v["risk"], vpath + ".risk");
      } else {
        const auto& risks = v["risks"];
        if (!risks.is_object()) schema_error(vpath + ".risks", "expected an object");
        for (const auto& item : risks.items())
          stratum.risks[item.key()][label] = get_number(item.value(), vpath + ".risks." + item.key());
      }
    }
    if (!has_none) schema_error(path, "stratum " + dq(stratum.label) + " has no \"none\" version");
    scenario.strata.push_back(std::move(stratum));
  }
  return scenario;
}

Scenario parse_scenario(std::string_view text) {
  auto scenario = parse_scenario_unchecked(text);
  const auto report = validate_scenario(scenario);
  if (!report.ok()) throw Error(ErrorKind::Validation, report.summary());
  return scenario;
}

std::string serialize_scenario(const Scenario& scenario) {
  JsonWriter w;
  w.begin_object().field("name", scenario.name);
  w.key("outcomes").begin_array();
  for (const auto& o : scenario.outcomes) w.value(o);
  w.end_array();

  const bool shorthand = scenario.outcomes.size() == 1;
  auto write_risks = [&](const Stratum& s, const std::string& version) {
    if (shorthand) {
      w.field("risk", s.risk(scenario.outcomes.front(), version));
      return;
    }
    w.key("risks").begin_object();
    for (const auto& o : scenario.outcomes) w.field(o, s.risk(o, version));
    w.end_object();
  };

  w.key("strata").begin_array();
  for (const auto& s : scenario.strata) {
    w.begin_object().field("label", s.label).field("weight", s.weight);
    const bool conditional = s.mixture.form == MixtureForm::ConditionalOnInfection;
    if (conditional) w.field("prevalence", s.mixture.prevalence);
    w.key("versions").begin_array();
    if (conditional) {
      w.begin_object().field("label", kNoInfection);
      write_risks(s, std::string(kNoInfection));
      w.end_object();
    }
    for (const auto& e : s.mixture.entries) {
      w.begin_object().field("label", e.label).field("prob", e.prob);
      write_risks(s, e.label);
      w.end_object();
    }
    w.end_array().end_object();
  }
  w.end_array().end_object();
  return w.finish();
}

TransportTarget parse_target(std::string_view text) {
  const Json doc = parse_json(text);
  if (doc.is_object() && doc.contains("outcomes")) return target_from_scenario(parse_scenario(text));

  check_keys(doc, "$", {"strata"});
  const auto& strata = get_array(require(doc, "$", "strata"), "strata");
  TransportTarget target;
  std::vector<MixtureEntry> weights;
  std::size_t weighted = 0;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const auto path = index_path("strata", i);
    check_keys(strata[i], path, {"label", "weight", "versions"});
    const auto label = get_string(require(strata[i], path, "label"), path + ".label");
    if (strata[i].contains("weight")) {
      weights.push_back({label, get_number(strata[i]["weight"], path + ".weight")});
      ++weighted;
    }
    if (strata[i].contains("versions"))
      target.mixtures.push_back({label, parse_strain_list(strata[i]["versions"], path + ".versions")});
  }
  if (weighted != 0 && weighted != strata.size())
    schema_error("strata", "either every stratum or none gives a weight");
  if (weighted != 0) target.strata_weights = std::move(weights);
  return target;
}

std::vector<ScheduleEntry> parse_schedule(std::string_view text) {
  const Json doc = parse_json(text);
  const auto& entries = get_array(doc, "$");
  std::vector<ScheduleEntry> schedule;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto path = index_path("$", i);
    check_keys(entries[i], path, {"time", "strata"});
    ScheduleEntry entry;
    const auto& time = require(entries[i], path, "time");
    if (time.is_string())
      entry.time = time.get<std::string>();
    else if (time.is_number())
      entry.time = time.dump();
    else
      schema_error(path + ".time", "expected a string or number");
    const auto& strata = get_array(require(entries[i], path, "strata"), path + ".strata");
    for (std::size_t j = 0; j < strata.size(); ++j) {
      const auto spath = index_path(path + ".strata", j);
      check_keys(strata[j], spath, {"label", "versions"});
      entry.strata.push_back({get_string(require(strata[j], spath, "label"), spath + ".label"),
                              parse_strain_list(require(strata[j], spath, "versions"), spath + ".versions")});
    }
    schedule.push_back(std::move(entry));
  }
  return schedule;
}

// ---------------------------------------------------------------- reports

std::string write_report(const ContrastReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("stratum", "version", "effect", "weight", "contribution");
    for (const auto& t : report.terms) csv.row(t.stratum, t.version, t.effect, t.weight, t.contribution);
    csv.summary("outcome", report.outcome);
    csv.summary("contrast", report.contrast);
    csv.summary("arm1_mean", report.arm1_mean);
    csv.summary("arm0_mean", report.arm0_mean);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object()
      .field("outcome", report.outcome)
      .field("contrast", report.contrast)
      .field("arm1_mean", report.arm1_mean)
      .field("arm0_mean", report.arm0_mean);
  w.key("terms").begin_array();
  for (const auto& t : report.terms) {
    w.begin_object()
        .field("stratum", t.stratum)
        .field("version", t.version)
        .field("effect", t.effect)
        .field("mixture", t.mixture)
        .field("weight", t.weight)
        .field("contribution", t.contribution)
        .end_object();
  }
  w.end_array().end_object();
  return w.finish();
}

std::string write_contrast(const ContrastReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("outcome", "contrast", "arm1_mean", "arm0_mean");
    csv.row(report.outcome, report.contrast, report.arm1_mean, report.arm0_mean);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object()
      .field("outcome", report.outcome)
      .field("contrast", report.contrast)
      .field("arm1_mean", report.arm1_mean)
      .field("arm0_mean", report.arm0_mean)
      .end_object();
  return w.finish();
}

std::string write_report(const TransportReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("stratum", "mixture_tv");
    for (const auto& d : report.mixture_divergence) csv.row(d.stratum, d.total_variation);
    csv.summary("outcome", report.outcome);
    csv.summary("source_contrast", report.source_contrast);
    csv.summary("target_contrast", report.target_contrast);
    csv.summary("strata_tv", report.strata_divergence);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object()
      .field("outcome", report.outcome)
      .field("source_contrast", report.source_contrast)
      .field("target_contrast", report.target_contrast)
      .field("strata_tv", report.strata_divergence);
  w.key("mixture_tv").begin_array();
  for (const auto& d : report.mixture_divergence)
    w.begin_object().field("stratum", d.stratum).field("tv", d.total_variation).end_object();
  w.end_array().end_object();
  return w.finish();
}

std::string write_report(std::span<const TimePoint> series, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("time", "contrast");
    for (const auto& p : series) csv.row(p.time, p.contrast);
    return csv.str();
  }
  JsonWriter w;
  w.begin_array();
  for (const auto& p : series) {
    w.begin_object().field("time", p.time).field("contrast", p.contrast);
    w.key("mixtures").begin_array();
    for (const auto& m : p.mixtures) {
      w.begin_object().field("stratum", m.stratum).key("strains");
      write_mixture(w, m.strains);
      w.end_object();
    }
    w.end_array().end_object();
  }
  w.end_array();
  return w.finish();
}

std::string write_report(const McSummary& s, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("outcome", "reps", "n", "mean_estimate", "empirical_se", "exact_value", "mean_bias");
    csv.row(s.outcome, s.reps, s.n, s.mean_estimate, s.empirical_se, s.exact_value, s.mean_bias);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object()
      .field("outcome", s.outcome)
      .field("reps", s.reps)
      .field("n", s.n)
      .field("mean_estimate", s.mean_estimate)
      .field("empirical_se", s.empirical_se)
      .field("exact_value", s.exact_value)
      .field("mean_bias", s.mean_bias)
      .end_object();
  return w.finish();
}

std::string write_report(const EstimateReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("stratum", "n", "exposed", "unexposed");
    for (const auto& c : report.cells) csv.row(c.stratum, c.n, c.exposed, c.unexposed);
    csv.summary("estimand", report.estimand);
    csv.summary("outcome", report.outcome);
    csv.summary("estimate", report.estimate);
    csv.summary("n", report.n);
    for (const auto& warning : report.warnings) csv.summary("warning", warning);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object()
      .field("estimand", report.estimand)
      .field("outcome", report.outcome)
      .field("estimate", report.estimate)
      .field("n", report.n);
  w.key("cells").begin_array();
  for (const auto& c : report.cells) {
    w.begin_object()
        .field("stratum", c.stratum)
        .field("n", c.n)
        .field("exposed", c.exposed)
        .field("unexposed", c.unexposed)
        .end_object();
  }
  w.end_array();
  w.key("warnings").begin_array();
  for (const auto& warning : report.warnings) w.value(warning);
  w.end_array().end_object();
  return w.finish();
}

std::string write_report(const AwareReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("stratum", "version", "effect", "n");
    for (const auto& e : report.effects) csv.row(e.stratum, e.version, e.effect, e.n);
    csv.summary("outcome", report.outcome);
    csv.summary("contrast", report.contrast);
    csv.summary("n", report.n);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object().field("outcome", report.outcome).field("contrast", report.contrast).field("n", report.n);
  w.key("effects").begin_array();
  for (const auto& e : report.effects) {
    w.begin_object()
        .field("stratum", e.stratum)
        .field("version", e.version)
        .field("effect", e.effect)
        .field("n", e.n)
        .end_object();
  }
  w.end_array().end_object();
  return w.finish();
}

std::string write_report(const IrrelevanceReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("stratum", "spread", "irrelevant");
    for (const auto& s : report.strata) csv.row(s.stratum, s.spread, s.irrelevant);
    csv.summary("outcome", report.outcome);
    csv.summary("tolerance", report.tolerance);
    csv.summary("irrelevant", report.irrelevant);
    return csv.str();
  }
  JsonWriter w;
  w.begin_object()
      .field("outcome", report.outcome)
      .field("tolerance", report.tolerance)
      .field("irrelevant", report.irrelevant);
  w.key("strata").begin_array();
  for (const auto& s : report.strata) {
    w.begin_object()
        .field("stratum", s.stratum)
        .field("spread", s.spread)
        .field("irrelevant", s.irrelevant)
        .end_object();
  }
  w.end_array().end_object();
  return w.finish();
}

std::string write_report(const ValidationReport& report, Format format) {
  if (format == Format::Csv) {
    CsvWriter csv;
    csv.row("stratum", "version", "outcome", "rule");
    for (const auto& v : report.violations) csv.row(v.stratum, v.version, v.outcome, v.rule);
    csv.summary("ok", report.ok());
    return csv.str();
  }
  JsonWriter w;
  w.begin_object().field("ok", report.ok());
  w.key("violations").begin_array();
  for (const auto& v : report.violations) {
    w.begin_object()
        .field("stratum", v.stratum)
        .field("version", v.version)
        .field("outcome", v.outcome)
        .field("rule", v.rule)
        .end_object();
  }
  w.end_array().end_object();
  return w.finish();
}

ContrastReport parse_contrast_report(std::string_view json) {
  const Json doc = parse_json(json);
  check_keys(doc, "$", {"outcome", "contrast", "arm1_mean", "arm0_mean", "terms"});
  ContrastReport report;
  report.outcome = get_string(require(doc, "$", "outcome"), "outcome");
  report.contrast = get_number(require(doc, "$", "contrast"), "contrast");
  report.arm1_mean = get_number(require(doc, "$", "arm1_mean"), "arm1_mean");
  report.arm0_mean = get_number(require(doc, "$", "arm0_mean"), "arm0_mean");
  const auto& terms = get_array(require(doc, "$", "terms"), "terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto p = index_path("terms", i);
    const auto& t = terms[i];
    check_keys(t, p, {"stratum", "version", "effect", "mixture", "weight", "contribution"});
    report.terms.push_back({get_string(require(t, p, "stratum"), p + ".stratum"),
                            get_string(require(t, p, "version"), p + ".version"),
                            get_number(require(t, p, "effect"), p + ".effect"),
                            get_number(require(t, p, "mixture"), p + ".mixture"),
                            get_number(require(t, p, "weight"), p + ".weight"),
                            get_number(require(t, p, "contribution"), p + ".contribution")});
  }
  return report;
}

}  // namespace strainmix

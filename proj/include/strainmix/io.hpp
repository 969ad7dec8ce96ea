#pragma once

// Scenario, target and schedule files (strict JSON) and report serialization
// (CSV or JSON). Report numbers are written with 17 significant digits so
// every double survives a round trip.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strainmix/exact.hpp"
#include "strainmix/scenario.hpp"
#include "strainmix/simulate.hpp"

namespace strainmix {

enum class Format { Csv, Json };

/// Parses and validates a scenario document. Throws Syntax (with line and
/// column), Schema (with the offending field path) or Validation.
Scenario parse_scenario(std::string_view text);
/// Schema checks only; validate_scenario is left to the caller.
Scenario parse_scenario_unchecked(std::string_view text);
std::string serialize_scenario(const Scenario& scenario);

/// Either a full scenario document (its risks are ignored) or
/// {"strata": [{"label", "weight"?, "versions"?: [{"label", "prob"}]}]}
/// with conditional-on-infection mixtures.
TransportTarget parse_target(std::string_view text);

/// [{"time": tag, "strata": [{"label", "versions": [{"label", "prob"}]}]}]
std::vector<ScheduleEntry> parse_schedule(std::string_view text);

/// Reads a whole file; throws Usage when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// %.17g, with "nan"/"inf" spelled out.
std::string format_number(double value);

std::string write_report(const ContrastReport& report, Format format);
/// Headline numbers only: outcome, contrast and the two arm means.
std::string write_contrast(const ContrastReport& report, Format format);
std::string write_report(const TransportReport& report, Format format);
std::string write_report(std::span<const TimePoint> series, Format format);
std::string write_report(const McSummary& summary, Format format);
std::string write_report(const EstimateReport& report, Format format);
std::string write_report(const AwareReport& report, Format format);
std::string write_report(const IrrelevanceReport& report, Format format);
std::string write_report(const ValidationReport& report, Format format);

/// Reads back the JSON form of write_report(ContrastReport).
ContrastReport parse_contrast_report(std::string_view json);

}  // namespace strainmix

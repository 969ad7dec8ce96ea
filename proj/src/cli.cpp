#include "strainmix/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "strainmix/chart.hpp"
#include "strainmix/error.hpp"
#include "strainmix/exact.hpp"
#include "strainmix/io.hpp"
#include "strainmix/simulate.hpp"

namespace strainmix {

namespace {

struct Flags {
  std::string scenario;
  std::string outcome;
  std::string target;
  std::string schedule;
  std::string out;
  std::string format = "csv";
  std::size_t n = 10000;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  double tolerance = 0.0;
  int threads = 0;
};

enum Flag : unsigned {
  kOutcome = 1u << 0,
  kTarget = 1u << 1,
  kSchedule = 1u << 2,
  kSampling = 1u << 3,
  kReps = 1u << 4,
  kTolerance = 1u << 5,
  kFormat = 1u << 6,
};

void emit(const Flags& flags, std::ostream& out, const std::string& bytes) {
  if (flags.out.empty()) {
    out << bytes;
    out.flush();
    return;
  }
  std::ofstream file(flags.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::Usage, "cannot write \"" + flags.out + "\"");
  file << bytes;
  if (!file) throw Error(ErrorKind::Usage, "failed writing \"" + flags.out + "\"");
}

Format format_of(const Flags& flags) { return flags.format == "json" ? Format::Json : Format::Csv; }

std::string outcome_of(const Flags& flags, const Scenario& scenario) {
  if (!flags.outcome.empty()) {
    scenario.require_outcome(flags.outcome);
    return flags.outcome;
  }
  return scenario.outcomes.front();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const CliOptions& options) {
  Flags flags;
  CLI::App app{"Standardized contrasts for exposures with latent versions", "strainmix"};
  app.require_subcommand(1, 1);

  auto add = [&](const char* name, const char* description, unsigned extra) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--scenario", flags.scenario, "Scenario file (JSON)")->required();
    if (extra & kOutcome) sub->add_option("--outcome", flags.outcome, "Outcome name (default: first declared)");
    if (extra & kTarget) sub->add_option("--target", flags.target, "Target distributions (JSON)")->required();
    if (extra & kSchedule) sub->add_option("--schedule", flags.schedule, "Strain composition schedule (JSON)");
    if (extra & kSampling) {
      sub->add_option("--n", flags.n, "Cohort size")->capture_default_str();
      sub->add_option("--seed", flags.seed, "Seed (64-bit unsigned)")->capture_default_str();
    }
    if (extra & kReps) {
      sub->add_option("--reps", flags.reps, "Monte Carlo replicates")->capture_default_str()->check(
          CLI::PositiveNumber);
      sub->add_option("--threads", flags.threads, "Worker threads (1 = serial reference, 0 = default)")
          ->capture_default_str()
          ->check(CLI::NonNegativeNumber);
    }
    if (extra & kTolerance)
      sub->add_option("--tolerance", flags.tolerance, "Allowed strain risk spread")->capture_default_str()->check(
          CLI::NonNegativeNumber);
    if (extra & kFormat)
      sub->add_option("--format", flags.format, "Report format")->capture_default_str()->check(
          CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", flags.out, "Write output to this path instead of standard output");
    return sub;
  };

  auto* validate = add("validate", "Check a scenario file against every invariant", kFormat);
  auto* exact = add("exact", "Standardized contrast and trial-view arm means", kOutcome | kFormat);
  auto* decompose = add("decompose", "Per-stratum, per-strain contributions to the contrast", kOutcome | kFormat);
  auto* simulate = add("simulate", "Sample a cohort and run the strain-blind estimator",
                       kOutcome | kSampling | kFormat);
  auto* aware = add("aware", "Sample a cohort and estimate strain-specific effects", kOutcome | kSampling | kFormat);
  auto* mc = add("mc", "Monte Carlo study of the strain-blind estimator",
                 kOutcome | kSampling | kReps | kFormat);
  auto* transport = add("transport", "Recombine source effects with target distributions",
                        kOutcome | kTarget | kFormat);
  auto* drift = add("drift", "Contrast under a schedule of strain compositions", kOutcome | kSchedule | kFormat);
  auto* irrelevance = add("irrelevance", "Check version irrelevance of an outcome", kOutcome | kTolerance | kFormat);
  auto* chart = add("chart", "SVG chart of strain composition (schedule optional)", kOutcome | kSchedule);
  drift->get_option("--schedule")->required();

  const std::string error_prefix = options.color ? "\033[31merror\033[0m: " : "error: ";

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Format format = format_of(flags);

    if (validate->parsed()) {
      const auto scenario = parse_scenario_unchecked(read_file(flags.scenario));
      const auto report = validate_scenario(scenario);
      emit(flags, out, write_report(report, format));
      if (!report.ok()) {
        err << error_prefix << to_string(ErrorKind::Validation) << ": " << report.violations.size()
            << " violation(s) in \"" << flags.scenario << "\"\n";
        return exit_code(ErrorKind::Validation);
      }
      return 0;
    }

    const auto scenario = parse_scenario(read_file(flags.scenario));
    const auto outcome = outcome_of(flags, scenario);

    if (exact->parsed()) {
      emit(flags, out, write_contrast(decompose_contrast(scenario, outcome), format));
    } else if (decompose->parsed()) {
      emit(flags, out, write_report(decompose_contrast(scenario, outcome), format));
    } else if (simulate->parsed()) {
      emit(flags, out, write_report(estimate_blind(sample_cohort(scenario, flags.n, flags.seed), outcome), format));
    } else if (aware->parsed()) {
      emit(flags, out, write_report(estimate_aware(sample_cohort(scenario, flags.n, flags.seed), outcome), format));
    } else if (mc->parsed()) {
      const auto execution = flags.threads == 1 ? Execution::Serial : Execution::Parallel;
      emit(flags, out,
           write_report(monte_carlo_study(scenario, outcome, flags.n, flags.reps, flags.seed, execution, flags.threads),
                        format));
    } else if (transport->parsed()) {
      const auto target = parse_target(read_file(flags.target));
      emit(flags, out, write_report(transport_contrast(scenario, outcome, target), format));
    } else if (drift->parsed()) {
      const auto series = contrast_timeseries(scenario, outcome, parse_schedule(read_file(flags.schedule)));
      emit(flags, out, write_report(std::span<const TimePoint>(series), format));
    } else if (irrelevance->parsed()) {
      emit(flags, out, write_report(version_irrelevance_check(scenario, outcome, flags.tolerance), format));
    } else if (chart->parsed()) {
      if (flags.schedule.empty()) {
        emit(flags, out, render_chart(decompose_contrast(scenario, outcome)));
      } else {
        const auto series = contrast_timeseries(scenario, outcome, parse_schedule(read_file(flags.schedule)));
        emit(flags, out, render_chart(std::span<const TimePoint>(series)));
      }
    }
    return 0;
  } catch (const Error& e) {
    err << error_prefix << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << error_prefix << e.what() << '\n';
    return 1;
  }
}

}  // namespace strainmix

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gridflex/engine.hpp"
#include "gridflex/exact.hpp"
#include "gridflex/experiments.hpp"
#include "gridflex/rng.hpp"
#include "gridflex/scenario_io.hpp"
#include "gridflex/workload.hpp"

namespace gridflex::cli {

using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string mobility;  // "", "on" or "off"
  std::string scheduler = "heuristic";
  std::string out;
  std::string format = "json";
};

/// Error carrying an exit code other than the usage default.
struct Exit {
  int code;
  std::string message;
};

void emit(const Globals& g, const std::string& text, std::ostream& out) {
  if (g.out.empty() || g.out == "-") {
    out << text;
  } else {
    write_text_file(g.out, text);
  }
}

std::optional<bool> mobility_flag(const Globals& g) {
  if (g.mobility.empty()) return std::nullopt;
  return g.mobility == "on";
}

json stats_json(const Stats& s) {
  return json{{"count", s.count}, {"mean", s.mean},     {"variance", s.variance},
              {"min", s.min},     {"q25", s.q25},       {"median", s.median},
              {"q75", s.q75},     {"max", s.max}};
}

json improvement_json(const Improvement& imp) {
  json j{{"baseline", imp.baseline},
         {"baseline_loss", imp.baseline_loss},
         {"heuristic_loss", imp.heuristic_loss},
         {"text", imp.text}};
  j["percent"] = imp.percent ? json(*imp.percent) : json(nullptr);
  return j;
}

json report_json(const FeasibilityReport& report) {
  json checks = json::array();
  for (const ConstraintCheck& c : report.checks) {
    json j{{"constraint", constraint_label(c.constraint)},
           {"description", constraint_description(c.constraint)},
           {"passed", c.passed}};
    if (c.witness) {
      j["witness"] = json{{"device", c.witness->device},
                          {"slot", c.witness->slot},
                          {"detail", c.witness->detail}};
    }
    checks.push_back(std::move(j));
  }
  return json{{"feasible", report.feasible()}, {"checks", std::move(checks)}};
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  int devices = 60;
  std::string classes = "LLMMH";
  double mobile = 0.5;
  double capacity = 500.0;
  int horizon = 50;
};

int cmd_generate(const GenerateArgs& a, const Globals& g, std::ostream& out) {
  GenSpec spec;
  spec.num_devices = a.devices;
  spec.classes = parse_classes(a.classes);
  spec.mobile_fraction = a.mobile;
  spec.capacity_kwh = a.capacity;
  spec.horizon_slots = a.horizon;
  spec.seed = g.seed;
  const GeneratedScenario gen = generate(spec);
  if (g.format == "table") {
    std::ostringstream os;
    const std::vector<double> util = cluster_utilization(gen.scenario);
    os << "scenario " << gen.scenario.id << ": " << gen.scenario.devices.size() << " requests\n";
    os << "aggregator  class  target  utilisation\n";
    for (size_t j = 0; j < util.size(); ++j) {
      os << std::setw(10) << j << "  " << std::setw(5) << format_classes(std::span(spec.classes).subspan(j, 1))
         << "  " << fixed(gen.target_utilization[j]) << "  " << fixed(util[j]) << '\n';
    }
    emit(g, os.str(), out);
  } else {
    emit(g, scenario_to_json(gen.scenario), out);
  }
  return kOk;
}

// ---- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string sessions;
  double budget = 50.0;
  double mobile = 1.0;
  std::string id = "sessions";
};

IngestResult ingest_file(const std::string& path, const IngestOptions& options, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const SessionParse parsed = parse_sessions_csv(in);
  if (parsed.skipped > 0) err << "skipped " << parsed.skipped << " malformed session rows\n";
  IngestResult r = ingest_sessions(parsed.records, options);
  r.skipped += parsed.skipped;
  return r;
}

int cmd_ingest(const IngestArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  IngestOptions o;
  o.budget_kw = a.budget;
  o.mobile_fraction = a.mobile;
  o.seed = g.seed;
  o.scenario_id = a.id;
  const IngestResult r = ingest_file(a.sessions, o, err);
  if (r.clipped > 0) err << "clipped " << r.clipped << " demands to the reachable maximum\n";
  if (g.format == "table") {
    std::ostringstream os;
    os << "scenario " << r.scenario.id << ": " << r.scenario.devices.size() << " requests, "
       << r.stations.size() << " aggregators, " << r.scenario.config.horizon_slots << " slots\n";
    for (size_t j = 0; j < r.stations.size(); ++j) os << "  aggregator " << j << " = " << r.stations[j] << '\n';
    emit(g, os.str(), out);
  } else {
    emit(g, scenario_to_json(r.scenario), out);
  }
  return kOk;
}

// ---- run ----------------------------------------------------------------------

struct RunArgs {
  std::string scenario;
  std::string metrics;
  bool no_timing = false;
};

int cmd_run(const RunArgs& a, const Globals& g, std::ostream& out) {
  const Scenario sc = load_scenario(a.scenario);
  RunFlags flags;
  flags.mobility = mobility_flag(g);
  const RunResult r = run(sc, g.scheduler, flags);
  if (!a.metrics.empty()) write_text_file(a.metrics, metrics_csv(r));
  emit(g, g.format == "table" ? result_table(r) : result_to_json(r, !a.no_timing), out);
  return kOk;
}

// ---- validate -----------------------------------------------------------------

struct ValidateArgs {
  std::string scenario;
  std::string schedule;
};

int cmd_validate(const ValidateArgs& a, const Globals& g, std::ostream& out) {
  const Scenario sc = load_scenario(a.scenario);
  const Schedule schedule = schedule_from_json(read_text_file(a.schedule));
  FeasibilityReport report;
  try {
    report = validate_schedule(schedule, sc.config, sc.devices);
  } catch (const MalformedSchedule& e) {
    throw Exit{kValidation, std::string("malformed schedule: ") + e.what()};
  }
  if (g.format == "table") {
    emit(g, report.summary() + (report.feasible() ? "feasible\n" : "INFEASIBLE\n"), out);
  } else {
    emit(g, report_json(report).dump(2) + "\n", out);
  }
  return report.feasible() ? kOk : kValidation;
}

// ---- solve-exact --------------------------------------------------------------

struct ExactArgs {
  std::string scenario;
  std::uint64_t node_budget = ExactLimits{}.node_budget;
};

int cmd_solve_exact(const ExactArgs& a, const Globals& g, std::ostream& out) {
  const Scenario sc = load_scenario(a.scenario);
  RunFlags flags;
  flags.exact_limits.node_budget = a.node_budget;
  const RunResult r = run(sc, "exact", flags);
  emit(g, g.format == "table" ? result_table(r) : result_to_json(r, false), out);
  return kOk;
}

// ---- experiments --------------------------------------------------------------

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct DeltaArgs {
  std::string devices = "20,40,60,80,100";
  std::string fractions = "0.5";
  int samples = 50;
};

int cmd_mobility_delta(const DeltaArgs& a, const Globals& g, std::ostream& out) {
  MobilityDeltaSpec spec;
  spec.device_counts = parse_int_list(a.devices);
  spec.mobile_fractions = parse_double_list(a.fractions);
  spec.samples = a.samples;
  spec.seed = g.seed;
  spec.scheduler = g.scheduler;
  const ExperimentSummary s = mobility_delta_experiment(spec);
  if (g.format == "table") {
    std::ostringstream os;
    os << "devices  mobile  samples  failed            mean          median        variance\n";
    for (const DeltaGroup& grp : s.groups) {
      os << std::setw(7) << grp.num_devices << "  " << std::setw(6) << fixed(grp.mobile_fraction, 2)
         << "  " << std::setw(7) << grp.stats.count << "  " << std::setw(6) << grp.failures << "  "
         << std::setw(14) << std::setprecision(6) << grp.stats.mean << "  " << std::setw(14)
         << grp.stats.median << "  " << std::setw(14) << grp.stats.variance << '\n';
    }
    for (const std::string& f : s.failures) os << "failed: " << f << '\n';
    emit(g, os.str(), out);
  } else {
    json groups = json::array();
    for (const DeltaGroup& grp : s.groups) {
      groups.push_back(json{{"num_devices", grp.num_devices},
                            {"mobile_fraction", grp.mobile_fraction},
                            {"failures", grp.failures},
                            {"stats", stats_json(grp.stats)},
                            {"deltas", grp.deltas}});
    }
    emit(g, json{{"experiment", "mobility-delta"}, {"seed", g.seed}, {"groups", groups},
                 {"failures", s.failures}}.dump(2) + "\n", out);
  }
  return s.failures.empty() ? kOk : kValidation;
}

struct CompareArgs {
  std::string sessions;
  std::vector<std::string> scenarios;
  int seeds = 10;
  double budget = 50.0;
  double mobile = 1.0;
};

int cmd_baseline_compare(const CompareArgs& a, const Globals& g, std::ostream& out,
                         std::ostream& err) {
  std::vector<Scenario> scenarios;
  std::ostream quiet(nullptr);
  for (const std::string& path : a.scenarios) scenarios.push_back(load_scenario(path));
  if (!a.sessions.empty()) {
    for (int s = 0; s < a.seeds; ++s) {
      IngestOptions o;
      o.budget_kw = a.budget;
      o.mobile_fraction = a.mobile;
      o.seed = g.seed + static_cast<std::uint64_t>(s);
      o.scenario_id = "sessions-seed" + std::to_string(o.seed);
      scenarios.push_back(ingest_file(a.sessions, o, s == 0 ? err : quiet).scenario);
    }
  }
  if (scenarios.empty()) throw CLI::ValidationError("baseline-compare", "needs --sessions or --scenario");
  const BaselineComparison c = baseline_compare(scenarios);
  if (g.format == "table") {
    std::ostringstream os;
    os << std::left << std::setw(24) << "scenario" << std::right << std::setw(16) << "heuristic"
       << std::setw(16) << "edf" << std::setw(16) << "hp" << std::setw(18) << "vs edf"
       << std::setw(18) << "vs hp" << '\n';
    for (const ComparisonRow& r : c.rows) {
      os << std::left << std::setw(24) << r.scenario_id << std::right << std::setw(16)
         << fixed(r.heuristic_loss, 2) << std::setw(16) << fixed(r.edf_loss, 2) << std::setw(16)
         << fixed(r.hp_loss, 2) << std::setw(18) << r.vs_edf.text << std::setw(18) << r.vs_hp.text
         << '\n';
    }
    os << "median improvement: " << format_percent(c.median_vs_edf) << " vs edf, "
       << format_percent(c.median_vs_hp) << " vs hp\n";
    emit(g, os.str(), out);
  } else {
    json rows = json::array();
    for (const ComparisonRow& r : c.rows) {
      rows.push_back(json{{"scenario_id", r.scenario_id},
                          {"heuristic_loss", r.heuristic_loss},
                          {"edf_loss", r.edf_loss},
                          {"hp_loss", r.hp_loss},
                          {"improvement", json::array({improvement_json(r.vs_edf),
                                                       improvement_json(r.vs_hp)})}});
    }
    emit(g, json{{"experiment", "baseline-compare"},
                 {"rows", rows},
                 {"median_improvement_vs_edf", c.median_vs_edf},
                 {"median_improvement_vs_hp", c.median_vs_hp}}.dump(2) + "\n",
         out);
  }
  return kOk;
}

struct GapArgs {
  int instances = 100;
};

int cmd_oracle_gap(const GapArgs& a, const Globals& g, std::ostream& out) {
  std::vector<Scenario> micro;
  for (int i = 0; i < a.instances; ++i) {
    MicroSpec m;
    m.seed = derive_seed(g.seed, static_cast<std::uint64_t>(i));
    micro.push_back(generate_micro(m));
  }
  const OracleGap gap = oracle_gap(micro);
  if (g.format == "table") {
    std::ostringstream os;
    os << std::left << std::setw(28) << "instance" << std::right << std::setw(14) << "exact"
       << std::setw(14) << "heuristic" << std::setw(14) << "edf" << std::setw(14) << "hp" << '\n';
    for (const OracleGapRow& r : gap.rows) {
      os << std::left << std::setw(28) << r.instance << std::right << std::setw(14)
         << fixed(r.exact_loss) << std::setw(14) << fixed(r.heuristic_loss) << std::setw(14)
         << fixed(r.edf_loss) << std::setw(14) << fixed(r.hp_loss) << '\n';
    }
    os << "heuristic/exact ratio: median " << gap.heuristic_gap.median_ratio << ", max "
       << gap.heuristic_gap.max_ratio << '\n';
    emit(g, os.str(), out);
  } else {
    json rows = json::array();
    for (const OracleGapRow& r : gap.rows) {
      rows.push_back(json{{"instance", r.instance},
                          {"exact_loss", r.exact_loss},
                          {"heuristic_loss", r.heuristic_loss},
                          {"edf_loss", r.edf_loss},
                          {"hp_loss", r.hp_loss}});
    }
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    emit(g, json{{"experiment", "oracle-gap"},
                 {"seed", g.seed},
                 {"rows", rows},
                 {"median_ratio", finite_or_null(gap.heuristic_gap.median_ratio)},
                 {"max_ratio", finite_or_null(gap.heuristic_gap.max_ratio)}}.dump(2) + "\n",
         out);
  }
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-aggregator demand-side scheduling simulator", "gridflex"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--mobility", g.mobility, "Override device mobility")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--scheduler", g.scheduler, "heuristic, edf or hp")
      ->check(CLI::IsMember({"heuristic", "edf", "hp"}));
  app.add_option("--out", g.out, "Output path (stdout when omitted)");
  app.add_option("--format", g.format, "json or table")->check(CLI::IsMember({"json", "table"}));

  std::function<int()> action;

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Synthetic scenario")->fallthrough();
  generate_cmd->add_option("--devices", gen.devices, "Total devices")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--classes", gen.classes, "Load class per aggregator, e.g. LLMMH");
  generate_cmd->add_option("--mobile", gen.mobile, "Mobile fraction")->check(CLI::Range(0.0, 1.0));
  generate_cmd->add_option("--capacity", gen.capacity, "Aggregator capacity over the horizon (kWh)");
  generate_cmd->add_option("--horizon", gen.horizon, "Slots")->check(CLI::PositiveNumber);
  generate_cmd->callback([&] { action = [&] { return cmd_generate(gen, g, out); }; });

  IngestArgs ing;
  auto* ingest_cmd = app.add_subcommand("ingest", "Charging sessions to scenario")->fallthrough();
  ingest_cmd->add_option("--sessions", ing.sessions, "Session CSV")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--budget", ing.budget, "Per-aggregator budget (kW)")->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--mobile", ing.mobile, "Mobile fraction")->check(CLI::Range(0.0, 1.0));
  ingest_cmd->add_option("--id", ing.id, "Scenario id");
  ingest_cmd->callback([&] { action = [&] { return cmd_ingest(ing, g, out, err); }; });

  RunArgs rn;
  auto* run_cmd = app.add_subcommand("run", "Run one scheduler over a scenario")->fallthrough();
  run_cmd->add_option("--scenario", rn.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--metrics", rn.metrics, "Per-slot metrics CSV path");
  run_cmd->add_flag("--no-timing", rn.no_timing, "Leave wall-time fields out of the result");
  run_cmd->callback([&] { action = [&] { return cmd_run(rn, g, out); }; });

  auto* exp_cmd = app.add_subcommand("experiment", "Experiment suites")->fallthrough();
  exp_cmd->require_subcommand(1);
  DeltaArgs delta;
  auto* delta_cmd = exp_cmd->add_subcommand("mobility-delta", "Loss with minus without mobility")->fallthrough();
  delta_cmd->add_option("--devices", delta.devices, "Comma-separated device counts");
  delta_cmd->add_option("--fractions", delta.fractions, "Comma-separated mobile fractions");
  delta_cmd->add_option("--samples", delta.samples, "Samples per group")->check(CLI::PositiveNumber);
  delta_cmd->callback([&] { action = [&] { return cmd_mobility_delta(delta, g, out); }; });

  CompareArgs cmp;
  auto* cmp_cmd = exp_cmd->add_subcommand("baseline-compare", "Heuristic against EDF and HP")->fallthrough();
  cmp_cmd->add_option("--sessions", cmp.sessions, "Session CSV, ingested once per seed")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--scenario", cmp.scenarios, "Scenario JSON (repeatable)")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--seeds", cmp.seeds, "Seeds for session ingestion")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--budget", cmp.budget, "Per-aggregator budget (kW)")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--mobile", cmp.mobile, "Mobile fraction")->check(CLI::Range(0.0, 1.0));
  cmp_cmd->callback([&] { action = [&] { return cmd_baseline_compare(cmp, g, out, err); }; });

  GapArgs gap;
  auto* gap_cmd = exp_cmd->add_subcommand("oracle-gap", "Exact solver against the online schedulers")->fallthrough();
  gap_cmd->add_option("--instances", gap.instances, "Micro-instances")->check(CLI::PositiveNumber);
  gap_cmd->callback([&] { action = [&] { return cmd_oracle_gap(gap, g, out); }; });

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand("validate", "Check a schedule or run result")->fallthrough();
  validate_cmd->add_option("--scenario", val.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--schedule", val.schedule, "Schedule or result JSON")->required()->check(CLI::ExistingFile);
  validate_cmd->callback([&] { action = [&] { return cmd_validate(val, g, out); }; });

  ExactArgs ex;
  auto* exact_cmd = app.add_subcommand("solve-exact", "Optimal schedule for a small instance")->fallthrough();
  exact_cmd->add_option("--scenario", ex.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  exact_cmd->add_option("--node-budget", ex.node_budget, "Search node cap");
  exact_cmd->callback([&] { action = [&] { return cmd_solve_exact(ex, g, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const ExactRefusal& e) {
    err << "error: " << e.what() << '\n';
    return kOracleCap;
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace gridflex::cli

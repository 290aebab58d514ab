#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridflex/engine.hpp"
#include "gridflex/workload.hpp"

namespace gridflex {

struct Stats {
  size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance, 0 for fewer than two values
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

/// Linear-interpolation quantiles (type 7).
Stats summarize(std::vector<double> values);

struct DeltaGroup {
  int num_devices = 0;
  double mobile_fraction = 0.0;
  std::vector<double> deltas;  // loss with mobility - loss without, per sample
  Stats stats;
  int failures = 0;
};

struct ExperimentSummary {
  std::vector<DeltaGroup> groups;
  std::vector<std::string> failures;  // one line per failed sample
};

struct MobilityDeltaSpec {
  std::vector<int> device_counts = {20, 40, 60, 80, 100};
  std::vector<double> mobile_fractions = {0.5};
  std::vector<std::vector<LoadClass>> class_sets = standard_class_combinations();
  int samples = 50;  // per (device count, mobile fraction), cycling over class_sets
  std::string scheduler = "heuristic";
  GenSpec base;      // everything but devices, classes, fraction and seed
  std::uint64_t seed = 0;
  int threads = 0;
};

/// Runs every sample with mobility on and off and groups the loss deltas.
/// Failed samples are counted and listed, never dropped silently.
ExperimentSummary mobility_delta_experiment(const MobilityDeltaSpec& spec);

struct Improvement {
  std::string baseline;
  double baseline_loss = 0.0;
  double heuristic_loss = 0.0;
  std::optional<double> percent;  // empty when the baseline loss is zero
  std::string text;               // "59.21%", "n/a (both zero)" or "n/a"
};

/// (baseline - heuristic) / baseline * 100.
std::optional<double> improvement_percent(double baseline_loss, double heuristic_loss);

/// Two decimals, truncated toward zero.
std::string format_percent(double percent);

Improvement improvement(const std::string& baseline, double baseline_loss, double heuristic_loss);

/// Rows for every non-heuristic result against the heuristic one. All
/// results must come from the same scenario.
std::vector<Improvement> improvement_report(const RunResult& heuristic,
                                            std::span<const RunResult> baselines);

struct ComparisonRow {
  std::string scenario_id;
  double heuristic_loss = 0.0;
  double edf_loss = 0.0;
  double hp_loss = 0.0;
  Improvement vs_edf;
  Improvement vs_hp;
};

struct BaselineComparison {
  std::vector<ComparisonRow> rows;
  double median_vs_edf = 0.0;  // over rows with a defined percentage
  double median_vs_hp = 0.0;
};

/// Heuristic, EDF and HP on each scenario (scheduler defaults for mobility).
BaselineComparison baseline_compare(std::span<const Scenario> scenarios, int threads = 0);

/// Exact solver against heuristic, EDF and HP on micro-instances.
struct OracleGapRow {
  std::string instance;
  double exact_loss = 0.0;
  double heuristic_loss = 0.0;
  double edf_loss = 0.0;
  double hp_loss = 0.0;
};

struct OracleGap {
  std::vector<OracleGapRow> rows;
  GapReport heuristic_gap;
};

OracleGap oracle_gap(std::span<const Scenario> instances, const ExactLimits& limits = {},
                     int threads = 0);

}  // namespace gridflex

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridflex/exact.hpp"
#include "gridflex/heuristic.hpp"
#include "gridflex/model.hpp"

namespace gridflex {

inline constexpr std::string_view kResultSchema = "gridflex.result/1";

/// Unknown scheduler id or malformed scenario handed to the engine.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scheduler produced a decision matrix that fails validate_schedule().
class ValidationFailure : public std::runtime_error {
 public:
  ValidationFailure(const std::string& what, FeasibilityReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

/// Known ids: "heuristic", "edf", "hp", "exact".
std::vector<std::string> scheduler_names();

/// Throws UsageError for unknown ids. "exact" has no online options.
SchedulerOptions scheduler_options(std::string_view id);

struct RunFlags {
  std::optional<bool> mobility;  // default: on for the heuristic, off for baselines
  UpgradePolicy upgrade = UpgradePolicy::RoundRobin;
  ExactLimits exact_limits;
};

struct DeviceLedger {
  DeviceId device = 0;
  LossBreakdown loss;
  double progress_kwh = 0.0;
  double extra_demand_kwh = 0.0;
  bool complete = false;
};

struct RunResult {
  std::string scenario_id;
  std::string scheduler;
  bool mobility = false;
  std::vector<DeviceLedger> devices;  // input order
  double total_loss = 0.0;
  std::vector<std::vector<double>> utilization;  // [slot][aggregator], committed / budget
  std::vector<double> slot_seconds;
  Schedule decisions;
};

/// Validates the scenario, runs the scheduler over the horizon and gates the
/// decision matrix through validate_schedule(). Throws UsageError,
/// ValidationFailure, or ExactRefusal (scheduler "exact" over its caps).
RunResult run(const Scenario& scenario, std::string_view scheduler, const RunFlags& flags = {});

/// Re-simulates a decision matrix from the initial states.
double replay_total_loss(const Scenario& scenario, const Schedule& schedule);

/// Structured result document. Timing fields are left out when
/// `include_timing` is false so documents can be compared byte for byte.
std::string result_to_json(const RunResult& result, bool include_timing = true, int indent = 2);
RunResult result_from_json(std::string_view text);

/// One row per slot: slot, util_<j>..., seconds.
std::string metrics_csv(const RunResult& result);

/// Plain-text rendering of a result document.
std::string result_table(const RunResult& result);

struct BatchJob {
  const Scenario* scenario = nullptr;
  std::string scheduler;
  RunFlags flags;
};

/// GRIDFLEX_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Runs independent jobs on a worker pool. Results come back in job order;
/// the first exception raised by any job is rethrown after all workers stop.
std::vector<RunResult> run_batch(std::span<const BatchJob> jobs, int threads = 0);

}  // namespace gridflex

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex {

/// How residual budget is handed out after every served device got its
/// lowest mode.
enum class UpgradePolicy {
  RoundRobin,  // one mode step per device per pass, repeated until nothing fits
  Jump,        // each device in order jumps to the highest mode that fits
};

struct AggregatorState {
  AggregatorId id = 0;
  double budget_kw = 0.0;
  double committed_kw = 0.0;
  std::vector<DeviceId> members;

  double residual_kw() const { return budget_kw - committed_kw; }
};

struct StatusEntry {
  AggregatorId aggregator = 0;
  double residual_kw = 0.0;
  double committed_kw = 0.0;
  int cluster_size = 0;
};

/// Snapshot of every aggregator after the slot's scheduling, indexed by id.
using StatusList = std::vector<StatusEntry>;

/// Result of scheduling one cluster for one slot.
struct ClusterPlan {
  /// One decision per servable device, in service order (Serve or Idle).
  std::vector<SlotDecision> decisions;
  /// Remaining demand (kWh) ranked ahead of each device, parallel to decisions.
  std::vector<double> backlog_ahead_kwh;
  double committed_kw = 0.0;
};

/// Orders the servable devices of one cluster; returns indices into `cluster`.
using ClusterRanking =
    std::function<std::vector<size_t>(std::span<const DeviceState* const> cluster, SlotIndex t)>;

/// Two-pass service in the given order: every device gets its lowest mode
/// while the budget lasts, then served devices are upgraded in the same
/// order. Upgrades never pass the mode that completes the device this slot.
ClusterPlan serve_in_order(const AggregatorState& aggregator,
                           std::span<const DeviceState* const> ordered, SlotIndex t,
                           const SystemConfig& config,
                           UpgradePolicy upgrade = UpgradePolicy::RoundRobin);

/// Descending priority order (see priority.hpp) of the devices that still
/// need energy.
std::vector<size_t> priority_order(std::span<const DeviceState* const> cluster, SlotIndex t);

/// One aggregator's slot: rank by priority, then serve_in_order().
ClusterPlan schedule_slot(const AggregatorState& aggregator,
                          std::span<const DeviceState* const> cluster, SlotIndex t,
                          const SystemConfig& config,
                          UpgradePolicy upgrade = UpgradePolicy::RoundRobin);

StatusList publish_status(std::span<const AggregatorState> aggregators);

/// Device-side choice for a mobile device left unserved this slot.
///
/// Staying is projected from the backlog ranked ahead of the device at home;
/// moving assumes immediate service at the target at the highest mode its
/// published residual fits. Both projections price the deadline loss at the
/// projected completion slot, and moving adds the doubled trip cost. Returns
/// the cheapest affordable move when it beats staying.
std::optional<Move> mobility_decision(const DeviceState& device, double backlog_ahead_kwh,
                                      const StatusList& status, const SystemConfig& config,
                                      SlotIndex t);

struct SchedulerOptions {
  std::string name = "heuristic";
  ClusterRanking ranking;
  bool mobility = true;
  UpgradePolicy upgrade = UpgradePolicy::RoundRobin;
};

SchedulerOptions heuristic_options();

struct HorizonResult {
  Schedule schedule;
  std::vector<DeviceState> devices;              // final states, input order
  std::vector<std::vector<double>> committed_kw;  // [slot][aggregator]
  std::vector<double> slot_seconds;
};

/// Runs the online scheduler over slots 0..tau-1. Decisions at slot t only
/// read state produced by slots < t and requests with arrival <= t.
HorizonResult run_horizon(const SystemConfig& config, std::span<const DeviceRequest> devices,
                          const SchedulerOptions& options);

}  // namespace gridflex

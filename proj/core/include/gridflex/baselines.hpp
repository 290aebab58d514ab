#pragma once

#include "gridflex/heuristic.hpp"

namespace gridflex {

// Reference schedulers. They reuse serve_in_order() so that only the
// ranking differs from the priority heuristic.

/// Ascending deadline, ties by device id.
std::vector<size_t> edf_order(std::span<const DeviceState* const> cluster, SlotIndex t);

/// Descending remaining demand, ties by device id.
std::vector<size_t> hp_order(std::span<const DeviceState* const> cluster, SlotIndex t);

ClusterPlan edf_schedule_slot(const AggregatorState& aggregator,
                              std::span<const DeviceState* const> cluster, SlotIndex t,
                              const SystemConfig& config);

ClusterPlan hp_schedule_slot(const AggregatorState& aggregator,
                             std::span<const DeviceState* const> cluster, SlotIndex t,
                             const SystemConfig& config);

/// Baselines default to mobility disabled.
SchedulerOptions edf_options();
SchedulerOptions hp_options();

SchedulerOptions set_mobility_enabled(SchedulerOptions options, bool enabled);

}  // namespace gridflex

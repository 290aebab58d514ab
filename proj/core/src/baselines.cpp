#include "gridflex/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace gridflex {

namespace {

template <typename Less>
std::vector<size_t> order_by(std::span<const DeviceState* const> cluster, Less less) {
  std::vector<size_t> order;
  order.reserve(cluster.size());
  for (size_t i = 0; i < cluster.size(); ++i) {
    if (!cluster[i]->complete()) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return less(*cluster[a], *cluster[b]);
  });
  return order;
}

std::vector<const DeviceState*> reorder(std::span<const DeviceState* const> cluster,
                                        const std::vector<size_t>& order) {
  std::vector<const DeviceState*> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(cluster[i]);
  return out;
}

}  // namespace

std::vector<size_t> edf_order(std::span<const DeviceState* const> cluster, SlotIndex) {
  return order_by(cluster, [](const DeviceState& a, const DeviceState& b) {
    if (a.request.deadline_slot != b.request.deadline_slot) {
      return a.request.deadline_slot < b.request.deadline_slot;
    }
    return a.request.id < b.request.id;
  });
}

std::vector<size_t> hp_order(std::span<const DeviceState* const> cluster, SlotIndex) {
  return order_by(cluster, [](const DeviceState& a, const DeviceState& b) {
    const double ra = a.remaining_kwh();
    const double rb = b.remaining_kwh();
    if (ra != rb) return ra > rb;
    return a.request.id < b.request.id;
  });
}

ClusterPlan edf_schedule_slot(const AggregatorState& aggregator,
                              std::span<const DeviceState* const> cluster, SlotIndex t,
                              const SystemConfig& config) {
  return serve_in_order(aggregator, reorder(cluster, edf_order(cluster, t)), t, config);
}

ClusterPlan hp_schedule_slot(const AggregatorState& aggregator,
                             std::span<const DeviceState* const> cluster, SlotIndex t,
                             const SystemConfig& config) {
  return serve_in_order(aggregator, reorder(cluster, hp_order(cluster, t)), t, config);
}

SchedulerOptions edf_options() {
  SchedulerOptions opts;
  opts.name = "edf";
  opts.ranking = edf_order;
  opts.mobility = false;
  return opts;
}

SchedulerOptions hp_options() {
  SchedulerOptions opts;
  opts.name = "hp";
  opts.ranking = hp_order;
  opts.mobility = false;
  return opts;
}

SchedulerOptions set_mobility_enabled(SchedulerOptions options, bool enabled) {
  options.mobility = enabled;
  return options;
}

}  // namespace gridflex

#pragma once

#include <span>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex {

struct PriorityEntry {
  DeviceId device = 0;
  double priority = 0.0;
  double criticality = 1.0;
  double min_mode_kw = 0.0;
};

/// Urgency of a device with remaining demand:
///   late (t > deadline):    ratio * (t - deadline)
///   early (t < deadline):   ratio / (deadline - t)
///   at the deadline:        ratio
/// where ratio = (demand - progress) / demand. Slots are integers, so the
/// early branch never divides by less than one.
double priority(double progress_kwh, double demand_kwh, SlotIndex t, SlotIndex deadline);

/// Descending priority; ties go to higher criticality, then the smaller
/// lowest mode, then the smaller device id.
std::vector<PriorityEntry> rank(std::vector<PriorityEntry> entries);

/// Strict weak order used by rank().
bool ranks_before(const PriorityEntry& a, const PriorityEntry& b);

}  // namespace gridflex

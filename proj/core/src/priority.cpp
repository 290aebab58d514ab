#include "gridflex/priority.hpp"

#include <algorithm>

namespace gridflex {

double priority(double progress_kwh, double demand_kwh, SlotIndex t, SlotIndex deadline) {
  const double ratio = (demand_kwh - progress_kwh) / demand_kwh;
  if (t > deadline) return ratio * static_cast<double>(t - deadline);
  if (t < deadline) return ratio / static_cast<double>(deadline - t);
  return ratio;
}

bool ranks_before(const PriorityEntry& a, const PriorityEntry& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.criticality != b.criticality) return a.criticality > b.criticality;
  if (a.min_mode_kw != b.min_mode_kw) return a.min_mode_kw < b.min_mode_kw;
  return a.device < b.device;
}

std::vector<PriorityEntry> rank(std::vector<PriorityEntry> entries) {
  std::sort(entries.begin(), entries.end(), ranks_before);
  return entries;
}

}  // namespace gridflex

#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex::test {

inline SystemConfig make_config(std::vector<double> budgets, int horizon, double slot_h = 0.5,
                                double move_cost = 0.15, int max_delay = 4) {
  SystemConfig c;
  const int J = static_cast<int>(budgets.size());
  c.budgets_kw = std::move(budgets);
  c.horizon_slots = horizon;
  c.slot_length_h = slot_h;
  c.movement = MovementMatrix::linear(J, move_cost, max_delay);
  return c;
}

struct DeviceSpec {
  DeviceId id = 0;
  SlotIndex arrival = 0;
  SlotIndex deadline = 1;
  double demand = 1.0;
  std::vector<double> modes = {1.0};
  double kappa = 1.6;
  bool mobile = false;
  double initial = 0.0;
  AggregatorId home = 0;
};

inline DeviceRequest make_device(const DeviceSpec& s) {
  DeviceRequest d;
  d.id = s.id;
  d.arrival_slot = s.arrival;
  d.deadline_slot = s.deadline;
  d.demand_kwh = s.demand;
  d.modes = PowerModeSet(s.modes);
  d.criticality = s.kappa;
  d.mobile = s.mobile;
  d.initial_energy_kwh = s.initial;
  d.home = s.home;
  return d;
}

inline Scenario make_scenario(std::string id, SystemConfig config,
                              std::vector<DeviceRequest> devices) {
  return Scenario{std::move(id), std::move(config), std::move(devices)};
}

/// Every device idle in every slot.
inline Schedule idle_schedule(const SystemConfig& config, const std::vector<DeviceRequest>& devices) {
  Schedule s;
  for (SlotIndex t = 0; t < config.horizon_slots; ++t) {
    SlotSchedule slot{t, {}};
    for (const DeviceRequest& d : devices) slot.decisions.push_back(SlotDecision{d.id, t, Idle{}});
    s.push_back(std::move(slot));
  }
  return s;
}

inline void set_action(Schedule& s, DeviceId device, SlotIndex t, Action a) {
  for (SlotDecision& d : s[static_cast<size_t>(t)].decisions) {
    if (d.device == device) d.action = a;
  }
}

}  // namespace gridflex::test

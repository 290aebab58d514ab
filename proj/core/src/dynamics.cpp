#include "gridflex/dynamics.hpp"

#include <algorithm>

#include "gridflex/utility.hpp"

namespace gridflex {

LossBreakdown advance(DeviceState& state, const Action& action, SlotIndex t,
                      const SystemConfig& config) {
  const LossBreakdown loss = slot_loss(state, action, t, config);

  if (const auto* serve = std::get_if<Serve>(&action)) {
    const double remaining = state.remaining_kwh();
    const double delivered =
        delivered_energy(remaining, state.request.modes.level(serve->mode), config.slot_length_h);
    if (delivered == remaining) {
      state.progress_kwh = state.requirement_kwh();
    } else {
      state.progress_kwh += delivered;
    }
  } else if (const auto* mv = std::get_if<Move>(&action)) {
    if (!state.in_transit()) {
      const MovementOption& opt = config.movement.at(mv->from, mv->to);
      state.extra_demand_kwh += movement_total_cost(config.movement, mv->from, mv->to);
      state.location = InTransit{mv->from, mv->to, opt.delay_slots};
    }
    auto& transit = std::get<InTransit>(state.location);
    if (--transit.slots_remaining <= 0) state.location = AtCluster{transit.to};
  }

  state.loss += loss;
  return loss;
}

std::vector<DeviceState> initial_states(std::span<const DeviceRequest> devices) {
  std::vector<DeviceState> states;
  states.reserve(devices.size());
  for (const DeviceRequest& d : devices) states.emplace_back(d);
  return states;
}

double total_loss(std::span<const DeviceState> devices) {
  std::vector<const DeviceState*> by_id;
  by_id.reserve(devices.size());
  for (const DeviceState& d : devices) by_id.push_back(&d);
  std::sort(by_id.begin(), by_id.end(), [](const DeviceState* a, const DeviceState* b) {
    return a->request.id < b->request.id;
  });
  double sum = 0.0;
  for (const DeviceState* d : by_id) sum += d->loss.total;
  return sum;
}

}  // namespace gridflex

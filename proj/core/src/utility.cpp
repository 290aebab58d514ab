#include "gridflex/utility.hpp"

#include <algorithm>
#include <cmath>

namespace gridflex {

double accumulated_utility(std::span<const SlotDecision> history, const PowerModeSet& modes,
                           double slot_length_h, SlotIndex up_to) {
  double sum = 0.0;
  for (const SlotDecision& d : history) {
    if (d.slot > up_to) continue;
    if (const auto* serve = std::get_if<Serve>(&d.action)) {
      sum += modes.level(serve->mode) * slot_length_h;
    }
  }
  return sum;
}

double delivered_energy(double remaining_kwh, double level_kw, double slot_length_h) {
  if (remaining_kwh <= kEnergyEps) return 0.0;
  const double slot_energy = level_kw * slot_length_h;
  return slot_energy + kEnergyEps >= remaining_kwh ? remaining_kwh : slot_energy;
}

double deadline_loss(double progress_kwh, double demand_kwh, SlotIndex t, SlotIndex deadline,
                     double criticality, double beta_max) {
  if (t <= deadline) return 0.0;
  const double deficit = demand_kwh - progress_kwh;
  if (deficit <= kEnergyEps) return 0.0;
  const double exponent = criticality * static_cast<double>(t - deadline);
  // Saturate before exp() can overflow.
  if (exponent >= std::log(beta_max / deficit)) return beta_max;
  return std::min(beta_max, deficit * std::exp(exponent));
}

double mobility_loss(const MovementMatrix& movement, const Action& action) {
  if (const auto* mv = std::get_if<Move>(&action)) {
    return movement.at(mv->from, mv->to).cost_kwh_per_slot;
  }
  return 0.0;
}

double stationary_penalty(bool mobile, AggregatorId from, AggregatorId to, double beta_max) {
  if (mobile || from == to) return 0.0;
  return beta_max;
}

LossBreakdown slot_loss(const DeviceState& state, const Action& action, SlotIndex t,
                        const SystemConfig& config) {
  LossBreakdown out;
  if (!state.arrived(t)) return out;

  double progress = state.progress_kwh;
  double requirement = state.requirement_kwh();

  if (const auto* serve = std::get_if<Serve>(&action)) {
    progress += delivered_energy(requirement - progress, state.request.modes.level(serve->mode),
                                 config.slot_length_h);
  } else if (const auto* mv = std::get_if<Move>(&action)) {
    out.mobility = mobility_loss(config.movement, action);
    if (!state.in_transit()) {
      // Departure slot: the whole trip is re-supplied by the grid.
      requirement += movement_total_cost(config.movement, mv->from, mv->to);
      out.stationary =
          stationary_penalty(state.request.mobile, mv->from, mv->to, config.beta_max);
    }
  }

  out.deadline = deadline_loss(progress, requirement, t, state.request.deadline_slot,
                               state.request.criticality, config.beta_max);
  out.total = out.deadline + 2.0 * out.mobility + out.stationary;
  return out;
}

}  // namespace gridflex

#pragma once

#include <span>

#include "gridflex/model.hpp"

namespace gridflex {

/// Energy delivered by the Serve decisions in `history` up to and including
/// slot `up_to`: sum of mode power times slot length. Idle and Move add 0.
double accumulated_utility(std::span<const SlotDecision> history, const PowerModeSet& modes,
                           double slot_length_h, SlotIndex up_to);

/// Energy a slot at `level_kw` actually delivers against `remaining_kwh`.
/// A slot whose energy covers the remainder completes the device exactly.
double delivered_energy(double remaining_kwh, double level_kw, double slot_length_h);

/// Loss for being past the deadline with an unmet remainder:
/// (demand - progress) * exp(kappa * (t - deadline)) when t > deadline and
/// progress < demand, else 0. Clamped to beta_max.
double deadline_loss(double progress_kwh, double demand_kwh, SlotIndex t, SlotIndex deadline,
                     double criticality, double beta_max = kDefaultBetaMax);

/// Per-slot movement cost of the edge when `action` is a Move, else 0.
double mobility_loss(const MovementMatrix& movement, const Action& action);

/// beta_max when a stationary device changes cluster, else 0.
double stationary_penalty(bool mobile, AggregatorId from, AggregatorId to, double beta_max);

/// Loss of one device for slot t, given its state at the start of the slot
/// and the action it takes in that slot. Deadline loss is evaluated on the
/// progress after the action; mobility loss is weighted twice.
LossBreakdown slot_loss(const DeviceState& state, const Action& action, SlotIndex t,
                        const SystemConfig& config);

}  // namespace gridflex

#pragma once

#include <span>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex {

/// Applies one slot's action to a device and returns the slot's loss.
///
/// This is the single state-transition routine shared by every scheduler,
/// the exact solver and result replay, so all of them score a decision
/// matrix identically. It assumes the action is legal for the state; legality
/// is checked separately by validate_schedule().
///
/// Serve: progress grows by the delivered energy (a covering slot completes
///        the device exactly).
/// Move:  on departure the trip cost delay*c is added to extra_demand and the
///        device enters transit for `delay` slots; it is attached to the target
///        from slot t + delay on.
LossBreakdown advance(DeviceState& state, const Action& action, SlotIndex t,
                      const SystemConfig& config);

/// Device states at slot 0 for a device list.
std::vector<DeviceState> initial_states(std::span<const DeviceRequest> devices);

/// Sum of per-device loss totals in ascending device id. Each device total is
/// itself accumulated slot by slot, so the order is fixed for bit-stable sums.
double total_loss(std::span<const DeviceState> devices);

}  // namespace gridflex

#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gridflex {

using SlotIndex = int;
using AggregatorId = int;
using DeviceId = int;

/// Tolerance used for every energy/power comparison in kWh or kW.
inline constexpr double kEnergyEps = 1e-9;

/// Default penalty constant for moving a stationary device.
inline constexpr double kDefaultBetaMax = 1e9;

/// One directed movement option between two aggregators.
struct MovementOption {
  int delay_slots = 0;
  double cost_kwh_per_slot = 0.0;

  friend bool operator==(const MovementOption&, const MovementOption&) = default;
};

/// Dense J x J table of movement options. The diagonal is always (0, 0).
class MovementMatrix {
 public:
  MovementMatrix() = default;

  /// Every off-diagonal entry starts as `off_diagonal`.
  MovementMatrix(int num_aggregators, MovementOption off_diagonal);

  /// Aggregators on a line: delay = min(|j - k|, max_delay), constant per-slot cost.
  static MovementMatrix linear(int num_aggregators, double cost_kwh_per_slot,
                               int max_delay = 4);

  int size() const { return size_; }

  /// Throws std::out_of_range for unknown ids.
  const MovementOption& at(AggregatorId from, AggregatorId to) const;

  /// Off-diagonal only; throws std::invalid_argument when from == to.
  void set(AggregatorId from, AggregatorId to, MovementOption option);

  friend bool operator==(const MovementMatrix&, const MovementMatrix&) = default;

 private:
  int size_ = 0;
  std::vector<MovementOption> entries_;
};

/// delay * per-slot cost; zero on the diagonal.
double movement_total_cost(const MovementMatrix& movement, AggregatorId from,
                           AggregatorId to);

/// Non-zero power levels of a device in kW. Mode 0 (0 kW) is implicit, so
/// level(0) == 0 and level(i) for i in [1, count()] is the i-th listed level.
class PowerModeSet {
 public:
  PowerModeSet() = default;
  explicit PowerModeSet(std::vector<double> levels_kw) : levels_(std::move(levels_kw)) {}

  int count() const { return static_cast<int>(levels_.size()); }
  bool empty() const { return levels_.empty(); }
  double level(int mode) const { return mode == 0 ? 0.0 : levels_.at(static_cast<size_t>(mode - 1)); }
  double lowest() const { return levels_.front(); }
  double highest() const { return levels_.back(); }
  std::span<const double> levels() const { return levels_; }

  /// Strictly increasing and positive.
  bool well_formed() const;

  /// Smallest mode whose one-slot energy covers `remaining_kwh`, or count()
  /// when none does. Serving above this mode only overshoots the demand.
  int completing_mode(double remaining_kwh, double slot_length_h) const;

  friend bool operator==(const PowerModeSet&, const PowerModeSet&) = default;

 private:
  std::vector<double> levels_;
};

struct SystemConfig {
  std::vector<double> budgets_kw;
  int horizon_slots = 0;
  double slot_length_h = 0.5;
  double beta_max = kDefaultBetaMax;
  MovementMatrix movement;

  int num_aggregators() const { return static_cast<int>(budgets_kw.size()); }
};

struct DeviceRequest {
  DeviceId id = 0;
  SlotIndex arrival_slot = 0;
  SlotIndex deadline_slot = 0;
  bool mobile = false;
  double initial_energy_kwh = 0.0;
  double demand_kwh = 0.0;
  double criticality = 1.0;
  PowerModeSet modes;
  AggregatorId home = 0;

  double total_energy_kwh() const { return initial_energy_kwh + demand_kwh; }
};

struct Scenario {
  std::string id;
  SystemConfig config;
  std::vector<DeviceRequest> devices;
};

struct Violation {
  std::string subject;  // "config" or "device <id>"
  std::string field;
  std::string rule;
};

/// Checks every structural invariant of the configuration and devices.
/// An empty result means the scenario is well formed.
std::vector<Violation> validate_config(const SystemConfig& config,
                                       std::span<const DeviceRequest> devices);

// ---- slot actions -------------------------------------------------------

struct Idle {
  friend bool operator==(const Idle&, const Idle&) = default;
};

struct Serve {
  int mode = 0;  // index into the device's PowerModeSet, >= 1
  AggregatorId aggregator = 0;
  friend bool operator==(const Serve&, const Serve&) = default;
};

struct Move {
  AggregatorId from = 0;
  AggregatorId to = 0;
  friend bool operator==(const Move&, const Move&) = default;
};

using Action = std::variant<Idle, Serve, Move>;

struct SlotDecision {
  DeviceId device = 0;
  SlotIndex slot = 0;
  Action action = Idle{};

  friend bool operator==(const SlotDecision&, const SlotDecision&) = default;
};

struct SlotSchedule {
  SlotIndex slot = 0;
  std::vector<SlotDecision> decisions;

  friend bool operator==(const SlotSchedule&, const SlotSchedule&) = default;
};

/// Full decision matrix, one SlotSchedule per slot of the horizon.
using Schedule = std::vector<SlotSchedule>;

std::string describe(const Action& action);

// ---- runtime state ------------------------------------------------------

struct AtCluster {
  AggregatorId aggregator = 0;
  friend bool operator==(const AtCluster&, const AtCluster&) = default;
};

struct InTransit {
  AggregatorId from = 0;
  AggregatorId to = 0;
  int slots_remaining = 0;
  friend bool operator==(const InTransit&, const InTransit&) = default;
};

using Location = std::variant<AtCluster, InTransit>;

struct LossBreakdown {
  double deadline = 0.0;
  double mobility = 0.0;
  double stationary = 0.0;
  double total = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& other);
  friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

/// Mutable per-device state owned by a simulation run.
struct DeviceState {
  DeviceRequest request;
  double progress_kwh = 0.0;
  Location location = AtCluster{};
  double extra_demand_kwh = 0.0;
  LossBreakdown loss;

  explicit DeviceState(DeviceRequest r)
      : request(std::move(r)), location(AtCluster{request.home}) {}

  bool arrived(SlotIndex t) const { return t >= request.arrival_slot; }
  bool in_transit() const { return std::holds_alternative<InTransit>(location); }

  /// Energy still owed: demand plus movement re-supply minus progress.
  double requirement_kwh() const { return request.demand_kwh + extra_demand_kwh; }
  double remaining_kwh() const { return requirement_kwh() - progress_kwh; }
  bool complete() const { return remaining_kwh() <= kEnergyEps; }

  /// Battery energy that can still pay for a movement.
  double available_energy_kwh() const {
    return request.initial_energy_kwh + progress_kwh - extra_demand_kwh;
  }

  /// Aggregator the device is attached to; the origin while in transit.
  AggregatorId cluster() const;
};

}  // namespace gridflex

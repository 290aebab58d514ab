#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridflex/heuristic.hpp"
#include "gridflex/model.hpp"

namespace gridflex {

// ---- schedule feasibility ---------------------------------------------------

/// The eight feasibility constraints, in order (i)..(viii).
enum class Constraint : int {
  ServeMode = 0,       // (i)   serve a listed mode at the aggregator the device is at
  SingleState,         // (ii)  one action per slot; nothing before arrival; real moves only
  Budget,              // (iii) per-aggregator power <= budget
  Departure,           // (iv)  a move departs from the current cluster and is affordable
  TransitContinuity,   // (v)   every transit slot is a Move on the same edge
  TransitDuration,     // (vi)  a transit lasts the full delay
  NoServiceInTransit,  // (vii) no power service during transit
  EnergyBound,         // (viii) service never overshoots demand + movement energy
};

inline constexpr int kConstraintCount = 8;

std::string_view constraint_label(Constraint c);  // "i" .. "viii"
std::string_view constraint_description(Constraint c);

struct Witness {
  DeviceId device = 0;
  SlotIndex slot = 0;
  std::string detail;
};

struct ConstraintCheck {
  Constraint constraint = Constraint::ServeMode;
  bool passed = true;
  std::optional<Witness> witness;  // first violation found
};

struct FeasibilityReport {
  std::array<ConstraintCheck, kConstraintCount> checks;

  bool feasible() const;
  const ConstraintCheck& operator[](Constraint c) const {
    return checks[static_cast<size_t>(c)];
  }
  std::string summary() const;
};

/// The schedule does not cover every (device, slot) exactly once.
class MalformedSchedule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replays the decision matrix independently of any scheduler and checks
/// constraints (i)..(viii). Throws MalformedSchedule on structural defects.
FeasibilityReport validate_schedule(const Schedule& schedule, const SystemConfig& config,
                                    std::span<const DeviceRequest> devices);

// ---- exact solver ------------------------------------------------------------

struct ExactLimits {
  int max_devices = 6;
  int max_slots = 12;
  int max_modes = 4;
  int max_aggregators = 3;
  std::uint64_t node_budget = 100'000'000;
};

struct ExactInstance {
  std::string id;
  SystemConfig config;
  std::vector<DeviceRequest> devices;
  ExactLimits limits;
};

struct ExactSolution {
  double loss = 0.0;
  Schedule schedule;
  std::vector<DeviceState> devices;  // final states of the optimal schedule
  std::uint64_t nodes = 0;
};

/// Instance outside the guardrails or search exceeded its node budget.
class ExactRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimises the total loss over every feasible decision matrix by
/// depth-first branch and bound on joint per-slot actions. Scores with the
/// same transition/loss code as the online schedulers.
ExactSolution solve_exact(const ExactInstance& instance);

struct GapRow {
  std::string instance;
  double exact_loss = 0.0;
  double heuristic_loss = 0.0;
  double ratio = 1.0;  // heuristic / exact; 1 when both are zero
};

struct GapReport {
  std::vector<GapRow> rows;
  double median_ratio = 1.0;
  double max_ratio = 1.0;
};

GapReport gap_report(std::span<const ExactInstance> instances,
                     const SchedulerOptions& scheduler = heuristic_options());

}  // namespace gridflex

#include <map>
#include <sstream>

#include "gridflex/exact.hpp"

namespace gridflex {

namespace {

constexpr std::array<std::string_view, kConstraintCount> kLabels = {
    "i", "ii", "iii", "iv", "v", "vi", "vii", "viii"};

constexpr std::array<std::string_view, kConstraintCount> kDescriptions = {
    "serve a listed power mode at the aggregator the device is attached to",
    "exactly one state per slot; no action before arrival; moves change cluster",
    "aggregator power within budget",
    "movement departs from the current cluster and is affordable",
    "every transit slot is a Move on the same edge",
    "transit lasts the full movement delay",
    "no power service during transit",
    "served energy bounded by demand plus movement energy",
};

// Validator-local replay state. Deliberately separate from DeviceState and
// advance() so that scheduler bookkeeping is not trusted.
struct Track {
  const DeviceRequest* request = nullptr;
  AggregatorId cluster = 0;
  bool moving = false;
  AggregatorId to = 0;
  int elapsed = 0;
  int delay = 0;
  double progress = 0.0;
  double extra = 0.0;
};

class Checker {
 public:
  FeasibilityReport report;

  Checker() {
    for (int i = 0; i < kConstraintCount; ++i) {
      report.checks[static_cast<size_t>(i)].constraint = static_cast<Constraint>(i);
    }
  }

  void fail(Constraint c, DeviceId device, SlotIndex slot, std::string detail) {
    ConstraintCheck& check = report.checks[static_cast<size_t>(c)];
    check.passed = false;
    if (!check.witness) check.witness = Witness{device, slot, std::move(detail)};
  }
};

std::string fmt_kw(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string_view constraint_label(Constraint c) { return kLabels[static_cast<size_t>(c)]; }

std::string_view constraint_description(Constraint c) {
  return kDescriptions[static_cast<size_t>(c)];
}

bool FeasibilityReport::feasible() const {
  for (const ConstraintCheck& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  for (const ConstraintCheck& c : checks) {
    os << "(" << constraint_label(c.constraint) << ") " << (c.passed ? "pass" : "FAIL");
    if (c.witness) {
      os << "  device " << c.witness->device << " slot " << c.witness->slot << ": "
         << c.witness->detail;
    }
    os << '\n';
  }
  return os.str();
}

FeasibilityReport validate_schedule(const Schedule& schedule, const SystemConfig& config,
                                    std::span<const DeviceRequest> devices) {
  const int J = config.num_aggregators();
  const double T0 = config.slot_length_h;

  if (static_cast<int>(schedule.size()) != config.horizon_slots) {
    throw MalformedSchedule("schedule has " + std::to_string(schedule.size()) +
                            " slots, horizon is " + std::to_string(config.horizon_slots));
  }

  std::map<DeviceId, size_t> index;
  for (size_t k = 0; k < devices.size(); ++k) {
    if (!index.emplace(devices[k].id, k).second) {
      throw MalformedSchedule("duplicate device id " + std::to_string(devices[k].id));
    }
  }

  std::vector<Track> tracks(devices.size());
  for (size_t k = 0; k < devices.size(); ++k) {
    tracks[k].request = &devices[k];
    tracks[k].cluster = devices[k].home;
  }

  Checker chk;
  auto known = [&](AggregatorId a) { return a >= 0 && a < J; };

  for (SlotIndex t = 0; t < config.horizon_slots; ++t) {
    const SlotSchedule& slot = schedule[static_cast<size_t>(t)];
    if (slot.slot != t) {
      throw MalformedSchedule("slot entry " + std::to_string(t) + " is labelled " +
                              std::to_string(slot.slot));
    }
    std::vector<const SlotDecision*> by_device(devices.size(), nullptr);
    for (const SlotDecision& d : slot.decisions) {
      auto it = index.find(d.device);
      if (it == index.end()) {
        throw MalformedSchedule("unknown device " + std::to_string(d.device) + " in slot " +
                                std::to_string(t));
      }
      if (by_device[it->second] != nullptr) {
        throw MalformedSchedule("device " + std::to_string(d.device) +
                                " has two decisions in slot " + std::to_string(t));
      }
      by_device[it->second] = &d;
    }
    for (size_t k = 0; k < devices.size(); ++k) {
      if (by_device[k] == nullptr) {
        throw MalformedSchedule("device " + std::to_string(devices[k].id) +
                                " has no decision in slot " + std::to_string(t));
      }
    }

    std::vector<double> load(static_cast<size_t>(J), 0.0);
    std::vector<DeviceId> first_served(static_cast<size_t>(J), -1);

    for (size_t k = 0; k < devices.size(); ++k) {
      Track& tr = tracks[k];
      const DeviceRequest& req = *tr.request;
      const Action& action = by_device[k]->action;
      const DeviceId id = req.id;

      if (t < req.arrival_slot) {
        if (!std::holds_alternative<Idle>(action)) {
          chk.fail(Constraint::SingleState, id, t, describe(action) + " before arrival");
        }
        continue;
      }

      if (tr.moving) {
        const auto* mv = std::get_if<Move>(&action);
        if (mv == nullptr) {
          const std::string what = describe(action) + " during transit " +
                                   std::to_string(tr.cluster) + " -> " + std::to_string(tr.to);
          chk.fail(Constraint::TransitContinuity, id, t, what);
          chk.fail(Constraint::TransitDuration, id, t,
                   "transit left after " + std::to_string(tr.elapsed) + " of " +
                       std::to_string(tr.delay) + " slots");
          if (std::holds_alternative<Serve>(action)) {
            chk.fail(Constraint::NoServiceInTransit, id, t, what);
          }
        } else if (mv->from != tr.cluster || mv->to != tr.to) {
          chk.fail(Constraint::TransitContinuity, id, t,
                   "edge changed mid-transit to " + describe(action));
        }
        if (++tr.elapsed >= tr.delay) {
          tr.moving = false;
          tr.cluster = tr.to;
        }
        continue;
      }

      if (const auto* serve = std::get_if<Serve>(&action)) {
        if (serve->mode < 1 || serve->mode > req.modes.count()) {
          chk.fail(Constraint::ServeMode, id, t,
                   "mode " + std::to_string(serve->mode) + " not in the device's mode set");
          continue;
        }
        if (serve->aggregator != tr.cluster) {
          chk.fail(Constraint::ServeMode, id, t,
                   "served by aggregator " + std::to_string(serve->aggregator) +
                       " while attached to " + std::to_string(tr.cluster));
        }
        const double level = req.modes.level(serve->mode);
        if (known(serve->aggregator)) {
          const auto j = static_cast<size_t>(serve->aggregator);
          load[j] += level;
          if (first_served[j] < 0) first_served[j] = id;
        }
        const double remaining = req.demand_kwh + tr.extra - tr.progress;
        if (remaining <= kEnergyEps) {
          chk.fail(Constraint::EnergyBound, id, t, "served after demand was met");
          continue;
        }
        if (serve->mode > req.modes.completing_mode(remaining, T0)) {
          chk.fail(Constraint::EnergyBound, id, t,
                   "mode " + std::to_string(serve->mode) + " overshoots remaining " +
                       fmt_kw(remaining) + " kWh");
        }
        const double slot_energy = level * T0;
        tr.progress += slot_energy + kEnergyEps >= remaining ? remaining : slot_energy;
        continue;
      }

      if (const auto* mv = std::get_if<Move>(&action)) {
        if (!known(mv->from) || !known(mv->to)) {
          chk.fail(Constraint::SingleState, id, t, describe(action) + " names unknown aggregator");
          continue;
        }
        if (mv->from == mv->to) {
          chk.fail(Constraint::SingleState, id, t, describe(action) + " does not change cluster");
          continue;
        }
        if (mv->from != tr.cluster) {
          chk.fail(Constraint::Departure, id, t,
                   describe(action) + " while attached to " + std::to_string(tr.cluster));
        }
        const MovementOption& opt = config.movement.at(mv->from, mv->to);
        const double trip = static_cast<double>(opt.delay_slots) * opt.cost_kwh_per_slot;
        const double available = req.initial_energy_kwh + tr.progress - tr.extra;
        if (trip > available + kEnergyEps) {
          chk.fail(Constraint::Departure, id, t,
                   "trip needs " + fmt_kw(trip) + " kWh, " + fmt_kw(available) + " available");
        }
        tr.extra += trip;
        tr.cluster = mv->from;
        tr.to = mv->to;
        tr.delay = opt.delay_slots;
        tr.elapsed = 1;
        tr.moving = tr.elapsed < tr.delay;
        if (!tr.moving) tr.cluster = tr.to;
      }
    }

    for (int j = 0; j < J; ++j) {
      const double budget = config.budgets_kw[static_cast<size_t>(j)];
      if (load[static_cast<size_t>(j)] > budget + kEnergyEps) {
        chk.fail(Constraint::Budget, first_served[static_cast<size_t>(j)], t,
                 "aggregator " + std::to_string(j) + " draws " +
                     fmt_kw(load[static_cast<size_t>(j)]) + " kW of " + fmt_kw(budget) + " kW");
      }
    }
  }

  for (const Track& tr : tracks) {
    const double bound = tr.request->demand_kwh + tr.extra;
    if (tr.progress > bound + kEnergyEps) {
      chk.fail(Constraint::EnergyBound, tr.request->id, config.horizon_slots - 1,
               "delivered " + fmt_kw(tr.progress) + " kWh exceeds " + fmt_kw(bound));
    }
  }
  return chk.report;
}

}  // namespace gridflex

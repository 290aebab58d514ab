#include "gridflex/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gridflex {

MovementMatrix::MovementMatrix(int num_aggregators, MovementOption off_diagonal)
    : size_(num_aggregators),
      entries_(static_cast<size_t>(num_aggregators) * static_cast<size_t>(num_aggregators),
               off_diagonal) {
  if (num_aggregators < 0) throw std::invalid_argument("negative aggregator count");
  for (int j = 0; j < size_; ++j) entries_[static_cast<size_t>(j * size_ + j)] = MovementOption{};
}

MovementMatrix MovementMatrix::linear(int num_aggregators, double cost_kwh_per_slot,
                                      int max_delay) {
  MovementMatrix m(num_aggregators, MovementOption{1, cost_kwh_per_slot});
  for (int a = 0; a < num_aggregators; ++a) {
    for (int b = 0; b < num_aggregators; ++b) {
      if (a == b) continue;
      m.set(a, b, MovementOption{std::min(std::abs(a - b), max_delay), cost_kwh_per_slot});
    }
  }
  return m;
}

const MovementOption& MovementMatrix::at(AggregatorId from, AggregatorId to) const {
  if (from < 0 || to < 0 || from >= size_ || to >= size_) {
    std::ostringstream os;
    os << "movement lookup (" << from << " -> " << to << ") outside " << size_ << " aggregators";
    throw std::out_of_range(os.str());
  }
  return entries_[static_cast<size_t>(from * size_ + to)];
}

void MovementMatrix::set(AggregatorId from, AggregatorId to, MovementOption option) {
  if (from == to) throw std::invalid_argument("movement diagonal is fixed at (0, 0)");
  (void)at(from, to);
  entries_[static_cast<size_t>(from * size_ + to)] = option;
}

double movement_total_cost(const MovementMatrix& movement, AggregatorId from, AggregatorId to) {
  const MovementOption& opt = movement.at(from, to);
  return static_cast<double>(opt.delay_slots) * opt.cost_kwh_per_slot;
}

bool PowerModeSet::well_formed() const {
  if (levels_.empty() || !(levels_.front() > 0.0)) return false;
  return std::adjacent_find(levels_.begin(), levels_.end(),
                            [](double a, double b) { return !(a < b); }) == levels_.end();
}

int PowerModeSet::completing_mode(double remaining_kwh, double slot_length_h) const {
  for (int i = 1; i <= count(); ++i) {
    if (level(i) * slot_length_h + kEnergyEps >= remaining_kwh) return i;
  }
  return count();
}

namespace {

struct ViolationSink {
  std::vector<Violation>& out;
  void add(std::string subject, std::string field, std::string rule) {
    out.push_back(Violation{std::move(subject), std::move(field), std::move(rule)});
  }
};

}  // namespace

std::vector<Violation> validate_config(const SystemConfig& config,
                                       std::span<const DeviceRequest> devices) {
  std::vector<Violation> out;
  ViolationSink sink{out};
  const int J = config.num_aggregators();

  if (J < 1) sink.add("config", "budgets_kw", "J >= 1");
  if (config.horizon_slots < 1) sink.add("config", "horizon_slots", "tau >= 1");
  if (!(config.slot_length_h > 0.0)) sink.add("config", "slot_length_h", "T_0 > 0");
  if (!(config.beta_max > 0.0)) sink.add("config", "beta_max", "beta_max > 0");
  for (int j = 0; j < J; ++j) {
    if (!(config.budgets_kw[static_cast<size_t>(j)] > 0.0)) {
      sink.add("config", "budgets_kw[" + std::to_string(j) + "]", "budget > 0");
    }
  }

  if (config.movement.size() != J) {
    sink.add("config", "movement", "movement matrix is J x J");
  } else {
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < J; ++b) {
        const MovementOption& opt = config.movement.at(a, b);
        const std::string field =
            "movement[" + std::to_string(a) + "][" + std::to_string(b) + "]";
        if (a == b) {
          if (opt.delay_slots != 0 || opt.cost_kwh_per_slot != 0.0) {
            sink.add("config", field, "diagonal is (0, 0)");
          }
          continue;
        }
        if (opt.delay_slots < 1) sink.add("config", field, "delta >= 1");
        if (!(opt.cost_kwh_per_slot >= 0.0)) sink.add("config", field, "c >= 0");
      }
    }
  }

  std::set<DeviceId> seen;
  for (const DeviceRequest& d : devices) {
    const std::string subject = "device " + std::to_string(d.id);
    if (!seen.insert(d.id).second) sink.add(subject, "id", "device ids are unique");
    if (d.arrival_slot < 0) sink.add(subject, "arrival_slot", "R_k >= 0");
    if (d.arrival_slot >= d.deadline_slot) sink.add(subject, "deadline_slot", "R_k < T_k");
    if (d.deadline_slot > config.horizon_slots) sink.add(subject, "deadline_slot", "T_k <= tau");
    if (!(d.demand_kwh > 0.0)) sink.add(subject, "demand_kwh", "E_k > 0");
    if (!(d.initial_energy_kwh >= 0.0)) sink.add(subject, "initial_energy_kwh", "I_k >= 0");
    if (!(d.criticality > 0.0)) sink.add(subject, "criticality", "kappa_k > 0");
    if (d.home < 0 || d.home >= J) sink.add(subject, "home_aggregator", "home is a known aggregator");

    if (d.modes.empty()) {
      sink.add(subject, "power_modes_kw", "at least one non-zero mode");
      continue;
    }
    if (!d.modes.well_formed()) {
      sink.add(subject, "power_modes_kw", "modes strictly increasing from 0");
      continue;
    }
    const double window = static_cast<double>(d.deadline_slot - d.arrival_slot);
    const double reachable = d.modes.highest() * config.slot_length_h * window;
    if (d.demand_kwh > reachable + kEnergyEps) {
      std::ostringstream rule;
      rule << "E_k <= max(alpha_k) * T_0 * (T_k - R_k) (" << d.demand_kwh << " > " << reachable
           << ")";
      sink.add(subject, "demand_kwh", rule.str());
    }
  }
  return out;
}

std::string describe(const Action& action) {
  std::ostringstream os;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Idle>) {
          os << "idle";
        } else if constexpr (std::is_same_v<T, Serve>) {
          os << "serve(mode " << a.mode << " @ " << a.aggregator << ")";
        } else {
          os << "move(" << a.from << " -> " << a.to << ")";
        }
      },
      action);
  return os.str();
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& other) {
  deadline += other.deadline;
  mobility += other.mobility;
  stationary += other.stationary;
  total += other.total;
  return *this;
}

AggregatorId DeviceState::cluster() const {
  if (const auto* at = std::get_if<AtCluster>(&location)) return at->aggregator;
  return std::get<InTransit>(location).from;
}

}  // namespace gridflex

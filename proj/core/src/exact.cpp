#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "gridflex/dynamics.hpp"
#include "gridflex/exact.hpp"

namespace gridflex {

namespace {

void append_bytes(std::string& key, const void* data, size_t n) {
  key.append(static_cast<const char*>(data), n);
}

/// Everything that determines future losses: progress, extra demand and
/// location. Accumulated loss is deliberately left out.
std::string state_key(SlotIndex t, const std::vector<DeviceState>& states) {
  std::string key;
  key.reserve(4 + states.size() * 32);
  append_bytes(key, &t, sizeof t);
  for (const DeviceState& s : states) {
    append_bytes(key, &s.progress_kwh, sizeof s.progress_kwh);
    append_bytes(key, &s.extra_demand_kwh, sizeof s.extra_demand_kwh);
    if (const auto* at = std::get_if<AtCluster>(&s.location)) {
      const int tag[2] = {0, at->aggregator};
      append_bytes(key, tag, sizeof tag);
    } else {
      const auto& tr = std::get<InTransit>(s.location);
      const int tag[4] = {1, tr.from, tr.to, tr.slots_remaining};
      append_bytes(key, tag, sizeof tag);
    }
  }
  return key;
}

class Search {
 public:
  explicit Search(const ExactInstance& instance)
      : cfg_(instance.config), budget_(instance.limits.node_budget) {
    for (size_t k = 0; k < instance.devices.size(); ++k) order_.push_back(k);
    std::sort(order_.begin(), order_.end(), [&](size_t a, size_t b) {
      return instance.devices[a].id < instance.devices[b].id;
    });
    ids_.reserve(instance.devices.size());
    for (const DeviceRequest& d : instance.devices) ids_.push_back(d.id);
  }

  ExactSolution run(std::vector<DeviceState> start) {
    path_.assign(static_cast<size_t>(cfg_.horizon_slots), {});
    dfs(0, std::move(start));
    ExactSolution out;
    out.loss = best_loss_;
    out.devices = std::move(best_states_);
    out.nodes = nodes_;
    for (SlotIndex t = 0; t < cfg_.horizon_slots; ++t) {
      SlotSchedule slot{t, {}};
      for (size_t k = 0; k < ids_.size(); ++k) {
        slot.decisions.push_back(
            SlotDecision{ids_[k], t, best_path_[static_cast<size_t>(t)][k]});
      }
      out.schedule.push_back(std::move(slot));
    }
    return out;
  }

 private:
  // Sum in ascending id so the result is bit-identical to total_loss().
  double partial(const std::vector<DeviceState>& states) const {
    double sum = 0.0;
    for (size_t k : order_) sum += states[k].loss.total;
    return sum;
  }

  std::vector<Action> candidates(const DeviceState& s, SlotIndex t) const {
    std::vector<Action> out;
    if (!s.arrived(t)) return {Idle{}};
    if (const auto* tr = std::get_if<InTransit>(&s.location)) return {Move{tr->from, tr->to}};
    // A device with nothing left to draw gains nothing from service or travel.
    if (s.complete()) return {Idle{}};

    const AggregatorId here = s.cluster();
    const int cap = s.request.modes.completing_mode(s.remaining_kwh(), cfg_.slot_length_h);
    for (int m = cap; m >= 1; --m) out.push_back(Serve{m, here});
    out.push_back(Idle{});
    for (AggregatorId to = 0; to < cfg_.num_aggregators(); ++to) {
      if (to == here) continue;
      const double trip = movement_total_cost(cfg_.movement, here, to);
      if (trip > s.available_energy_kwh() + kEnergyEps) continue;
      out.push_back(Move{here, to});
    }
    return out;
  }

  bool dominated(const std::string& key, const std::vector<DeviceState>& states) {
    auto& seen = memo_[key];
    for (const auto& v : seen) {
      bool all = true;
      for (size_t k = 0; k < v.size() && all; ++k) all = v[k] <= states[k].loss.total;
      if (all) return true;
    }
    std::vector<double> mine(states.size());
    for (size_t k = 0; k < states.size(); ++k) mine[k] = states[k].loss.total;
    std::erase_if(seen, [&](const std::vector<double>& v) {
      for (size_t k = 0; k < v.size(); ++k) {
        if (mine[k] > v[k]) return false;
      }
      return true;
    });
    seen.push_back(std::move(mine));
    return false;
  }

  void dfs(SlotIndex t, std::vector<DeviceState> states) {
    const double acc = partial(states);
    if (acc >= best_loss_) return;
    if (t == cfg_.horizon_slots) {
      best_loss_ = acc;
      best_path_ = path_;
      best_states_ = std::move(states);
      return;
    }
    if (dominated(state_key(t, states), states)) return;

    const size_t K = states.size();
    std::vector<std::vector<Action>> options(K);
    for (size_t k = 0; k < K; ++k) options[k] = candidates(states[k], t);

    std::vector<size_t> pick(K, 0);
    const auto J = static_cast<size_t>(cfg_.num_aggregators());
    std::vector<double> load(J);
    while (true) {
      if (++nodes_ > budget_) {
        throw ExactRefusal("exact search exceeded its node budget of " +
                           std::to_string(budget_));
      }
      std::fill(load.begin(), load.end(), 0.0);
      bool within_budget = true;
      for (size_t k = 0; k < K && within_budget; ++k) {
        if (const auto* s = std::get_if<Serve>(&options[k][pick[k]])) {
          const auto j = static_cast<size_t>(s->aggregator);
          load[j] += states[k].request.modes.level(s->mode);
          within_budget = load[j] <= cfg_.budgets_kw[j] + kEnergyEps;
        }
      }
      if (within_budget) {
        std::vector<DeviceState> next = states;
        auto& slot_actions = path_[static_cast<size_t>(t)];
        slot_actions.resize(K);
        for (size_t k = 0; k < K; ++k) {
          slot_actions[k] = options[k][pick[k]];
          advance(next[k], slot_actions[k], t, cfg_);
        }
        dfs(t + 1, std::move(next));
      }

      size_t k = 0;
      while (k < K && ++pick[k] == options[k].size()) pick[k++] = 0;
      if (k == K) break;
    }
  }

  const SystemConfig& cfg_;
  const std::uint64_t budget_;
  std::vector<size_t> order_;
  std::vector<DeviceId> ids_;
  std::uint64_t nodes_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::vector<std::vector<Action>> path_;
  std::vector<std::vector<Action>> best_path_;
  std::vector<DeviceState> best_states_;
  std::unordered_map<std::string, std::vector<std::vector<double>>> memo_;
};

void check_limits(const ExactInstance& instance) {
  const ExactLimits& lim = instance.limits;
  const SystemConfig& cfg = instance.config;
  auto refuse = [&](const std::string& what, int value, int cap) {
    throw ExactRefusal("instance '" + instance.id + "' has " + std::to_string(value) + " " +
                       what + ", exact solver cap is " + std::to_string(cap));
  };
  if (static_cast<int>(instance.devices.size()) > lim.max_devices) {
    refuse("devices", static_cast<int>(instance.devices.size()), lim.max_devices);
  }
  if (cfg.horizon_slots > lim.max_slots) refuse("slots", cfg.horizon_slots, lim.max_slots);
  if (cfg.num_aggregators() > lim.max_aggregators) {
    refuse("aggregators", cfg.num_aggregators(), lim.max_aggregators);
  }
  for (const DeviceRequest& d : instance.devices) {
    if (d.modes.count() > lim.max_modes) refuse("power modes", d.modes.count(), lim.max_modes);
  }
}

}  // namespace

ExactSolution solve_exact(const ExactInstance& instance) {
  check_limits(instance);
  Search search(instance);
  return search.run(initial_states(instance.devices));
}

GapReport gap_report(std::span<const ExactInstance> instances,
                     const SchedulerOptions& scheduler) {
  GapReport report;
  std::vector<double> ratios;
  for (const ExactInstance& inst : instances) {
    const ExactSolution exact = solve_exact(inst);
    const HorizonResult online = run_horizon(inst.config, inst.devices, scheduler);
    GapRow row{inst.id, exact.loss, total_loss(online.devices), 1.0};
    if (row.exact_loss > 0.0) {
      row.ratio = row.heuristic_loss / row.exact_loss;
    } else if (row.heuristic_loss > 0.0) {
      row.ratio = std::numeric_limits<double>::infinity();
    }
    ratios.push_back(row.ratio);
    report.rows.push_back(std::move(row));
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const size_t n = ratios.size();
    report.median_ratio =
        n % 2 == 1 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
    report.max_ratio = ratios.back();
  }
  return report;
}

}  // namespace gridflex

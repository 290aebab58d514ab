#include "gridflex/heuristic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "gridflex/dynamics.hpp"
#include "gridflex/priority.hpp"
#include "gridflex/utility.hpp"

namespace gridflex {

ClusterPlan serve_in_order(const AggregatorState& aggregator,
                           std::span<const DeviceState* const> ordered, SlotIndex t,
                           const SystemConfig& config, UpgradePolicy upgrade) {
  const size_t n = ordered.size();
  const double budget = aggregator.budget_kw;
  double committed = aggregator.committed_kw;
  auto fits = [&](double extra_kw) { return committed + extra_kw <= budget + kEnergyEps; };

  ClusterPlan plan;
  plan.backlog_ahead_kwh.reserve(n);
  std::vector<int> mode(n, 0);
  std::vector<int> cap(n, 0);

  double backlog = 0.0;
  for (size_t p = 0; p < n; ++p) {
    const DeviceState& dev = *ordered[p];
    plan.backlog_ahead_kwh.push_back(backlog);
    const double remaining = dev.remaining_kwh();
    backlog += std::max(0.0, remaining);
    if (remaining <= kEnergyEps) continue;
    cap[p] = dev.request.modes.completing_mode(remaining, config.slot_length_h);
    const double lowest = dev.request.modes.level(1);
    if (fits(lowest)) {
      mode[p] = 1;
      committed += lowest;
    }
  }

  auto try_step = [&](size_t p) {
    if (mode[p] == 0 || mode[p] >= cap[p]) return false;
    const auto& modes = ordered[p]->request.modes;
    const double step = modes.level(mode[p] + 1) - modes.level(mode[p]);
    if (!fits(step)) return false;
    ++mode[p];
    committed += step;
    return true;
  };

  if (upgrade == UpgradePolicy::RoundRobin) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t p = 0; p < n; ++p) changed = try_step(p) || changed;
    }
  } else {
    for (size_t p = 0; p < n; ++p) {
      while (try_step(p)) {
      }
    }
  }

  plan.decisions.reserve(n);
  for (size_t p = 0; p < n; ++p) {
    SlotDecision d{ordered[p]->request.id, t, Idle{}};
    if (mode[p] > 0) d.action = Serve{mode[p], aggregator.id};
    plan.decisions.push_back(d);
  }
  plan.committed_kw = committed;
  return plan;
}

std::vector<size_t> priority_order(std::span<const DeviceState* const> cluster, SlotIndex t) {
  std::vector<PriorityEntry> entries;
  std::vector<size_t> index;
  entries.reserve(cluster.size());
  for (size_t i = 0; i < cluster.size(); ++i) {
    const DeviceState& d = *cluster[i];
    if (d.complete()) continue;
    entries.push_back(PriorityEntry{
        d.request.id,
        priority(d.progress_kwh, d.requirement_kwh(), t, d.request.deadline_slot),
        d.request.criticality, d.request.modes.lowest()});
    index.push_back(i);
  }
  std::vector<size_t> order(entries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return ranks_before(entries[a], entries[b]); });
  for (size_t& o : order) o = index[o];
  return order;
}

namespace {

std::vector<const DeviceState*> reorder(std::span<const DeviceState* const> cluster,
                                        const std::vector<size_t>& order) {
  std::vector<const DeviceState*> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(cluster[i]);
  return out;
}

int slots_needed(double energy_kwh, double rate_kw, double slot_length_h) {
  const double slots = energy_kwh / (rate_kw * slot_length_h);
  return std::max(1, static_cast<int>(std::ceil(slots - 1e-9)));
}

/// Highest mode level not exceeding `limit_kw`, or 0 when none fits.
double highest_fitting(const PowerModeSet& modes, double limit_kw) {
  double best = 0.0;
  for (double level : modes.levels()) {
    if (level <= limit_kw + kEnergyEps) best = level;
  }
  return best;
}

}  // namespace

ClusterPlan schedule_slot(const AggregatorState& aggregator,
                          std::span<const DeviceState* const> cluster, SlotIndex t,
                          const SystemConfig& config, UpgradePolicy upgrade) {
  const auto ordered = reorder(cluster, priority_order(cluster, t));
  return serve_in_order(aggregator, ordered, t, config, upgrade);
}

StatusList publish_status(std::span<const AggregatorState> aggregators) {
  StatusList status;
  status.reserve(aggregators.size());
  for (const AggregatorState& a : aggregators) {
    status.push_back(StatusEntry{a.id, std::max(0.0, a.residual_kw()), a.committed_kw,
                                 static_cast<int>(a.members.size())});
  }
  return status;
}

std::optional<Move> mobility_decision(const DeviceState& device, double backlog_ahead_kwh,
                                      const StatusList& status, const SystemConfig& config,
                                      SlotIndex t) {
  const DeviceRequest& req = device.request;
  if (!req.mobile || device.in_transit() || !device.arrived(t) || device.complete()) {
    return std::nullopt;
  }
  const SlotIndex last_slot = config.horizon_slots - 1;
  const AggregatorId home = device.cluster();
  const double remaining = device.remaining_kwh();
  const double T0 = config.slot_length_h;

  // Stay: wait for the backlog ranked ahead to drain, then run at full rate.
  double stay_loss = 0.0;
  {
    const double budget = config.budgets_kw[static_cast<size_t>(home)];
    const double rate = highest_fitting(req.modes, budget);
    SlotIndex done = last_slot;
    if (rate > 0.0) {
      const int wait = std::max(
          1, static_cast<int>(std::ceil(backlog_ahead_kwh / (budget * T0) - 1e-9)));
      done = std::min<SlotIndex>(last_slot, t + wait + slots_needed(remaining, rate, T0) - 1);
    }
    stay_loss = deadline_loss(0.0, remaining, done, req.deadline_slot, req.criticality,
                              config.beta_max);
  }

  std::optional<Move> best;
  double best_loss = 0.0;
  int best_delay = 0;
  for (const StatusEntry& target : status) {
    if (target.aggregator == home) continue;
    if (target.residual_kw + kEnergyEps < req.modes.lowest()) continue;
    const MovementOption& opt = config.movement.at(home, target.aggregator);
    const double trip = movement_total_cost(config.movement, home, target.aggregator);
    if (trip > device.available_energy_kwh() + kEnergyEps) continue;
    if (t + opt.delay_slots > last_slot) continue;

    const double rate = highest_fitting(req.modes, target.residual_kw);
    const double owed = remaining + trip;
    const SlotIndex done =
        std::min<SlotIndex>(last_slot, t + opt.delay_slots + slots_needed(owed, rate, T0) - 1);
    const double loss =
        2.0 * trip + deadline_loss(0.0, owed, done, req.deadline_slot, req.criticality,
                                   config.beta_max);
    if (!best || loss < best_loss || (loss == best_loss && opt.delay_slots < best_delay)) {
      best = Move{home, target.aggregator};
      best_loss = loss;
      best_delay = opt.delay_slots;
    }
  }

  if (best && stay_loss > best_loss) return best;
  return std::nullopt;
}

SchedulerOptions heuristic_options() {
  SchedulerOptions opts;
  opts.name = "heuristic";
  opts.ranking = priority_order;
  opts.mobility = true;
  return opts;
}

HorizonResult run_horizon(const SystemConfig& config, std::span<const DeviceRequest> devices,
                          const SchedulerOptions& options) {
  using Clock = std::chrono::steady_clock;
  const int J = config.num_aggregators();
  const size_t K = devices.size();

  HorizonResult result;
  result.devices = initial_states(devices);
  result.schedule.reserve(static_cast<size_t>(config.horizon_slots));

  std::vector<Action> actions(K);
  std::vector<double> backlog(K, 0.0);
  std::vector<std::vector<const DeviceState*>> clusters(static_cast<size_t>(J));
  std::vector<std::vector<size_t>> cluster_index(static_cast<size_t>(J));
  std::vector<AggregatorState> aggregators(static_cast<size_t>(J));

  for (SlotIndex t = 0; t < config.horizon_slots; ++t) {
    const auto started = Clock::now();

    for (int j = 0; j < J; ++j) {
      auto& agg = aggregators[static_cast<size_t>(j)];
      agg = AggregatorState{j, config.budgets_kw[static_cast<size_t>(j)], 0.0, {}};
      clusters[static_cast<size_t>(j)].clear();
      cluster_index[static_cast<size_t>(j)].clear();
    }

    for (size_t k = 0; k < K; ++k) {
      const DeviceState& d = result.devices[k];
      backlog[k] = 0.0;
      if (const auto* tr = std::get_if<InTransit>(&d.location)) {
        actions[k] = Move{tr->from, tr->to};
        continue;
      }
      actions[k] = Idle{};
      if (!d.arrived(t)) continue;
      const auto j = static_cast<size_t>(d.cluster());
      aggregators[j].members.push_back(d.request.id);
      if (d.complete()) continue;
      clusters[j].push_back(&d);
      cluster_index[j].push_back(k);
    }

    // Aggregator level: each cluster is scheduled independently.
    for (int j = 0; j < J; ++j) {
      const auto& cluster = clusters[static_cast<size_t>(j)];
      const auto order = options.ranking(cluster, t);
      const auto ordered = reorder(cluster, order);
      auto& agg = aggregators[static_cast<size_t>(j)];
      const ClusterPlan plan = serve_in_order(agg, ordered, t, config, options.upgrade);
      agg.committed_kw = plan.committed_kw;
      for (size_t p = 0; p < order.size(); ++p) {
        const size_t k = cluster_index[static_cast<size_t>(j)][order[p]];
        actions[k] = plan.decisions[p].action;
        backlog[k] = plan.backlog_ahead_kwh[p];
      }
    }

    // Device level: unserved mobile devices may leave, departing this slot.
    if (options.mobility) {
      const StatusList status = publish_status(aggregators);
      for (size_t k = 0; k < K; ++k) {
        if (!std::holds_alternative<Idle>(actions[k])) continue;
        if (auto mv = mobility_decision(result.devices[k], backlog[k], status, config, t)) {
          actions[k] = *mv;
        }
      }
    }

    SlotSchedule slot{t, {}};
    slot.decisions.reserve(K);
    for (size_t k = 0; k < K; ++k) {
      advance(result.devices[k], actions[k], t, config);
      slot.decisions.push_back(SlotDecision{devices[k].id, t, actions[k]});
    }
    result.schedule.push_back(std::move(slot));

    std::vector<double> committed(static_cast<size_t>(J));
    for (int j = 0; j < J; ++j) committed[static_cast<size_t>(j)] = aggregators[static_cast<size_t>(j)].committed_kw;
    result.committed_kw.push_back(std::move(committed));
    result.slot_seconds.push_back(std::chrono::duration<double>(Clock::now() - started).count());
  }
  return result;
}

}  // namespace gridflex

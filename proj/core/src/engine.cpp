#include "gridflex/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "gridflex/baselines.hpp"
#include "gridflex/dynamics.hpp"
#include "json_codec.hpp"

namespace gridflex {

using codec::json;
using codec::member;

std::vector<std::string> scheduler_names() { return {"heuristic", "edf", "hp", "exact"}; }

SchedulerOptions scheduler_options(std::string_view id) {
  if (id == "heuristic") return heuristic_options();
  if (id == "edf") return edf_options();
  if (id == "hp") return hp_options();
  if (id == "exact") {
    SchedulerOptions o;
    o.name = "exact";
    return o;
  }
  throw UsageError("unknown scheduler '" + std::string(id) + "' (expected heuristic, edf, hp or exact)");
}

namespace {

std::vector<std::vector<double>> utilization_trace(const Scenario& sc, const Schedule& schedule) {
  std::unordered_map<DeviceId, const DeviceRequest*> by_id;
  for (const DeviceRequest& d : sc.devices) by_id.emplace(d.id, &d);
  const auto J = static_cast<size_t>(sc.config.num_aggregators());
  std::vector<std::vector<double>> out;
  for (const SlotSchedule& slot : schedule) {
    std::vector<double> load(J, 0.0);
    for (const SlotDecision& d : slot.decisions) {
      if (const auto* s = std::get_if<Serve>(&d.action)) {
        load[static_cast<size_t>(s->aggregator)] += by_id.at(d.device)->modes.level(s->mode);
      }
    }
    for (size_t j = 0; j < J; ++j) load[j] /= sc.config.budgets_kw[j];
    out.push_back(std::move(load));
  }
  return out;
}

std::vector<DeviceLedger> ledgers(std::span<const DeviceState> states) {
  std::vector<DeviceLedger> out;
  out.reserve(states.size());
  for (const DeviceState& s : states) {
    out.push_back(DeviceLedger{s.request.id, s.loss, s.progress_kwh, s.extra_demand_kwh, s.complete()});
  }
  return out;
}

}  // namespace

RunResult run(const Scenario& scenario, std::string_view scheduler, const RunFlags& flags) {
  SchedulerOptions opts = scheduler_options(scheduler);
  const std::vector<Violation> problems = validate_config(scenario.config, scenario.devices);
  if (!problems.empty()) {
    const Violation& v = problems.front();
    throw UsageError("scenario '" + scenario.id + "' is invalid: " + v.subject + " " + v.field +
                     ": " + v.rule + (problems.size() > 1
                                          ? " (+" + std::to_string(problems.size() - 1) + " more)"
                                          : std::string()));
  }

  RunResult r;
  r.scenario_id = scenario.id;
  r.scheduler = std::string(scheduler);
  std::vector<DeviceState> final_states;
  if (scheduler == "exact") {
    ExactInstance inst{scenario.id, scenario.config, scenario.devices, flags.exact_limits};
    ExactSolution sol = solve_exact(inst);
    r.mobility = true;
    r.decisions = std::move(sol.schedule);
    final_states = std::move(sol.devices);
  } else {
    if (flags.mobility) opts = set_mobility_enabled(std::move(opts), *flags.mobility);
    opts.upgrade = flags.upgrade;
    r.mobility = opts.mobility;
    HorizonResult h = run_horizon(scenario.config, scenario.devices, opts);
    r.decisions = std::move(h.schedule);
    r.slot_seconds = std::move(h.slot_seconds);
    final_states = std::move(h.devices);
  }
  r.devices = ledgers(final_states);
  r.total_loss = total_loss(final_states);
  r.utilization = utilization_trace(scenario, r.decisions);

  FeasibilityReport report = validate_schedule(r.decisions, scenario.config, scenario.devices);
  if (!report.feasible()) {
    throw ValidationFailure("scheduler '" + r.scheduler + "' produced an infeasible schedule for '" +
                                scenario.id + "': " + report.summary(),
                            std::move(report));
  }
  return r;
}

double replay_total_loss(const Scenario& scenario, const Schedule& schedule) {
  std::vector<DeviceState> states = initial_states(scenario.devices);
  std::unordered_map<DeviceId, size_t> index;
  for (size_t k = 0; k < states.size(); ++k) index.emplace(states[k].request.id, k);
  for (const SlotSchedule& slot : schedule) {
    for (const SlotDecision& d : slot.decisions) {
      const auto it = index.find(d.device);
      if (it == index.end()) throw MalformedSchedule("unknown device " + std::to_string(d.device));
      advance(states[it->second], d.action, slot.slot, scenario.config);
    }
  }
  return total_loss(states);
}

std::string result_to_json(const RunResult& r, bool include_timing, int indent) {
  json devices = json::array();
  for (const DeviceLedger& d : r.devices) {
    devices.push_back(json{{"id", d.device},
                           {"loss", codec::loss_to_json(d.loss)},
                           {"progress_kwh", d.progress_kwh},
                           {"extra_demand_kwh", d.extra_demand_kwh},
                           {"complete", d.complete}});
  }
  json doc{{"schema", kResultSchema},
           {"scenario_id", r.scenario_id},
           {"scheduler", r.scheduler},
           {"mobility", r.mobility},
           {"total_loss", r.total_loss},
           {"devices", std::move(devices)},
           {"utilization", r.utilization}};
  if (include_timing) doc["slot_seconds"] = r.slot_seconds;
  doc["decisions"] = codec::schedule_to_value(r.decisions);
  return doc.dump(indent) + "\n";
}

RunResult result_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  RunResult r;
  r.scenario_id = member<std::string>(doc, "scenario_id");
  r.scheduler = member<std::string>(doc, "scheduler");
  r.mobility = member<bool>(doc, "mobility");
  r.total_loss = member<double>(doc, "total_loss");
  for (const json& d : member<json>(doc, "devices")) {
    const json& l = member<json>(d, "loss");
    DeviceLedger led;
    led.device = member<int>(d, "id");
    led.loss = LossBreakdown{member<double>(l, "deadline"), member<double>(l, "mobility"),
                             member<double>(l, "stationary"), member<double>(l, "total")};
    led.progress_kwh = member<double>(d, "progress_kwh");
    led.extra_demand_kwh = member<double>(d, "extra_demand_kwh");
    led.complete = member<bool>(d, "complete");
    r.devices.push_back(led);
  }
  r.utilization = member<std::vector<std::vector<double>>>(doc, "utilization");
  if (doc.contains("slot_seconds")) r.slot_seconds = member<std::vector<double>>(doc, "slot_seconds");
  r.decisions = codec::schedule_from_value(member<json>(doc, "decisions"));
  return r;
}

std::string metrics_csv(const RunResult& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  const size_t J = r.utilization.empty() ? 0 : r.utilization.front().size();
  out << "slot";
  for (size_t j = 0; j < J; ++j) out << ",util_" << j;
  out << ",seconds\n";
  for (size_t t = 0; t < r.utilization.size(); ++t) {
    out << t;
    for (double u : r.utilization[t]) out << ',' << u;
    out << ',' << (t < r.slot_seconds.size() ? r.slot_seconds[t] : 0.0) << '\n';
  }
  return out.str();
}

std::string result_table(const RunResult& r) {
  std::ostringstream out;
  out << "scenario   " << r.scenario_id << '\n'
      << "scheduler  " << r.scheduler << (r.mobility ? " (mobility on)" : " (mobility off)") << '\n'
      << "total loss " << std::setprecision(10) << r.total_loss << '\n';
  size_t complete = 0;
  for (const DeviceLedger& d : r.devices) complete += d.complete ? 1 : 0;
  out << "complete   " << complete << " / " << r.devices.size() << "\n\n";
  out << std::left << std::setw(8) << "device" << std::right << std::setw(16) << "deadline"
      << std::setw(12) << "mobility" << std::setw(14) << "stationary" << std::setw(16) << "total"
      << '\n';
  out << std::fixed << std::setprecision(4);
  for (const DeviceLedger& d : r.devices) {
    if (d.loss.total == 0.0) continue;
    out << std::left << std::setw(8) << d.device << std::right << std::setw(16) << d.loss.deadline
        << std::setw(12) << d.loss.mobility << std::setw(14) << d.loss.stationary << std::setw(16)
        << d.loss.total << '\n';
  }
  return out.str();
}

int worker_count() {
  if (const char* env = std::getenv("GRIDFLEX_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 1024L));
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::vector<RunResult> run_batch(std::span<const BatchJob> jobs, int threads) {
  std::vector<RunResult> results(jobs.size());
  const int workers =
      std::max(1, std::min(threads > 0 ? threads : worker_count(), static_cast<int>(jobs.size())));
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = run(*jobs[i].scenario, jobs[i].scheduler, jobs[i].flags);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace gridflex

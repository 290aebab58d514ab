// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "gridflex/baselines.hpp"
#include "gridflex/dynamics.hpp"
#include "gridflex/engine.hpp"
#include "gridflex/exact.hpp"
#include "gridflex/experiments.hpp"
#include "gridflex/priority.hpp"
#include "gridflex/rng.hpp"
#include "gridflex/utility.hpp"
#include "gridflex/workload.hpp"

using namespace gridflex;
using Clock = std::chrono::steady_clock;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1 -------------------------------------------------------------------------
Verdict feasibility_suite() {
  const auto t0 = Clock::now();
  int scenarios = 0, schedules = 0, failures = 0;
  std::string first;
  std::uint64_t seed = 1;
  for (int n : {20, 40, 60, 80, 100}) {
    for (const auto& classes : standard_class_combinations()) {
      for (double f : {0.25, 0.5, 0.75, 1.0}) {
        for (int rep = 0; rep < 3; ++rep) {
          GenSpec spec;
          spec.num_devices = n;
          spec.classes = classes;
          spec.mobile_fraction = f;
          spec.seed = derive_seed(1, seed++);
          Scenario sc;
          try {
            sc = generate(spec).scenario;
          } catch (const std::exception& e) {
            ++failures;
            if (first.empty()) first = e.what();
            continue;
          }
          ++scenarios;
          for (const SchedulerOptions& o : {heuristic_options(), edf_options(), hp_options()}) {
            const HorizonResult r = run_horizon(sc.config, sc.devices, o);
            ++schedules;
            const FeasibilityReport rep_ = validate_schedule(r.schedule, sc.config, sc.devices);
            if (!rep_.feasible()) {
              ++failures;
              if (first.empty()) first = sc.id + " " + o.name + "\n" + rep_.summary();
            }
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = scenarios >= 200 && failures == 0 && secs < 120.0;
  v.detail = fmt("%d scenarios, %d schedules, %d infeasible, %.1f s", scenarios, schedules, failures, secs);
  if (!first.empty()) v.detail += "; first: " + first;
  return v;
}

// 2 -------------------------------------------------------------------------
Verdict oracle_inequality() {
  const auto t0 = Clock::now();
  std::vector<Scenario> inst;
  for (std::uint64_t i = 0; i < 150; ++i) inst.push_back(generate_micro(MicroSpec{.seed = derive_seed(2, i)}));
  const OracleGap gap = oracle_gap(inst);
  int violations = 0, positive = 0;
  std::string first;
  for (const OracleGapRow& r : gap.rows) {
    const bool ok = r.exact_loss <= r.heuristic_loss && r.exact_loss <= r.edf_loss && r.exact_loss <= r.hp_loss;
    if (!ok) {
      ++violations;
      if (first.empty()) first = fmt("%s exact %.17g heuristic %.17g edf %.17g hp %.17g", r.instance.c_str(),
                                     r.exact_loss, r.heuristic_loss, r.edf_loss, r.hp_loss);
    }
    if (r.exact_loss > 0.0) ++positive;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = gap.rows.size() >= 100 && violations == 0 && secs < 300.0;
  v.detail = fmt("%zu instances (%d with positive optimum), %d violations, heuristic/exact median %.3g max %.3g, %.1f s",
                 gap.rows.size(), positive, violations, gap.heuristic_gap.median_ratio,
                 gap.heuristic_gap.max_ratio, secs);
  if (!first.empty()) v.detail += "; first: " + first;
  return v;
}

// 3 -------------------------------------------------------------------------
Verdict replica_direction() {
  const auto t0 = Clock::now();
  std::ifstream in(std::string(GRIDFLEX_DATA_DIR) + "/acn_replica_2020.csv");
  if (!in) return {false, "replica session file missing"};
  const SessionParse parsed = parse_sessions_csv(in);
  std::vector<Scenario> scenarios;
  for (std::uint64_t s = 0; s < 10; ++s) {
    IngestOptions o;
    o.seed = s;
    o.scenario_id = "replica-seed" + std::to_string(s);
    scenarios.push_back(ingest_sessions(parsed.records, o).scenario);
  }
  const BaselineComparison cmp = baseline_compare(scenarios);
  int wins = 0;
  for (const ComparisonRow& r : cmp.rows) {
    if (r.heuristic_loss < r.edf_loss && r.heuristic_loss < r.hp_loss) ++wins;
  }
  const double secs = seconds_since(t0);
  const bool slots_ok = !scenarios.empty() && scenarios[0].config.horizon_slots == 48 &&
                        scenarios[0].config.slot_length_h == 0.5;
  Verdict v;
  v.pass = slots_ok && wins == static_cast<int>(cmp.rows.size()) && cmp.median_vs_edf >= 30.0 &&
           cmp.median_vs_hp >= 30.0 && secs < 60.0;
  v.detail = fmt("%zu sessions, heuristic below both baselines on %d/%zu seeds, median improvement vs EDF %s, vs HP %s, %.1f s",
                 parsed.records.size(), wins, cmp.rows.size(), format_percent(cmp.median_vs_edf).c_str(),
                 format_percent(cmp.median_vs_hp).c_str(), secs);
  return v;
}

// 4 -------------------------------------------------------------------------
Verdict mobility_direction() {
  const auto t0 = Clock::now();
  MobilityDeltaSpec spec;  // 20..100 devices, 50 samples each
  spec.seed = 4;
  const ExperimentSummary s = mobility_delta_experiment(spec);
  std::vector<double> medians;
  std::string row;
  bool enough = true;
  for (const DeltaGroup& g : s.groups) {
    medians.push_back(g.stats.median);
    enough = enough && g.deltas.size() >= 50;
    row += fmt("%s%d:%.4g", row.empty() ? "" : " ", g.num_devices, g.stats.median);
  }
  bool monotone = true;
  for (size_t i = 1; i < medians.size(); ++i) monotone = monotone && medians[i] <= medians[i - 1];
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = enough && s.failures.empty() && !medians.empty() && s.groups.back().num_devices == 100 &&
           medians.back() <= 0.0 && monotone && secs < 600.0;
  v.detail = fmt("median delta by device count [%s], %zu failed samples, %.1f s", row.c_str(), s.failures.size(), secs);
  return v;
}

// 5 -------------------------------------------------------------------------
double median_slot_seconds(int devices, int repeats) {
  std::vector<double> per_run;
  for (int rep = 0; rep < repeats; ++rep) {
    GenSpec spec;
    spec.num_devices = devices;
    spec.classes = parse_classes("LLMMH");
    spec.seed = derive_seed(5, static_cast<std::uint64_t>(rep));
    const Scenario sc = generate(spec).scenario;
    const HorizonResult r = run_horizon(sc.config, sc.devices, heuristic_options());
    per_run.push_back(median(r.slot_seconds));
  }
  return median(per_run);
}

Verdict runtime_scaling() {
  median_slot_seconds(100, 2);  // warm-up
  const double m100 = median_slot_seconds(100, 21);
  const double m200 = median_slot_seconds(200, 21);
  const double ratio = m200 / m100;
  Verdict v;
  v.pass = m100 < 0.010 && ratio < 2.5;
  v.detail = fmt("median per-slot time %.4f ms at 100 devices, %.4f ms at 200, ratio %.2f", m100 * 1e3, m200 * 1e3,
                 ratio);
  return v;
}

// 6 -------------------------------------------------------------------------
Verdict precision_suite() {
  struct Item {
    std::string what;
    double got;
    Big want;
  };
  std::vector<Item> items;
  using boost::multiprecision::exp;
  items.push_back({"deadline loss deficit 6 k1.6 2 late", deadline_loss(4, 10, 7, 5, 1.6), Big(6) * exp(Big("1.6") * 2)});
  items.push_back({"deadline loss deficit 1 k1.6 1 late", deadline_loss(0, 1, 1, 0, 1.6), exp(Big("1.6"))});
  items.push_back({"deadline loss deficit 1 k2.0 1 late", deadline_loss(0, 1, 1, 0, 2.0), exp(Big("2.0"))});
  items.push_back({"deadline loss deficit 0.5 k1.8 3 late", deadline_loss(2.5, 3, 9, 6, 1.8),
                   Big("0.5") * exp(Big("1.8") * 3)});
  items.push_back({"deadline + doubled move", deadline_loss(4, 10, 7, 5, 1.6) + 2 * 0.15,
                   Big(6) * exp(Big("3.2")) + Big("0.30")});

  // movement ledger: a delta-slot trip charges 2 * delta * c in total
  {
    SystemConfig cfg;
    cfg.budgets_kw = {10, 10, 10};
    cfg.horizon_slots = 10;
    cfg.slot_length_h = 0.5;
    cfg.movement = MovementMatrix::linear(3, 0.15, 4);
    cfg.movement.set(0, 2, MovementOption{3, 0.2});
    DeviceRequest d;
    d.deadline_slot = 9;
    d.demand_kwh = 2;
    d.modes = PowerModeSet({1});
    d.mobile = true;
    d.initial_energy_kwh = 2;
    DeviceState s(d);
    double charged = 0.0;
    for (SlotIndex t = 0; t < 3; ++t) charged += 2.0 * advance(s, Move{0, 2}, t, cfg).mobility;
    items.push_back({"movement ledger 2*3*0.2", charged, Big(2) * 3 * Big("0.2")});
    items.push_back({"movement extra demand 3*0.2", s.extra_demand_kwh, Big(3) * Big("0.2")});
  }

  items.push_back({"priority full deficit at deadline", priority(0, 10, 3, 3), Big(1)});
  items.push_back({"priority half deficit 5 early", priority(5, 10, 0, 5), Big(5) / 10 / 5});
  items.push_back({"priority half deficit 4 late", priority(5, 10, 9, 5), Big(5) / 10 * 4});

  int bad = 0;
  std::string first;
  for (const Item& it : items) {
    const Big rel = boost::multiprecision::abs(Big(it.got) - it.want) / boost::multiprecision::abs(it.want);
    if (!(rel <= Big("1e-9"))) {
      ++bad;
      if (first.empty()) first = fmt("%s: got %.17g", it.what.c_str(), it.got);
    }
  }
  Verdict v;
  v.pass = bad == 0;
  v.detail = fmt("%zu closed-form values, %d outside relative 1e-9 (deadline example evaluates to %.4f)",
                 items.size(), bad, deadline_loss(4, 10, 7, 5, 1.6));
  if (!first.empty()) v.detail += "; first: " + first;
  return v;
}

// 7 -------------------------------------------------------------------------
Verdict determinism() {
  std::vector<Scenario> scenarios;
  for (std::uint64_t s = 0; s < 8; ++s) {
    GenSpec spec;
    spec.num_devices = 60 + 5 * static_cast<int>(s);
    spec.mobile_fraction = 0.75;
    spec.seed = derive_seed(7, s);
    scenarios.push_back(generate(spec).scenario);
  }
  std::vector<BatchJob> jobs;
  for (int copy = 0; copy < 3; ++copy) {
    for (const Scenario& sc : scenarios) {
      for (const char* s : {"heuristic", "edf", "hp"}) jobs.push_back(BatchJob{&sc, s, {}});
    }
  }
  const int max_workers = std::max(8, static_cast<int>(std::thread::hardware_concurrency()) * 2);
  const auto serial = run_batch(jobs, 1);
  const auto parallel = run_batch(jobs, max_workers);
  const auto parallel2 = run_batch(jobs, max_workers);
  const size_t per_copy = jobs.size() / 3;
  int mismatches = 0;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const std::string ref = result_to_json(serial[i % per_copy], false);
    if (result_to_json(serial[i], false) != ref) ++mismatches;
    if (result_to_json(parallel[i], false) != ref) ++mismatches;
    if (result_to_json(parallel2[i], false) != ref) ++mismatches;
  }
  Verdict v;
  v.pass = mismatches == 0;
  v.detail = fmt("%zu runs compared byte-for-byte at 1 and %d workers, %d mismatches", jobs.size() * 3, max_workers,
                 mismatches);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"feasibility suite", feasibility_suite},
      {"oracle inequality", oracle_inequality},
      {"replica baseline comparison", replica_direction},
      {"mobility delta direction", mobility_direction},
      {"per-slot runtime", runtime_scaling},
      {"closed-form precision", precision_suite},
      {"determinism", determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %zu %s: %s - %s\n", i + 1, criteria[i].first.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gridflex/rng.hpp"
#include "gridflex/workload.hpp"

namespace gridflex {

LoadBand load_band(LoadClass c) {
  switch (c) {
    case LoadClass::Light:
      return {0.5, 1.0};
    case LoadClass::Medium:
      return {1.0, 1.25};
    case LoadClass::Heavy:
      return {1.25, 1.5};
  }
  return {};
}

std::vector<LoadClass> parse_classes(std::string_view letters) {
  std::vector<LoadClass> out;
  for (char ch : letters) {
    switch (ch) {
      case 'L':
      case 'l':
        out.push_back(LoadClass::Light);
        break;
      case 'M':
      case 'm':
        out.push_back(LoadClass::Medium);
        break;
      case 'H':
      case 'h':
        out.push_back(LoadClass::Heavy);
        break;
      case ',':
      case ' ':
        break;
      default:
        throw std::invalid_argument(std::string("unknown load class '") + ch + "'");
    }
  }
  return out;
}

std::string format_classes(std::span<const LoadClass> classes) {
  std::string s;
  for (LoadClass c : classes) s += c == LoadClass::Light ? 'L' : c == LoadClass::Medium ? 'M' : 'H';
  return s;
}

std::vector<std::vector<LoadClass>> standard_class_combinations() {
  return {parse_classes("LLLMH"), parse_classes("LLMMH"), parse_classes("LMMMH"),
          parse_classes("LLMHH")};
}

namespace {

double round_cents(double x) { return std::round(x * 100.0) / 100.0; }
double floor_cents(double x) { return std::floor(x * 100.0) / 100.0; }

/// Flat-Dirichlet split of `total` under per-entry caps: resample a bounded
/// number of times, then clip the overflow and hand it to uncapped entries.
std::vector<double> constrained_split(Rng& rng, double total, const std::vector<double>& caps) {
  const size_t n = caps.size();
  std::vector<double> w;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    w = rng.simplex(n);
    bool ok = true;
    for (size_t i = 0; i < n; ++i) {
      w[i] *= total;
      ok = ok && w[i] <= caps[i];
    }
    if (ok) return w;
  }
  for (int round = 0; round < 64; ++round) {
    double excess = 0.0;
    double free_mass = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (w[i] > caps[i]) {
        excess += w[i] - caps[i];
        w[i] = caps[i];
      } else if (w[i] < caps[i]) {
        free_mass += w[i];
      }
    }
    if (excess <= 0.0) break;
    for (size_t i = 0; i < n; ++i) {
      if (w[i] < caps[i]) w[i] += free_mass > 0.0 ? excess * w[i] / free_mass : 0.0;
    }
  }
  return w;
}

size_t smallest_covering(const std::vector<double>& pool, double rate_kw) {
  for (size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] + 1e-12 >= rate_kw) return i;
  }
  return pool.size() - 1;
}

/// Covering mode plus a seeded subset of the lower pool modes and, with
/// probability 1/2, the next higher one.
std::vector<double> draw_modes(Rng& rng, const std::vector<double>& pool, size_t covering) {
  std::vector<double> modes;
  for (size_t i = 0; i < covering; ++i) {
    if (rng.bernoulli(0.5)) modes.push_back(pool[i]);
  }
  modes.push_back(pool[covering]);
  if (covering + 1 < pool.size() && rng.bernoulli(0.5)) modes.push_back(pool[covering + 1]);
  return modes;
}

}  // namespace

GeneratedScenario generate(const GenSpec& spec) {
  const int J = static_cast<int>(spec.classes.size());
  if (J < 1) throw GenerationError("generation needs at least one aggregator class");
  if (spec.horizon_slots < 1 || !(spec.slot_length_h > 0.0) || !(spec.capacity_kwh > 0.0)) {
    throw GenerationError("horizon, slot length and capacity must be positive");
  }
  if (spec.mode_pool.empty() || spec.criticality_pool.empty()) {
    throw GenerationError("mode and criticality pools must be non-empty");
  }
  std::vector<int> periods;
  for (int p : spec.periods) {
    if (p >= 1 && p <= spec.horizon_slots) periods.push_back(p);
  }
  if (periods.empty()) throw GenerationError("no period fits inside the horizon");
  std::vector<double> pool = spec.mode_pool;
  std::sort(pool.begin(), pool.end());

  Rng rng(spec.seed);
  const double T0 = spec.slot_length_h;
  const double tau = static_cast<double>(spec.horizon_slots);
  const double budget = spec.capacity_kwh / (T0 * tau);
  const double rate_cap = std::min(pool.back(), budget);

  GeneratedScenario out;
  Scenario& sc = out.scenario;
  {
    std::ostringstream id;
    id << "gen-" << format_classes(spec.classes) << "-n" << spec.num_devices << "-m"
       << static_cast<int>(std::lround(spec.mobile_fraction * 100)) << "-s" << spec.seed;
    sc.id = id.str();
  }
  sc.config.budgets_kw.assign(static_cast<size_t>(J), budget);
  sc.config.horizon_slots = spec.horizon_slots;
  sc.config.slot_length_h = T0;
  sc.config.beta_max = spec.beta_max;
  sc.config.movement = MovementMatrix::linear(J, spec.movement_cost, spec.max_delay);

  struct Device {
    AggregatorId home;
    int period;
    int jobs;
    double job_kwh;
  };
  std::vector<Device> devices;

  for (int j = 0; j < J; ++j) {
    const int n = spec.num_devices / J + (j < spec.num_devices % J ? 1 : 0);
    const LoadBand band = load_band(spec.classes[static_cast<size_t>(j)]);
    const double target = rng.uniform(band.lo, band.hi);
    out.target_utilization.push_back(target);
    if (n == 0) {
      throw GenerationError("aggregator " + std::to_string(j) + " has no devices to reach " +
                            "its load band");
    }

    std::vector<Device> local;
    std::vector<double> caps;
    for (int i = 0; i < n; ++i) {
      const int period = rng.pick(periods);
      const int jobs = spec.horizon_slots / period;
      local.push_back(Device{j, period, jobs, 0.0});
      caps.push_back(rate_cap * static_cast<double>(jobs * period) / (budget * tau));
    }
    const double reachable = std::accumulate(caps.begin(), caps.end(), 0.0);
    if (target > reachable) {
      std::ostringstream msg;
      msg << "aggregator " << j << ": utilisation " << target << " unreachable with " << n
          << " devices (max " << reachable << ")";
      throw GenerationError(msg.str());
    }
    const std::vector<double> share = constrained_split(rng, target, caps);
    for (int i = 0; i < n; ++i) {
      Device& d = local[static_cast<size_t>(i)];
      const double total_kwh = share[static_cast<size_t>(i)] * budget * T0 * tau;
      const double exact_job = total_kwh / d.jobs;
      const double ceiling = rate_cap * T0 * d.period;
      d.job_kwh = round_cents(exact_job);
      if (d.job_kwh > ceiling) d.job_kwh = floor_cents(exact_job);
      d.job_kwh = std::max(0.01, d.job_kwh);
      devices.push_back(d);
    }
  }

  const size_t N = devices.size();
  std::vector<size_t> perm(N);
  std::iota(perm.begin(), perm.end(), size_t{0});
  rng.shuffle(perm);
  const auto mobile_count =
      static_cast<size_t>(std::lround(std::clamp(spec.mobile_fraction, 0.0, 1.0) * N));
  std::vector<bool> mobile(N, false);
  for (size_t i = 0; i < mobile_count; ++i) mobile[perm[i]] = true;

  DeviceId next_id = 0;
  for (size_t i = 0; i < N; ++i) {
    const Device& d = devices[i];
    const double rate = d.job_kwh / (T0 * d.period);
    const std::vector<double> modes = draw_modes(rng, pool, smallest_covering(pool, rate));
    const double kappa = rng.pick(spec.criticality_pool);
    const double initial = round_cents(rng.uniform01() * d.job_kwh);
    for (int job = 0; job < d.jobs; ++job) {
      DeviceRequest r;
      r.id = next_id++;
      r.arrival_slot = job * d.period;
      r.deadline_slot = (job + 1) * d.period;
      r.mobile = mobile[i];
      r.initial_energy_kwh = initial;
      r.demand_kwh = d.job_kwh;
      r.criticality = kappa;
      r.modes = PowerModeSet(modes);
      r.home = d.home;
      sc.devices.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<double> cluster_utilization(const Scenario& scenario) {
  const SystemConfig& cfg = scenario.config;
  std::vector<double> demand(static_cast<size_t>(cfg.num_aggregators()), 0.0);
  for (const DeviceRequest& d : scenario.devices) demand[static_cast<size_t>(d.home)] += d.demand_kwh;
  for (int j = 0; j < cfg.num_aggregators(); ++j) {
    demand[static_cast<size_t>(j)] /=
        cfg.budgets_kw[static_cast<size_t>(j)] * cfg.slot_length_h * cfg.horizon_slots;
  }
  return demand;
}

Scenario generate_micro(const MicroSpec& spec) {
  Rng rng(spec.seed);
  Scenario sc;
  sc.id = "micro-" + std::to_string(spec.seed);
  const int J = static_cast<int>(rng.uniform_int(1, spec.max_aggregators));
  const int tau = static_cast<int>(rng.uniform_int(std::min(3, spec.max_slots), spec.max_slots));
  const int K = static_cast<int>(rng.uniform_int(1, spec.max_devices));
  const double T0 = spec.slot_length_h;
  const std::vector<double> level_pool = {1, 2, 3, 5};

  sc.config.horizon_slots = tau;
  sc.config.slot_length_h = T0;
  for (int j = 0; j < J; ++j) sc.config.budgets_kw.push_back(static_cast<double>(rng.uniform_int(1, 3)));
  sc.config.movement = MovementMatrix::linear(J, 0.05 * static_cast<double>(rng.uniform_int(1, 6)));

  for (int k = 0; k < K; ++k) {
    DeviceRequest r;
    r.id = k;
    r.arrival_slot = static_cast<int>(rng.uniform_int(0, tau - 2));
    r.deadline_slot = static_cast<int>(rng.uniform_int(r.arrival_slot + 1, tau));
    std::vector<double> levels = level_pool;
    rng.shuffle(levels);
    levels.resize(static_cast<size_t>(rng.uniform_int(1, spec.max_modes)));
    std::sort(levels.begin(), levels.end());
    r.modes = PowerModeSet(levels);
    const double reach = r.modes.highest() * T0 * (r.deadline_slot - r.arrival_slot);
    r.demand_kwh = std::max(0.5, std::floor(rng.uniform(0.5, 1.0) * reach * 2.0) / 2.0);
    r.initial_energy_kwh = 0.5 * static_cast<double>(rng.uniform_int(0, 4));
    r.criticality = rng.pick(std::vector<double>{1.6, 1.8, 2.0});
    r.mobile = rng.bernoulli(0.5);
    r.home = static_cast<AggregatorId>(rng.uniform_int(0, J - 1));
    sc.devices.push_back(std::move(r));
  }
  return sc;
}

}  // namespace gridflex

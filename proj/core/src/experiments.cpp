#include "gridflex/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "gridflex/rng.hpp"

namespace gridflex {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  if (sorted[hi] == sorted[lo]) return sorted[lo];
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return quantile(v, 0.5);
}

}  // namespace

Stats summarize(std::vector<double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.count - 1);
  }
  s.min = values.front();
  s.max = values.back();
  s.q25 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q75 = quantile(values, 0.75);
  return s;
}

ExperimentSummary mobility_delta_experiment(const MobilityDeltaSpec& spec) {
  struct Sample {
    size_t group;
    std::string label;
    std::optional<Scenario> scenario;
    std::string error;
  };
  ExperimentSummary out;
  std::vector<Sample> samples;
  for (int n : spec.device_counts) {
    for (size_t fi = 0; fi < spec.mobile_fractions.size(); ++fi) {
      const size_t group = out.groups.size();
      out.groups.push_back(DeltaGroup{n, spec.mobile_fractions[fi], {}, {}, 0});
      for (int i = 0; i < spec.samples; ++i) {
        GenSpec g = spec.base;
        g.num_devices = n;
        g.mobile_fraction = spec.mobile_fractions[fi];
        g.classes = spec.class_sets[static_cast<size_t>(i) % spec.class_sets.size()];
        g.seed = derive_seed(spec.seed, (static_cast<std::uint64_t>(n) << 32) ^ (fi << 16) ^
                                            static_cast<std::uint64_t>(i));
        Sample s{group, "n=" + std::to_string(n) + " sample " + std::to_string(i), {}, {}};
        try {
          s.scenario = generate(g).scenario;
        } catch (const std::exception& e) {
          s.error = e.what();
        }
        samples.push_back(std::move(s));
      }
    }
  }

  std::vector<BatchJob> jobs;
  std::vector<size_t> job_sample;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].scenario) continue;
    for (bool mobility : {true, false}) {
      RunFlags f;
      f.mobility = mobility;
      jobs.push_back(BatchJob{&*samples[i].scenario, spec.scheduler, f});
      job_sample.push_back(i);
    }
  }
  // Failures are recorded per job, so run each job individually in the pool.
  std::vector<std::optional<double>> losses(jobs.size());
  std::vector<std::string> errors(jobs.size());
  {
    const int threads = spec.threads > 0 ? spec.threads : worker_count();
    std::vector<std::jthread> pool;
    std::atomic<size_t> next{0};
    auto work = [&] {
      for (size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
        try {
          losses[j] = run(*jobs[j].scenario, jobs[j].scheduler, jobs[j].flags).total_loss;
        } catch (const std::exception& e) {
          errors[j] = e.what();
        }
      }
    };
    const int workers = std::max(1, std::min(threads, static_cast<int>(jobs.size())));
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  for (size_t i = 0, j = 0; i < samples.size(); ++i) {
    Sample& s = samples[i];
    DeltaGroup& g = out.groups[s.group];
    if (!s.scenario) {
      ++g.failures;
      out.failures.push_back(s.label + ": " + s.error);
      continue;
    }
    const std::optional<double> with = losses[j];
    const std::optional<double> without = losses[j + 1];
    const std::string err = !errors[j].empty() ? errors[j] : errors[j + 1];
    j += 2;
    if (!with || !without) {
      ++g.failures;
      out.failures.push_back(s.label + ": " + err);
      continue;
    }
    g.deltas.push_back(*with - *without);
  }
  for (DeltaGroup& g : out.groups) g.stats = summarize(g.deltas);
  return out;
}

std::optional<double> improvement_percent(double baseline_loss, double heuristic_loss) {
  if (baseline_loss == 0.0) return std::nullopt;
  return (baseline_loss - heuristic_loss) / baseline_loss * 100.0;
}

std::string format_percent(double percent) {
  const double t = std::trunc(percent * 100.0 + (percent >= 0 ? 1e-9 : -1e-9)) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", t == 0.0 ? 0.0 : t);
  return buf;
}

Improvement improvement(const std::string& baseline, double baseline_loss, double heuristic_loss) {
  Improvement imp{baseline, baseline_loss, heuristic_loss,
                  improvement_percent(baseline_loss, heuristic_loss), {}};
  if (imp.percent) {
    imp.text = format_percent(*imp.percent);
  } else {
    imp.text = heuristic_loss == 0.0 ? "n/a (both zero)" : "n/a";
  }
  return imp;
}

std::vector<Improvement> improvement_report(const RunResult& heuristic,
                                            std::span<const RunResult> baselines) {
  std::vector<Improvement> out;
  for (const RunResult& b : baselines) {
    if (b.scenario_id != heuristic.scenario_id) {
      throw UsageError("improvement report mixes scenarios '" + heuristic.scenario_id + "' and '" +
                       b.scenario_id + "'");
    }
    out.push_back(improvement(b.scheduler, b.total_loss, heuristic.total_loss));
  }
  return out;
}

BaselineComparison baseline_compare(std::span<const Scenario> scenarios, int threads) {
  std::vector<BatchJob> jobs;
  for (const Scenario& sc : scenarios) {
    for (const char* id : {"heuristic", "edf", "hp"}) jobs.push_back(BatchJob{&sc, id, {}});
  }
  const std::vector<RunResult> results = run_batch(jobs, threads);
  BaselineComparison out;
  std::vector<double> vs_edf;
  std::vector<double> vs_hp;
  for (size_t i = 0; i < scenarios.size(); ++i) {
    const RunResult& h = results[3 * i];
    const RunResult& e = results[3 * i + 1];
    const RunResult& p = results[3 * i + 2];
    ComparisonRow row{h.scenario_id, h.total_loss, e.total_loss, p.total_loss,
                      improvement("edf", e.total_loss, h.total_loss),
                      improvement("hp", p.total_loss, h.total_loss)};
    if (row.vs_edf.percent) vs_edf.push_back(*row.vs_edf.percent);
    if (row.vs_hp.percent) vs_hp.push_back(*row.vs_hp.percent);
    out.rows.push_back(std::move(row));
  }
  out.median_vs_edf = median_of(vs_edf);
  out.median_vs_hp = median_of(vs_hp);
  return out;
}

OracleGap oracle_gap(std::span<const Scenario> instances, const ExactLimits& limits, int threads) {
  std::vector<BatchJob> jobs;
  for (const Scenario& sc : instances) {
    for (const char* id : {"exact", "heuristic", "edf", "hp"}) {
      RunFlags f;
      f.exact_limits = limits;
      jobs.push_back(BatchJob{&sc, id, f});
    }
  }
  const std::vector<RunResult> results = run_batch(jobs, threads);
  OracleGap out;
  std::vector<double> ratios;
  for (size_t i = 0; i < instances.size(); ++i) {
    OracleGapRow row{instances[i].id, results[4 * i].total_loss, results[4 * i + 1].total_loss,
                     results[4 * i + 2].total_loss, results[4 * i + 3].total_loss};
    GapRow g{row.instance, row.exact_loss, row.heuristic_loss, 1.0};
    if (g.exact_loss > 0.0) {
      g.ratio = g.heuristic_loss / g.exact_loss;
    } else if (g.heuristic_loss > 0.0) {
      g.ratio = std::numeric_limits<double>::infinity();
    }
    ratios.push_back(g.ratio);
    out.heuristic_gap.rows.push_back(std::move(g));
    out.rows.push_back(std::move(row));
  }
  if (!ratios.empty()) {
    out.heuristic_gap.median_ratio = median_of(ratios);
    out.heuristic_gap.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  }
  return out;
}

}  // namespace gridflex

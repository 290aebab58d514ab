#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex {

enum class LoadClass { Light, Medium, Heavy };

struct LoadBand {
  double lo = 0.0;
  double hi = 0.0;
};

/// L = [0.5, 1], M = [1, 1.25], H = [1.25, 1.5] of aggregator capacity.
LoadBand load_band(LoadClass c);

/// "LLMMH" -> {L, L, M, M, H}. Throws std::invalid_argument on other letters.
std::vector<LoadClass> parse_classes(std::string_view letters);
std::string format_classes(std::span<const LoadClass> classes);

/// The four class combinations of the synthetic study.
std::vector<std::vector<LoadClass>> standard_class_combinations();

struct GenSpec {
  int num_devices = 60;  // total over all aggregators, spread evenly
  std::vector<LoadClass> classes = {LoadClass::Light, LoadClass::Light, LoadClass::Medium,
                                    LoadClass::Medium, LoadClass::Heavy};
  double capacity_kwh = 500.0;  // per aggregator over the whole horizon
  int horizon_slots = 50;
  double slot_length_h = 0.5;
  std::vector<int> periods = {6, 12, 24, 48};
  std::vector<double> mode_pool = {1, 2, 3, 5, 10, 20, 50};
  double mobile_fraction = 0.5;
  std::vector<double> criticality_pool = {1.6, 1.8, 2.0};
  double movement_cost = 0.15;  // kWh per slot of travel
  int max_delay = 4;
  double beta_max = kDefaultBetaMax;
  std::uint64_t seed = 0;
};

struct GeneratedScenario {
  Scenario scenario;
  std::vector<double> target_utilization;  // per aggregator, drawn in its band
};

/// Spec cannot be realised (e.g. a band above what the devices can draw).
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Synthetic periodic workload.
///
/// Each aggregator draws a utilisation target in its class band and splits
/// it over its devices with a flat-Dirichlet draw, resampled (then clipped)
/// until every device share fits under its power cap. A device is periodic:
/// period P from the pool, one request per period with arrival equal to the
/// previous deadline. Demands are rounded to 0.01 kWh; mode sets always
/// contain a mode that finishes the request within its period.
GeneratedScenario generate(const GenSpec& spec);

/// Demand of each aggregator's home devices over budget * T0 * tau.
std::vector<double> cluster_utilization(const Scenario& scenario);

/// Small random instances for the exact solver: at most `max_devices`
/// devices, `max_aggregators` aggregators, `max_slots` slots and
/// `max_modes` non-zero modes per device.
struct MicroSpec {
  int max_devices = 3;
  int max_aggregators = 2;
  int max_slots = 6;
  int max_modes = 2;
  double slot_length_h = 0.5;
  std::uint64_t seed = 0;
};

Scenario generate_micro(const MicroSpec& spec);

// ---- charging-session ingestion ---------------------------------------------

struct SessionRecord {
  std::chrono::sys_seconds arrival;
  std::chrono::sys_seconds departure;
  double energy_kwh = 0.0;
  std::string station;
};

struct SessionParse {
  std::vector<SessionRecord> records;
  int skipped = 0;
  std::vector<std::string> warnings;
};

/// Delimited text with a header naming arrival, departure, kwh and station
/// columns (any order, extra columns ignored). Timestamps are ISO-8601; a
/// trailing zone designator is accepted and the wall-clock time is used.
/// Malformed rows and rows with departure <= arrival or kwh <= 0 are skipped
/// and counted.
SessionParse parse_sessions_csv(std::istream& in);

/// ISO-8601 "YYYY-MM-DD[T ]hh:mm[:ss[.frac]][Z|+hh:mm]" -> wall-clock seconds.
std::chrono::sys_seconds parse_iso8601(std::string_view text);

struct IngestOptions {
  int horizon_slots = 48;
  double slot_length_h = 0.5;
  double budget_kw = 50.0;  // per aggregator
  std::vector<double> mode_pool = {1, 2, 3, 5, 10, 20, 50};
  std::vector<double> criticality_pool = {1.6, 1.8, 2.0};
  double mobile_fraction = 1.0;
  double movement_cost = 0.15;
  int max_delay = 4;
  double beta_max = kDefaultBetaMax;
  std::uint64_t seed = 0;
  std::string scenario_id = "sessions";
};

struct IngestResult {
  Scenario scenario;
  std::vector<std::string> stations;  // aggregator id -> station
  int skipped = 0;                    // records that could not be mapped
  int clipped = 0;                    // demands reduced to the reachable maximum
};

/// Maps every session onto one day of slots: arrival slot is the time of day
/// floored to a slot; the deadline is arrival plus the floored stay (at least
/// one slot), clipped to tau - 1. Each station becomes an aggregator. Mode
/// sets hold the smallest pool mode that makes the demand feasible plus a
/// seeded subset of lower pool modes; criticality and mobility are drawn
/// from the seed.
IngestResult ingest_sessions(std::span<const SessionRecord> records,
                             const IngestOptions& options);

}  // namespace gridflex

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "gridflex/rng.hpp"
#include "gridflex/scenario_io.hpp"
#include "gridflex/workload.hpp"

using namespace gridflex;
using test::make_config;
using test::make_device;

namespace {

SessionRecord session(const std::string& arrival, const std::string& departure, double kwh,
                      const std::string& station = "s1") {
  return SessionRecord{parse_iso8601(arrival), parse_iso8601(departure), kwh, station};
}

std::vector<SessionRecord> replica_records() {
  std::ifstream in(std::string(GRIDFLEX_DATA_DIR) + "/acn_replica_2020.csv");
  EXPECT_TRUE(in.good());
  return parse_sessions_csv(in).records;
}

}  // namespace

TEST(Classes, ParseAndFormat) {
  const auto c = parse_classes("LLMMH");
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c[0], LoadClass::Light);
  EXPECT_EQ(c[2], LoadClass::Medium);
  EXPECT_EQ(c[4], LoadClass::Heavy);
  EXPECT_EQ(format_classes(c), "LLMMH");
  EXPECT_EQ(parse_classes("L, M,H").size(), 3u);
  EXPECT_THROW(parse_classes("LXM"), std::invalid_argument);
}

TEST(Classes, Bands) {
  EXPECT_EQ(load_band(LoadClass::Light).lo, 0.5);
  EXPECT_EQ(load_band(LoadClass::Light).hi, 1.0);
  EXPECT_EQ(load_band(LoadClass::Medium).hi, 1.25);
  EXPECT_EQ(load_band(LoadClass::Heavy).hi, 1.5);
  EXPECT_EQ(standard_class_combinations().size(), 4u);
}

TEST(Rng, SimplexSumsToOne) {
  Rng rng(9);
  for (size_t n : {1u, 2u, 7u, 40u}) {
    const auto w = rng.simplex(n);
    ASSERT_EQ(w.size(), n);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    for (double x : w) EXPECT_GE(x, 0.0);
  }
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
}

TEST(Generate, NoMobileDevicesAtZeroFraction) {
  GenSpec spec;
  spec.mobile_fraction = 0.0;
  spec.seed = 1;
  for (const DeviceRequest& d : generate(spec).scenario.devices) EXPECT_FALSE(d.mobile);
}

TEST(Generate, MobileFlagsFollowTheFraction) {
  GenSpec spec;
  spec.num_devices = 40;
  spec.seed = 2;
  spec.mobile_fraction = 1.0;
  for (const DeviceRequest& d : generate(spec).scenario.devices) EXPECT_TRUE(d.mobile);
  spec.mobile_fraction = 0.25;
  const Scenario sc = generate(spec).scenario;
  int mobile_jobs = 0;
  for (const DeviceRequest& d : sc.devices) mobile_jobs += d.mobile ? 1 : 0;
  EXPECT_GT(mobile_jobs, 0);
  EXPECT_LT(mobile_jobs, static_cast<int>(sc.devices.size()));
}

TEST(Generate, UtilisationLandsInsideEachBand) {
  GenSpec spec;
  spec.num_devices = 60;
  spec.classes = parse_classes("LLMMH");
  spec.seed = 42;
  const GeneratedScenario g = generate(spec);
  const auto util = cluster_utilization(g.scenario);
  ASSERT_EQ(util.size(), 5u);
  for (size_t j = 0; j < 5; ++j) {
    const LoadBand b = load_band(spec.classes[j]);
    EXPECT_GE(util[j], b.lo - 0.01) << j;
    EXPECT_LE(util[j], b.hi + 0.01) << j;
    EXPECT_NEAR(util[j], g.target_utilization[j], 0.01) << j;
  }
}

TEST(Generate, BudgetIsCapacityOverHorizon) {
  GenSpec spec;
  spec.seed = 3;
  const Scenario sc = generate(spec).scenario;
  for (double b : sc.config.budgets_kw) EXPECT_DOUBLE_EQ(b, 500.0 / (0.5 * 50));
}

TEST(Generate, UtilisationOfAFixedDemand) {
  // 400 kWh on a 500 kWh aggregator is 0.8
  const auto cfg = make_config({20}, 50);
  const Scenario sc{"u", cfg, {make_device({.deadline = 50, .demand = 250, .modes = {20}}),
                               make_device({.id = 1, .deadline = 50, .demand = 150, .modes = {20}})}};
  EXPECT_DOUBLE_EQ(cluster_utilization(sc)[0], 0.8);
}

TEST(Generate, Deterministic) {
  GenSpec spec;
  spec.num_devices = 80;
  spec.seed = 77;
  EXPECT_EQ(scenario_to_json(generate(spec).scenario), scenario_to_json(generate(spec).scenario));
  spec.seed = 78;
  GenSpec other = spec;
  other.seed = 77;
  EXPECT_NE(scenario_to_json(generate(spec).scenario), scenario_to_json(generate(other).scenario));
}

TEST(Generate, RejectsUnreachableSpecs) {
  GenSpec spec;
  spec.num_devices = 3;  // fewer devices than aggregators
  EXPECT_THROW(generate(spec), GenerationError);
  spec.num_devices = 5;
  spec.mode_pool = {0.1};  // cannot draw anywhere near the band
  EXPECT_THROW(generate(spec), GenerationError);
}

class GeneratedDevices : public ::testing::TestWithParam<std::tuple<int, std::string, std::uint64_t>> {};

TEST_P(GeneratedDevices, EveryRequestValidatesAndDemandIsInCents) {
  GenSpec spec;
  spec.num_devices = std::get<0>(GetParam());
  spec.classes = parse_classes(std::get<1>(GetParam()));
  spec.seed = std::get<2>(GetParam());
  const Scenario sc = generate(spec).scenario;
  EXPECT_TRUE(validate_config(sc.config, sc.devices).empty());
  for (const DeviceRequest& d : sc.devices) {
    EXPECT_NEAR(d.demand_kwh * 100, std::round(d.demand_kwh * 100), 1e-6);
    EXPECT_GE(d.demand_kwh, 0.01);
    EXPECT_GE(d.initial_energy_kwh, 0.0);
    EXPECT_LE(d.modes.completing_mode(d.demand_kwh, spec.slot_length_h), d.modes.count());
    const double reach = d.modes.level(d.modes.count()) * spec.slot_length_h *
                         (d.deadline_slot - d.arrival_slot);
    EXPECT_LE(d.demand_kwh, reach + 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Grid, GeneratedDevices,
    ::testing::Combine(::testing::Values(20, 60, 100), ::testing::Values("LLLLL", "LLMMH", "MMMMM", "HHHHH"),
                       ::testing::Values(1u, 2u)));

TEST(Micro, RespectsItsCaps) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MicroSpec spec{.seed = seed};
    const Scenario sc = generate_micro(spec);
    EXPECT_LE(static_cast<int>(sc.devices.size()), spec.max_devices);
    EXPECT_LE(sc.config.num_aggregators(), spec.max_aggregators);
    EXPECT_LE(sc.config.horizon_slots, spec.max_slots);
    for (const DeviceRequest& d : sc.devices) EXPECT_LE(d.modes.count(), spec.max_modes);
    EXPECT_TRUE(validate_config(sc.config, sc.devices).empty()) << seed;
  }
}

// ---- sessions -----------------------------------------------------------------

TEST(Iso8601, Forms) {
  using namespace std::chrono;
  const sys_seconds base = sys_days{year{2020} / 3 / 4} + hours{18};
  EXPECT_EQ(parse_iso8601("2020-03-04T18:00"), base);
  EXPECT_EQ(parse_iso8601("2020-03-04 18:00:00"), base);
  EXPECT_EQ(parse_iso8601("2020-03-04T18:00:00Z"), base);
  EXPECT_EQ(parse_iso8601("2020-03-04T18:00:00.250-07:00"), base);
  EXPECT_EQ(parse_iso8601("2020-03-04T18:00:30+0100"), base + seconds{30});
  EXPECT_THROW(parse_iso8601("2020-13-04T18:00"), std::invalid_argument);
  EXPECT_THROW(parse_iso8601("2020-03-04T25:00"), std::invalid_argument);
  EXPECT_THROW(parse_iso8601("yesterday"), std::invalid_argument);
}

TEST(SessionsCsv, SkipsBadRowsAndKeepsGoodOnes) {
  std::istringstream in(
      "id,Station,connectionTime,disconnectTime,kWhDelivered\n"
      "1,a,2020-01-02T08:00:00,2020-01-02T12:00:00,10.5\n"
      "2,a,2020-01-02T08:00:00,2020-01-02T07:00:00,10\n"
      "3,b,not-a-time,2020-01-02T12:00:00,10\n"
      "4,b,2020-01-02T08:00:00,2020-01-02T09:00:00,0\n"
      "5,\"b\",2020-01-02T09:00:00,2020-01-02T11:00:00,4\n"
      "6,b\n");
  const SessionParse p = parse_sessions_csv(in);
  ASSERT_EQ(p.records.size(), 2u);
  EXPECT_EQ(p.skipped, 4);
  EXPECT_EQ(p.warnings.size(), 4u);
  EXPECT_EQ(p.records[1].station, "b");
  EXPECT_DOUBLE_EQ(p.records[0].energy_kwh, 10.5);
}

TEST(SessionsCsv, MissingColumnThrows) {
  std::istringstream in("arrival,departure,station\n");
  EXPECT_THROW(parse_sessions_csv(in), std::invalid_argument);
}

TEST(Ingest, EveningSessionClipsToLastSlot) {
  const std::vector<SessionRecord> r = {session("2020-03-04T18:00:00", "2020-03-05T06:00:00", 20.0)};
  const IngestResult res = ingest_sessions(r, IngestOptions{});
  ASSERT_EQ(res.scenario.devices.size(), 1u);
  const DeviceRequest& d = res.scenario.devices[0];
  EXPECT_EQ(d.arrival_slot, 36);
  EXPECT_EQ(d.deadline_slot, 47);
  EXPECT_DOUBLE_EQ(d.demand_kwh, 20.0);
  EXPECT_TRUE(validate_config(res.scenario.config, res.scenario.devices).empty());
}

TEST(Ingest, EmptyRecordSetGivesEmptyScenario) {
  const IngestResult res = ingest_sessions({}, IngestOptions{});
  EXPECT_TRUE(res.scenario.devices.empty());
  EXPECT_EQ(res.scenario.config.horizon_slots, 48);
}

TEST(Ingest, StationsBecomeAggregators) {
  const std::vector<SessionRecord> r = {session("2020-03-04T08:00", "2020-03-04T10:00", 5, "z"),
                                        session("2020-03-04T09:00", "2020-03-04T10:00", 5, "a"),
                                        session("2020-03-04T09:00", "2020-03-04T12:00", 5, "z")};
  const IngestResult res = ingest_sessions(r, IngestOptions{});
  EXPECT_EQ(res.stations, (std::vector<std::string>{"a", "z"}));
  EXPECT_EQ(res.scenario.devices[0].home, 1);
  EXPECT_EQ(res.scenario.devices[1].home, 0);
}

TEST(Ingest, DemandAboveReachIsClipped) {
  IngestOptions o;
  o.budget_kw = 5;
  const std::vector<SessionRecord> r = {session("2020-03-04T08:00", "2020-03-04T09:00", 50)};
  const IngestResult res = ingest_sessions(r, o);
  EXPECT_EQ(res.clipped, 1);
  EXPECT_TRUE(validate_config(res.scenario.config, res.scenario.devices).empty());
}

TEST(Ingest, ReplicaCoversOneDayOnEveryStation) {
  const auto records = replica_records();
  EXPECT_EQ(records.size(), 144u);
  const IngestResult res = ingest_sessions(records, IngestOptions{});
  EXPECT_EQ(res.scenario.config.horizon_slots, 48);
  EXPECT_EQ(res.scenario.config.num_aggregators(), 3);
  EXPECT_EQ(res.scenario.devices.size() + static_cast<size_t>(res.skipped), 144u);
  EXPECT_TRUE(validate_config(res.scenario.config, res.scenario.devices).empty());
  for (const DeviceRequest& d : res.scenario.devices) EXPECT_TRUE(d.mobile);
}

TEST(Ingest, SeedChangesOnlyTheDrawnFields) {
  const auto records = replica_records();
  IngestOptions a, b;
  b.seed = 1;
  const Scenario x = ingest_sessions(records, a).scenario;
  const Scenario y = ingest_sessions(records, b).scenario;
  ASSERT_EQ(x.devices.size(), y.devices.size());
  for (size_t k = 0; k < x.devices.size(); ++k) {
    EXPECT_EQ(x.devices[k].arrival_slot, y.devices[k].arrival_slot);
    EXPECT_EQ(x.devices[k].deadline_slot, y.devices[k].deadline_slot);
    EXPECT_EQ(x.devices[k].demand_kwh, y.devices[k].demand_kwh);
  }
  EXPECT_NE(scenario_to_json(x), scenario_to_json(y));
}

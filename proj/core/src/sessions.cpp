#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>

#include "gridflex/rng.hpp"
#include "gridflex/workload.hpp"

namespace gridflex {

namespace {

int read_int(std::string_view s, size_t& pos, size_t digits) {
  if (pos + digits > s.size()) throw std::invalid_argument("truncated timestamp");
  int v = 0;
  auto [end, ec] = std::from_chars(s.data() + pos, s.data() + pos + digits, v);
  if (ec != std::errc{} || end != s.data() + pos + digits) {
    throw std::invalid_argument("bad digits in timestamp");
  }
  pos += digits;
  return v;
}

void expect(std::string_view s, size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) throw std::invalid_argument("unexpected character in timestamp");
  ++pos;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Comma separated, double quotes may wrap a field ("" escapes a quote).
std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

int find_column(const std::vector<std::string>& header, std::initializer_list<std::string_view> names) {
  for (std::string_view name : names) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (lower(header[i]) == name) return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace

std::chrono::sys_seconds parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const std::string_view s = trim(text);
  size_t pos = 0;
  const int y = read_int(s, pos, 4);
  expect(s, pos, '-');
  const int mo = read_int(s, pos, 2);
  expect(s, pos, '-');
  const int d = read_int(s, pos, 2);
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) {
    throw std::invalid_argument("timestamp needs a time part");
  }
  ++pos;
  const int hh = read_int(s, pos, 2);
  expect(s, pos, ':');
  const int mm = read_int(s, pos, 2);
  int ss = 0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    ss = read_int(s, pos, 2);
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
  }
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      ++pos;
      read_int(s, pos, 2);
      if (pos < s.size() && s[pos] == ':') ++pos;
      read_int(s, pos, 2);
    }
  }
  if (pos != s.size()) throw std::invalid_argument("trailing characters in timestamp");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) throw std::invalid_argument("timestamp out of range");
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

SessionParse parse_sessions_csv(std::istream& in) {
  SessionParse out;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("session file is empty");
  const std::vector<std::string> header = split_row(line);
  const int c_arr = find_column(header, {"arrival", "connectiontime", "arrival_time"});
  const int c_dep = find_column(header, {"departure", "disconnecttime", "departure_time"});
  const int c_kwh = find_column(header, {"kwh", "kwhdelivered", "energy_kwh"});
  const int c_st = find_column(header, {"station", "stationid", "site", "siteid"});
  if (c_arr < 0 || c_dep < 0 || c_kwh < 0 || c_st < 0) {
    throw std::invalid_argument("session header must name arrival, departure, kwh and station columns");
  }
  const auto need = static_cast<size_t>(std::max({c_arr, c_dep, c_kwh, c_st}));

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> row = split_row(line);
    auto skip = [&](const std::string& why) {
      ++out.skipped;
      out.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (row.size() <= need) {
      skip("too few fields");
      continue;
    }
    SessionRecord r;
    try {
      r.arrival = parse_iso8601(row[static_cast<size_t>(c_arr)]);
      r.departure = parse_iso8601(row[static_cast<size_t>(c_dep)]);
      r.energy_kwh = std::stod(row[static_cast<size_t>(c_kwh)]);
    } catch (const std::exception& e) {
      skip(e.what());
      continue;
    }
    r.station = row[static_cast<size_t>(c_st)];
    if (r.station.empty()) {
      skip("empty station");
      continue;
    }
    if (r.departure <= r.arrival) {
      skip("departure not after arrival");
      continue;
    }
    if (!(r.energy_kwh > 0.0) || !std::isfinite(r.energy_kwh)) {
      skip("non-positive energy");
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

IngestResult ingest_sessions(std::span<const SessionRecord> records, const IngestOptions& o) {
  using namespace std::chrono;
  if (o.horizon_slots < 2 || !(o.slot_length_h > 0.0) || !(o.budget_kw > 0.0)) {
    throw std::invalid_argument("ingest needs tau >= 2, positive slot length and budget");
  }
  if (o.mode_pool.empty() || o.criticality_pool.empty()) {
    throw std::invalid_argument("mode and criticality pools must be non-empty");
  }
  std::vector<double> pool;
  for (double m : o.mode_pool) {
    if (m > 0.0 && m <= o.budget_kw) pool.push_back(m);
  }
  if (pool.empty()) throw std::invalid_argument("no pool mode fits under the aggregator budget");
  std::sort(pool.begin(), pool.end());

  IngestResult out;
  std::map<std::string, AggregatorId> station_ids;
  for (const SessionRecord& r : records) station_ids.emplace(r.station, 0);
  for (auto& [name, id] : station_ids) {
    id = static_cast<AggregatorId>(out.stations.size());
    out.stations.push_back(name);
  }
  const int J = static_cast<int>(out.stations.size());

  Scenario& sc = out.scenario;
  sc.id = o.scenario_id;
  sc.config.budgets_kw.assign(static_cast<size_t>(std::max(J, 1)), o.budget_kw);
  sc.config.horizon_slots = o.horizon_slots;
  sc.config.slot_length_h = o.slot_length_h;
  sc.config.beta_max = o.beta_max;
  sc.config.movement = MovementMatrix::linear(std::max(J, 1), o.movement_cost, o.max_delay);

  Rng rng(o.seed);
  const double slot_s = o.slot_length_h * 3600.0;
  const int tau = o.horizon_slots;
  for (const SessionRecord& r : records) {
    const auto day_start = floor<days>(r.arrival);
    const double tod = static_cast<double>((r.arrival - day_start).count());
    const int R = static_cast<int>(std::floor(tod / slot_s));
    if (R >= tau) {
      ++out.skipped;
      continue;
    }
    const double stay = static_cast<double>((r.departure - r.arrival).count());
    int T = std::min(R + std::max(1, static_cast<int>(std::floor(stay / slot_s))), tau - 1);
    if (T <= R) T = std::min(R + 1, tau);

    const int window = T - R;
    const double reach = pool.back() * o.slot_length_h * window;
    double demand = std::round(r.energy_kwh * 100.0) / 100.0;
    if (demand > reach) {
      demand = std::floor(reach * 100.0) / 100.0;
      ++out.clipped;
    }
    demand = std::max(0.01, demand);

    const double rate = demand / (o.slot_length_h * window);
    size_t covering = pool.size() - 1;
    for (size_t i = 0; i < pool.size(); ++i) {
      if (pool[i] + 1e-12 >= rate) {
        covering = i;
        break;
      }
    }
    std::vector<double> modes;
    for (size_t i = 0; i < covering; ++i) {
      if (rng.bernoulli(0.5)) modes.push_back(pool[i]);
    }
    modes.push_back(pool[covering]);

    DeviceRequest d;
    d.id = static_cast<DeviceId>(sc.devices.size());
    d.arrival_slot = R;
    d.deadline_slot = T;
    d.demand_kwh = demand;
    d.initial_energy_kwh = std::round(rng.uniform01() * demand * 100.0) / 100.0;
    d.criticality = rng.pick(o.criticality_pool);
    d.modes = PowerModeSet(modes);
    d.home = station_ids.at(r.station);
    sc.devices.push_back(std::move(d));
  }

  std::vector<size_t> perm(sc.devices.size());
  std::iota(perm.begin(), perm.end(), size_t{0});
  rng.shuffle(perm);
  const auto mobile_count = static_cast<size_t>(
      std::lround(std::clamp(o.mobile_fraction, 0.0, 1.0) * static_cast<double>(perm.size())));
  for (size_t i = 0; i < mobile_count; ++i) sc.devices[perm[i]].mobile = true;
  return out;
}

}  // namespace gridflex

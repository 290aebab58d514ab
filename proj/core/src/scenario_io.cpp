#include "gridflex/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace gridflex {

namespace codec {

json action_to_json(DeviceId device, const Action& action) {
  json j;
  j["device"] = device;
  if (const auto* s = std::get_if<Serve>(&action)) {
    j["action"] = "serve";
    j["mode"] = s->mode;
    j["aggregator"] = s->aggregator;
  } else if (const auto* m = std::get_if<Move>(&action)) {
    j["action"] = "move";
    j["from"] = m->from;
    j["to"] = m->to;
  } else {
    j["action"] = "idle";
  }
  return j;
}

Action action_from_json(const json& j) {
  const auto kind = member<std::string>(j, "action");
  if (kind == "idle") return Idle{};
  if (kind == "serve") return Serve{member<int>(j, "mode"), member<int>(j, "aggregator")};
  if (kind == "move") return Move{member<int>(j, "from"), member<int>(j, "to")};
  throw std::runtime_error("unknown action '" + kind + "'");
}

json schedule_to_value(const Schedule& schedule) {
  json slots = json::array();
  for (const SlotSchedule& s : schedule) {
    json decisions = json::array();
    for (const SlotDecision& d : s.decisions) decisions.push_back(action_to_json(d.device, d.action));
    slots.push_back(json{{"slot", s.slot}, {"decisions", std::move(decisions)}});
  }
  return slots;
}

Schedule schedule_from_value(const json& j) {
  if (!j.is_array()) throw std::runtime_error("decisions must be an array of slots");
  Schedule out;
  for (const json& slot : j) {
    SlotSchedule s;
    s.slot = member<int>(slot, "slot");
    for (const json& d : member<json>(slot, "decisions")) {
      s.decisions.push_back(SlotDecision{member<int>(d, "device"), s.slot, action_from_json(d)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

json loss_to_json(const LossBreakdown& loss) {
  return json{{"deadline", loss.deadline},
              {"mobility", loss.mobility},
              {"stationary", loss.stationary},
              {"total", loss.total}};
}

}  // namespace codec

using codec::json;
using codec::member;

namespace {

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

json config_to_json(const SystemConfig& c) {
  json movement = json::array();
  for (int from = 0; from < c.movement.size(); ++from) {
    json row = json::array();
    for (int to = 0; to < c.movement.size(); ++to) {
      const MovementOption& o = c.movement.at(from, to);
      row.push_back(json{{"delay_slots", o.delay_slots}, {"cost_kwh_per_slot", o.cost_kwh_per_slot}});
    }
    movement.push_back(std::move(row));
  }
  return json{{"num_aggregators", c.num_aggregators()},
              {"budgets_kw", c.budgets_kw},
              {"horizon_slots", c.horizon_slots},
              {"slot_length_h", c.slot_length_h},
              {"beta_max", c.beta_max},
              {"movement", std::move(movement)}};
}

SystemConfig config_from_json(const json& j) {
  SystemConfig c;
  c.budgets_kw = member<std::vector<double>>(j, "budgets_kw");
  if (j.contains("num_aggregators") && member<int>(j, "num_aggregators") != c.num_aggregators()) {
    throw std::runtime_error("num_aggregators does not match budgets_kw");
  }
  c.horizon_slots = member<int>(j, "horizon_slots");
  c.slot_length_h = member<double>(j, "slot_length_h");
  if (j.contains("beta_max")) c.beta_max = member<double>(j, "beta_max");
  const int J = c.num_aggregators();
  if (!j.contains("movement")) {
    c.movement = MovementMatrix::linear(J, 0.0);
    return c;
  }
  const json& rows = j.at("movement");
  if (!rows.is_array() || static_cast<int>(rows.size()) != J) {
    throw std::runtime_error("movement must be a J x J array");
  }
  c.movement = MovementMatrix(J, MovementOption{1, 0.0});
  for (int from = 0; from < J; ++from) {
    const json& row = rows[static_cast<size_t>(from)];
    if (!row.is_array() || static_cast<int>(row.size()) != J) {
      throw std::runtime_error("movement must be a J x J array");
    }
    for (int to = 0; to < J; ++to) {
      const json& e = row[static_cast<size_t>(to)];
      const MovementOption o{member<int>(e, "delay_slots"), member<double>(e, "cost_kwh_per_slot")};
      if (from == to) {
        if (o != MovementOption{}) throw std::runtime_error("movement diagonal must be (0, 0)");
        continue;
      }
      c.movement.set(from, to, o);
    }
  }
  return c;
}

json device_to_json(const DeviceRequest& d) {
  const auto levels = d.modes.levels();
  return json{{"id", d.id},
              {"arrival_slot", d.arrival_slot},
              {"deadline_slot", d.deadline_slot},
              {"mobile", d.mobile},
              {"initial_energy_kwh", d.initial_energy_kwh},
              {"demand_kwh", d.demand_kwh},
              {"criticality", d.criticality},
              {"power_modes_kw", std::vector<double>(levels.begin(), levels.end())},
              {"home_aggregator", d.home}};
}

DeviceRequest device_from_json(const json& j) {
  DeviceRequest d;
  d.id = member<int>(j, "id");
  d.arrival_slot = member<int>(j, "arrival_slot");
  d.deadline_slot = member<int>(j, "deadline_slot");
  d.mobile = member<bool>(j, "mobile");
  d.initial_energy_kwh = member<double>(j, "initial_energy_kwh");
  d.demand_kwh = member<double>(j, "demand_kwh");
  d.criticality = member<double>(j, "criticality");
  d.modes = PowerModeSet(member<std::vector<double>>(j, "power_modes_kw"));
  d.home = member<int>(j, "home_aggregator");
  return d;
}

void check_schema(const json& doc, std::string_view expected) {
  if (doc.contains("schema") && member<std::string>(doc, "schema") != expected) {
    throw std::runtime_error("schema is '" + member<std::string>(doc, "schema") + "', expected '" +
                             std::string(expected) + "'");
  }
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario, int indent) {
  json devices = json::array();
  for (const DeviceRequest& d : scenario.devices) devices.push_back(device_to_json(d));
  const json doc{{"schema", kScenarioSchema},
                 {"id", scenario.id},
                 {"config", config_to_json(scenario.config)},
                 {"devices", std::move(devices)}};
  return doc.dump(indent) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  const json doc = parse(text);
  try {
    check_schema(doc, kScenarioSchema);
    Scenario sc;
    sc.id = doc.contains("id") ? member<std::string>(doc, "id") : std::string("scenario");
    sc.config = config_from_json(member<json>(doc, "config"));
    for (const json& d : member<json>(doc, "devices")) sc.devices.push_back(device_from_json(d));
    return sc;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
}

std::string schedule_to_json(const Schedule& schedule, int indent) {
  const json doc{{"schema", kScheduleSchema}, {"decisions", codec::schedule_to_value(schedule)}};
  return doc.dump(indent) + "\n";
}

Schedule schedule_from_json(std::string_view text) {
  const json doc = parse(text);
  try {
    return codec::schedule_from_value(member<json>(doc, "decisions"));
  } catch (const std::exception& e) {
    throw FormatError(std::string("schedule: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_text_file(path));
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  write_text_file(path, scenario_to_json(scenario));
}

}  // namespace gridflex

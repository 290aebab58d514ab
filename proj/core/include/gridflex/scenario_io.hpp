#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gridflex/model.hpp"

namespace gridflex {

inline constexpr std::string_view kScenarioSchema = "gridflex.scenario/1";
inline constexpr std::string_view kScheduleSchema = "gridflex.schedule/1";

/// Document is not valid JSON or misses a required member.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string scenario_to_json(const Scenario& scenario, int indent = 2);
Scenario scenario_from_json(std::string_view text);

std::string schedule_to_json(const Schedule& schedule, int indent = -1);

/// Accepts a schedule document or any document with a "decisions" member
/// (such as a run result).
Schedule schedule_from_json(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

}  // namespace gridflex

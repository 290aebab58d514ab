#pragma once

// nlohmann::json conversions shared by the serializers. Private to the library.

#include <json.hpp>

#include "gridflex/model.hpp"

namespace gridflex::codec {

using json = nlohmann::json;

json action_to_json(DeviceId device, const Action& action);
Action action_from_json(const json& j);

json schedule_to_value(const Schedule& schedule);
Schedule schedule_from_value(const json& j);

json loss_to_json(const LossBreakdown& loss);

/// Typed member lookup that reports the missing key.
template <typename T>
T member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::runtime_error(std::string("missing member '") + key + "'");
  }
  return j.at(key).get<T>();
}

}  // namespace gridflex::codec

#pragma once

// Self-describing JSON file formats:
//   .gjson         detector geometry
//   .evjson        event sets
//   .filters.json  filter definitions
//   scene.json     canonical rendered scenes
// Writers are deterministic; numbers are written as the shortest decimal
// that reads back to the identical double.

#include <string>
#include <string_view>
#include <vector>

#include "evd/filter.hpp"
#include "evd/model.hpp"
#include "evd/scene.hpp"
#include "json.hpp"

namespace evd {

std::string write_geometry(const DetectorModel& detector);
/// Throws FormatError with a JSON path on schema violations. Rotations more
/// than 1e-9 but at most 1e-6 away from orthonormal are re-orthonormalized.
DetectorModel read_geometry(std::string_view text);

struct LoadedEvents {
  EventSet events;
  std::vector<std::string> warnings;  // validate_event findings, one line each
};

std::string write_events(const EventSet& events);
LoadedEvents read_events(std::string_view text);

std::string write_scene_json(const Scene& scene);
Scene read_scene_json(std::string_view text);

std::string write_filters(const std::vector<FilterDef>& filters);
std::vector<FilterDef> read_filters(std::string_view text);

/// Collects the `extra` attribute names present in an event set, per kind.
ExtraNames collect_extra_names(const EventSet& events);

// JSON views shared with the service.
nlohmann::json to_json(const ParamValue& value);
nlohmann::json to_json(const ParamValues& values);
nlohmann::json to_json(const FilterDescriptor& descriptor);
nlohmann::json to_json(const SourceRef& source);
nlohmann::json to_json(const Shape& shape);
nlohmann::json to_json(const AttributeMap& attrs);
/// Parses a name -> value map; throws FormatError for non-scalar values.
ParamValues param_values_from_json(const nlohmann::json& j, const std::string& path = "");

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace evd

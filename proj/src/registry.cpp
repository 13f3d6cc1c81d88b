#include "netscore/registry.hpp"

#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace netscore {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (const std::string& part : parts) {
    if (!out.empty()) out += sep;
    out += part;
  }
  return out;
}

}  // namespace

std::string_view to_string(MacConvention convention) {
  switch (convention) {
    case MacConvention::macs: return "macs";
    case MacConvention::multiply_adds_reported_as_flops:
      return "multiply_adds_reported_as_flops";
    case MacConvention::unknown: return "unknown";
  }
  return "unknown";
}

MacConvention mac_convention_from_string(std::string_view name) {
  if (name == "macs") return MacConvention::macs;
  if (name == "multiply_adds_reported_as_flops") {
    return MacConvention::multiply_adds_reported_as_flops;
  }
  if (name == "unknown") return MacConvention::unknown;
  throw ValidationError("unknown mac_convention '" + std::string(name) + "'");
}

std::vector<std::string> validate_record(const RecordInput& input) {
  std::vector<std::string> violations;
  if (input.name.empty()) {
    violations.push_back("name must be non-empty");
  }
  for (std::string& violation :
       metric_violations(input.top1_accuracy_percent, input.params, input.macs)) {
    violations.push_back(std::move(violation));
  }
  return violations;
}

NetworkRecord make_record(const RecordInput& input) {
  auto violations = validate_record(input);
  if (!violations.empty()) {
    throw ValidationError("record '" + input.name + "': " + join(violations, "; "));
  }
  return NetworkRecord{input.name,
                       input.family,
                       input.year,
                       NetworkMetrics(input.top1_accuracy_percent, input.params,
                                      input.macs),
                       input.source,
                       input.mac_convention};
}

Registry::Registry(std::vector<NetworkRecord> records)
    : records_(std::move(records)) {
  by_name_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!by_name_.emplace(records_[i].name, i).second) {
      throw ValidationError("duplicate record name '" + records_[i].name + "'");
    }
  }
}

const NetworkRecord* Registry::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &records_[it->second];
}

Registry load_registry(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("registry document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("registry document must be a JSON object");

  for (const auto& [key, _] : doc.items()) {
    if (key != "schema_version" && key != "records" && key != "notes") {
      throw ParseError("registry document: unknown field '" + key + "'");
    }
  }
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw ParseError("registry document: missing integer 'schema_version'");
  }
  if (doc["schema_version"].get<int>() != Registry::kSchemaVersion) {
    throw ParseError("registry document: unsupported schema_version " +
                     doc["schema_version"].dump() + " (expected " +
                     std::to_string(Registry::kSchemaVersion) + ")");
  }
  if (!doc.contains("records") || !doc["records"].is_array()) {
    throw ParseError("registry document: missing 'records' array");
  }

  static const std::set<std::string> known_fields = {
      "name",  "family", "year",          "top1_accuracy_percent",
      "params", "macs",  "source",        "mac_convention"};

  std::vector<NetworkRecord> records;
  std::vector<std::string> problems;
  records.reserve(doc["records"].size());
  for (std::size_t i = 0; i < doc["records"].size(); ++i) {
    const json& node = doc["records"][i];
    const std::string where = "records[" + std::to_string(i) + "]";
    if (!node.is_object()) throw ParseError(where + " must be an object");
    for (const auto& [key, _] : node.items()) {
      if (!known_fields.contains(key)) {
        throw ParseError(where + ": unknown field '" + key + "'");
      }
    }
    for (const std::string& field : known_fields) {
      if (!node.contains(field)) {
        throw ParseError(where + ": missing field '" + field + "'");
      }
    }
    if (!node["name"].is_string() || !node["family"].is_string() ||
        !node["source"].is_string() || !node["mac_convention"].is_string() ||
        !node["year"].is_number_integer() || !node["top1_accuracy_percent"].is_number() ||
        !node["params"].is_number_integer() || !node["macs"].is_number_integer()) {
      throw ParseError(where + ": field with wrong type");
    }

    RecordInput input;
    input.name = node["name"].get<std::string>();
    input.family = node["family"].get<std::string>();
    input.year = node["year"].get<int>();
    input.top1_accuracy_percent = node["top1_accuracy_percent"].get<double>();
    input.params = node["params"].get<std::int64_t>();
    input.macs = node["macs"].get<std::int64_t>();
    input.source = node["source"].get<std::string>();
    input.mac_convention =
        mac_convention_from_string(node["mac_convention"].get<std::string>());

    auto violations = validate_record(input);
    if (!violations.empty()) {
      problems.push_back("record '" + input.name + "': " + join(violations, "; "));
      continue;
    }
    records.push_back(make_record(input));
  }
  if (!problems.empty()) {
    throw ValidationError("registry validation failed: " + join(problems, " | "));
  }
  return Registry(std::move(records));
}

std::string serialize_registry(const Registry& registry) {
  json records = json::array();
  for (const NetworkRecord& record : registry.records()) {
    records.push_back(json{
        {"name", record.name},
        {"family", record.family},
        {"year", record.year},
        {"top1_accuracy_percent", record.metrics.accuracy_percent()},
        {"params", record.metrics.params()},
        {"macs", record.metrics.macs()},
        {"source", record.source},
        {"mac_convention", std::string(to_string(record.mac_convention))},
    });
  }
  json doc{{"schema_version", Registry::kSchemaVersion}, {"records", std::move(records)}};
  return doc.dump(2) + "\n";
}

Registry merge(const Registry& base, const Registry& overlay, MergePolicy policy) {
  std::vector<NetworkRecord> merged = base.records();
  std::unordered_map<std::string, std::size_t> position;
  position.reserve(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    position.emplace(merged[i].name, i);
  }

  std::vector<std::string> conflicts;
  for (const NetworkRecord& record : overlay.records()) {
    auto it = position.find(record.name);
    if (it == position.end()) {
      position.emplace(record.name, merged.size());
      merged.push_back(record);
    } else if (policy == MergePolicy::overlay_wins) {
      merged[it->second] = record;
    } else {
      conflicts.push_back(record.name);
    }
  }
  if (!conflicts.empty()) {
    throw MergeConflictError("merge conflicts on: " + join(conflicts, ", "));
  }
  return Registry(std::move(merged));
}

}  // namespace netscore

#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netscore/errors.hpp"
#include "netscore/metrics.hpp"

namespace netscore {

/// How the source publication counted computation. Sources that write
/// "FLOPs" but count one multiply-add as one operation are tagged
/// multiply_adds_reported_as_flops; their numbers are MACs as-is.
enum class MacConvention { macs, multiply_adds_reported_as_flops, unknown };

std::string_view to_string(MacConvention convention);
MacConvention mac_convention_from_string(std::string_view name);

/// One row of the comparison set: a named network with its published
/// accuracy/params/MACs and where those numbers came from.
struct NetworkRecord {
  std::string name;
  std::string family;
  int year = 0;
  NetworkMetrics metrics;
  std::string source;
  MacConvention mac_convention = MacConvention::unknown;

  friend bool operator==(const NetworkRecord&, const NetworkRecord&) = default;
};

/// Raw field values before validation; what validate_record checks.
struct RecordInput {
  std::string name;
  std::string family;
  int year = 0;
  double top1_accuracy_percent = 0.0;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  std::string source;
  MacConvention mac_convention = MacConvention::unknown;
};

/// Every violated invariant, not just the first. Empty means valid.
std::vector<std::string> validate_record(const RecordInput& input);

/// Constructs a validated record; throws ValidationError listing all
/// violations otherwise.
NetworkRecord make_record(const RecordInput& input);

/// An immutable, name-unique collection of records in load order.
class Registry {
 public:
  static constexpr int kSchemaVersion = 1;

  Registry() = default;
  explicit Registry(std::vector<NetworkRecord> records);

  const std::vector<NetworkRecord>& records() const { return records_; }
  const NetworkRecord* find(std::string_view name) const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  friend bool operator==(const Registry& a, const Registry& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<NetworkRecord> records_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Parses and validates a registry document (JSON, schema_version 1).
/// An optional top-level "notes" array carries curation commentary and is
/// not part of the data model.
Registry load_registry(std::string_view document);

/// Canonical JSON for a registry; load_registry(serialize_registry(r)) == r.
std::string serialize_registry(const Registry& registry);

enum class MergePolicy { reject_conflicts, overlay_wins };

/// Union of both registries. Name collisions either abort with a
/// MergeConflictError listing every colliding name, or resolve to the
/// overlay's record in the base's position. Inputs are never modified.
Registry merge(const Registry& base, const Registry& overlay, MergePolicy policy);

}  // namespace netscore

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netscore/metrics.hpp"
#include "netscore/registry.hpp"

namespace netscore {

struct RankingEntry {
  int rank = 0;  // competition ranking: tied scores share the smaller rank
  std::string name;
  double value = 0.0;

  friend bool operator==(const RankingEntry&, const RankingEntry&) = default;
};

/// Records ordered by score descending, names ascending on ties. Ranks run
/// 1..n; a tie repeats the rank and the next distinct score skips past it.
struct Ranking {
  MetricKind kind = MetricKind::netscore;
  MetricConfig config;  // meaningful when kind == netscore
  std::vector<RankingEntry> entries;
};

/// Scores one record under the chosen metric at full precision.
double score_record(const NetworkRecord& record, MetricKind kind,
                    const MetricConfig& config = {});

/// Ranks every record in the registry. Deterministic: independent of record
/// input order. Throws ValidationError on an empty registry.
Ranking rank(const Registry& registry, MetricKind kind,
             const MetricConfig& config = {});

struct DynamicRange {
  double max_value = 0.0;
  double min_value = 0.0;
  std::optional<double> ratio;     // max/min, for the linear metrics
  std::optional<double> span_db;   // max - min, for the decibel metric
};

DynamicRange dynamic_range(const Ranking& ranking);

enum class TableFormat { csv, markdown };

/// Renders `rank,name,metric,value` with values to two decimals. Rendering
/// never reorders or rescores; output is byte-deterministic.
std::string emit_table(const Ranking& ranking, TableFormat format);

struct ChartOptions {
  int width = 800;
  enum class Sort { score, name } sort = Sort::score;
  std::string title;  // empty: derived from the metric kind
};

/// One horizontal bar per entry, length proportional to the score. Decibel
/// scores are measured from the ranking minimum so every bar is non-negative;
/// labels always show the actual value. Byte-deterministic SVG 1.1.
std::string emit_bar_chart(const Ranking& ranking, const ChartOptions& options = {});

}  // namespace netscore

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "netscore/errors.hpp"

namespace netscore {

enum class MetricKind { netscore, density, top1 };

std::string_view to_string(MetricKind kind);
MetricKind metric_kind_from_string(std::string_view name);

/// The raw triple a metric consumes: percent top-1 accuracy, parameter count,
/// and multiply-accumulate count for one inference. Construction enforces
/// accuracy in (0, 100] and params, macs >= 1; a zero is always a data error,
/// never a scoreable network.
class NetworkMetrics {
 public:
  NetworkMetrics(double accuracy_percent, std::int64_t params, std::int64_t macs);

  double accuracy_percent() const { return accuracy_percent_; }
  std::int64_t params() const { return params_; }
  std::int64_t macs() const { return macs_; }

  friend bool operator==(const NetworkMetrics&, const NetworkMetrics&) = default;

 private:
  double accuracy_percent_;
  std::int64_t params_;
  std::int64_t macs_;
};

/// Every invariant the triple violates, not just the first. Empty means valid.
std::vector<std::string> metric_violations(double accuracy_percent,
                                           std::int64_t params,
                                           std::int64_t macs);

/// Coefficients weighting accuracy (alpha) against architectural (beta) and
/// computational (gamma) complexity. Defaults favour accuracy twice as
/// strongly as either complexity term. The logarithm base is fixed at 10:
/// scores are decibels.
struct MetricConfig {
  double alpha = 2.0;
  double beta = 0.5;
  double gamma = 0.5;

  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

/// Throws ValidationError unless all coefficients are >= 0 and at least one
/// is nonzero.
void validate_config(const MetricConfig& config);

MetricConfig default_config();

struct Score {
  double value = 0.0;
  MetricKind kind = MetricKind::netscore;

  friend bool operator==(const Score&, const Score&) = default;
};

/// Accuracy in percent, parameters in millions, MACs in billions.
struct NormalizedMetrics {
  double accuracy_percent = 0.0;
  double mparams = 0.0;
  double gmacs = 0.0;
};

NormalizedMetrics normalize_units(const NetworkMetrics& metrics);

/// Accuracy per million parameters, in %/M-Params.
Score information_density(const NetworkMetrics& metrics);

/// 20*log10(a^alpha / (p^beta * m^gamma)) with a in percent, p in M-Params,
/// m in G-MACs. Evaluated in log space so extreme counts cannot overflow.
Score compute_netscore(const NetworkMetrics& metrics, const MetricConfig& config = {});

/// Same formula on already-normalized units. Requires a, mparams, gmacs > 0.
double netscore_value(double accuracy_percent, double mparams, double gmacs,
                      const MetricConfig& config = {});

/// a / mparams on already-normalized units. Requires mparams > 0.
double density_value(double accuracy_percent, double mparams);

}  // namespace netscore

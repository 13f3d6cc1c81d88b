#include "netscore/metrics.hpp"

#include <cmath>
#include <sstream>

namespace netscore {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::netscore: return "netscore";
    case MetricKind::density: return "density";
    case MetricKind::top1: return "top1";
  }
  return "unknown";
}

MetricKind metric_kind_from_string(std::string_view name) {
  if (name == "netscore") return MetricKind::netscore;
  if (name == "density") return MetricKind::density;
  if (name == "top1") return MetricKind::top1;
  throw ValidationError("unknown metric '" + std::string(name) +
                        "' (expected netscore, density, or top1)");
}

std::vector<std::string> metric_violations(double accuracy_percent,
                                           std::int64_t params,
                                           std::int64_t macs) {
  std::vector<std::string> violations;
  if (!std::isfinite(accuracy_percent) || accuracy_percent <= 0.0 ||
      accuracy_percent > 100.0) {
    std::ostringstream os;
    os << "accuracy_percent must be in (0, 100], got " << accuracy_percent;
    violations.push_back(os.str());
  }
  if (params < 1) {
    violations.push_back("params must be >= 1, got " + std::to_string(params));
  }
  if (macs < 1) {
    violations.push_back("macs must be >= 1, got " + std::to_string(macs));
  }
  return violations;
}

NetworkMetrics::NetworkMetrics(double accuracy_percent, std::int64_t params,
                               std::int64_t macs)
    : accuracy_percent_(accuracy_percent), params_(params), macs_(macs) {
  auto violations = metric_violations(accuracy_percent, params, macs);
  if (!violations.empty()) {
    std::string message = "invalid network metrics: " + violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) {
      message += "; " + violations[i];
    }
    throw ValidationError(message);
  }
}

void validate_config(const MetricConfig& config) {
  if (!(config.alpha >= 0.0) || !(config.beta >= 0.0) || !(config.gamma >= 0.0)) {
    throw ValidationError("metric coefficients must be >= 0");
  }
  if (config.alpha == 0.0 && config.beta == 0.0 && config.gamma == 0.0) {
    throw ValidationError("at least one metric coefficient must be nonzero");
  }
}

MetricConfig default_config() { return MetricConfig{}; }

NormalizedMetrics normalize_units(const NetworkMetrics& metrics) {
  return NormalizedMetrics{
      metrics.accuracy_percent(),
      static_cast<double>(metrics.params()) / 1e6,
      static_cast<double>(metrics.macs()) / 1e9,
  };
}

double density_value(double accuracy_percent, double mparams) {
  return accuracy_percent / mparams;
}

Score information_density(const NetworkMetrics& metrics) {
  const NormalizedMetrics n = normalize_units(metrics);
  return Score{density_value(n.accuracy_percent, n.mparams), MetricKind::density};
}

double netscore_value(double accuracy_percent, double mparams, double gmacs,
                      const MetricConfig& config) {
  validate_config(config);
  // 20*(alpha*log10(a) - beta*log10(p) - gamma*log10(m)); identical to the
  // ratio form but immune to overflow for extreme counts.
  return 20.0 * (config.alpha * std::log10(accuracy_percent) -
                 config.beta * std::log10(mparams) -
                 config.gamma * std::log10(gmacs));
}

Score compute_netscore(const NetworkMetrics& metrics, const MetricConfig& config) {
  const NormalizedMetrics n = normalize_units(metrics);
  return Score{netscore_value(n.accuracy_percent, n.mparams, n.gmacs, config),
               MetricKind::netscore};
}

}  // namespace netscore

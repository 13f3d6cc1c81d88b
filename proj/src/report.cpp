#include "netscore/report.hpp"

#include <algorithm>
#include <sstream>

#include "netscore/format.hpp"

namespace netscore {

double score_record(const NetworkRecord& record, MetricKind kind,
                    const MetricConfig& config) {
  switch (kind) {
    case MetricKind::netscore: return compute_netscore(record.metrics, config).value;
    case MetricKind::density: return information_density(record.metrics).value;
    case MetricKind::top1: return record.metrics.accuracy_percent();
  }
  throw ValidationError("unknown metric kind");
}

Ranking rank(const Registry& registry, MetricKind kind, const MetricConfig& config) {
  if (registry.empty()) {
    throw ValidationError("cannot rank an empty registry");
  }
  if (kind == MetricKind::netscore) validate_config(config);

  Ranking ranking;
  ranking.kind = kind;
  ranking.config = config;
  ranking.entries.reserve(registry.size());
  for (const NetworkRecord& record : registry.records()) {
    ranking.entries.push_back(
        RankingEntry{0, record.name, score_record(record, kind, config)});
  }

  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const RankingEntry& a, const RankingEntry& b) {
              if (a.value != b.value) return a.value > b.value;
              return a.name < b.name;
            });

  // Competition ranking: ties on full-precision score share the smaller rank.
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    if (i > 0 && ranking.entries[i].value == ranking.entries[i - 1].value) {
      ranking.entries[i].rank = ranking.entries[i - 1].rank;
    } else {
      ranking.entries[i].rank = static_cast<int>(i) + 1;
    }
  }
  return ranking;
}

DynamicRange dynamic_range(const Ranking& ranking) {
  if (ranking.entries.empty()) {
    throw ValidationError("cannot compute the dynamic range of an empty ranking");
  }
  DynamicRange range;
  range.max_value = ranking.entries.front().value;
  range.min_value = ranking.entries.back().value;
  if (ranking.kind == MetricKind::netscore) {
    range.span_db = range.max_value - range.min_value;
  } else {
    range.ratio = range.max_value / range.min_value;
  }
  return range;
}

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string md_escape(const std::string& field) {
  std::string out;
  for (char c : field) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c; break;
    }
  }
  return out;
}

}  // namespace

std::string emit_table(const Ranking& ranking, TableFormat format) {
  std::ostringstream os;
  const std::string metric{to_string(ranking.kind)};
  if (format == TableFormat::csv) {
    os << "rank,name,metric,value\n";
    for (const RankingEntry& entry : ranking.entries) {
      os << entry.rank << ',' << csv_quote(entry.name) << ',' << metric << ','
         << format_fixed(entry.value, 2) << '\n';
    }
  } else {
    os << "| rank | name | metric | value |\n";
    os << "| ---: | --- | --- | ---: |\n";
    for (const RankingEntry& entry : ranking.entries) {
      os << "| " << entry.rank << " | " << md_escape(entry.name) << " | " << metric
         << " | " << format_fixed(entry.value, 2) << " |\n";
    }
  }
  return os.str();
}

std::string emit_bar_chart(const Ranking& ranking, const ChartOptions& options) {
  constexpr int kRowHeight = 22;
  constexpr int kBarHeight = 14;
  constexpr int kTopMargin = 40;
  constexpr int kBottomMargin = 12;
  constexpr int kLabelWidth = 260;
  constexpr int kValueWidth = 80;

  std::vector<RankingEntry> entries = ranking.entries;
  if (options.sort == ChartOptions::Sort::name) {
    std::sort(entries.begin(), entries.end(),
              [](const RankingEntry& a, const RankingEntry& b) { return a.name < b.name; });
  }

  // Decibel scores can be negative; measure those bars from the minimum.
  double baseline = 0.0;
  if (ranking.kind == MetricKind::netscore && !entries.empty()) {
    baseline = std::min_element(entries.begin(), entries.end(),
                                [](const RankingEntry& a, const RankingEntry& b) {
                                  return a.value < b.value;
                                })
                   ->value;
  }
  double max_length = 0.0;
  for (const RankingEntry& entry : entries) {
    max_length = std::max(max_length, entry.value - baseline);
  }

  const int width = std::max(options.width, kLabelWidth + kValueWidth + 60);
  const double plot_width = width - kLabelWidth - kValueWidth;
  const int height =
      kTopMargin + static_cast<int>(entries.size()) * kRowHeight + kBottomMargin;
  const std::string title =
      options.title.empty() ? std::string(to_string(ranking.kind)) : options.title;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
     << "\">\n";
  if (ranking.kind == MetricKind::netscore && !(ranking.config == MetricConfig{})) {
    os << "<!-- alpha=" << format_fixed(ranking.config.alpha, 2)
       << " beta=" << format_fixed(ranking.config.beta, 2)
       << " gamma=" << format_fixed(ranking.config.gamma, 2) << " -->\n";
  }
  os << "  <title>" << xml_escape(title) << "</title>\n";
  os << "  <text x=\"" << format_fixed(kLabelWidth + plot_width / 2.0, 2)
     << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\""
     << " text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const RankingEntry& entry = entries[i];
    const int row_top = kTopMargin + static_cast<int>(i) * kRowHeight;
    const int text_y = row_top + kBarHeight - 2;
    const double length =
        max_length > 0.0 ? (entry.value - baseline) / max_length * plot_width : 0.0;
    os << "  <text x=\"" << (kLabelWidth - 8) << "\" y=\"" << text_y
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
       << xml_escape(entry.name) << "</text>\n";
    os << "  <rect x=\"" << kLabelWidth << "\" y=\"" << row_top << "\" width=\""
       << format_fixed(length, 2) << "\" height=\"" << kBarHeight
       << "\" fill=\"#4878a8\"/>\n";
    os << "  <text x=\"" << format_fixed(kLabelWidth + length + 4.0, 2) << "\" y=\""
       << text_y << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << format_fixed(entry.value, 2) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace netscore

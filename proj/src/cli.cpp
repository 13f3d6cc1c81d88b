#include "netscore/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "netscore/archspec.hpp"
#include "netscore/format.hpp"
#include "netscore/metrics.hpp"
#include "netscore/registry.hpp"
#include "netscore/report.hpp"

namespace netscore {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

std::int64_t to_count(double value, const std::string& flag) {
  if (!std::isfinite(value) || value < 1.0 ||
      value != std::floor(value) || value > 9.2e18) {
    throw ValidationError(flag + " must be a whole count >= 1, got " +
                          format_fixed(value, 6));
  }
  return static_cast<std::int64_t>(value);
}

std::string config_comment(const MetricConfig& config) {
  return "# alpha=" + format_fixed(config.alpha, 2) +
         " beta=" + format_fixed(config.beta, 2) +
         " gamma=" + format_fixed(config.gamma, 2) + "\n";
}

struct ScoreArgs {
  double accuracy = 0.0;
  std::optional<double> params, macs, params_m, macs_g;
  MetricConfig config;
  std::string metric = "netscore";
};

void run_score(const ScoreArgs& args, std::ostream& out) {
  const bool raw = args.params.has_value() || args.macs.has_value();
  const bool normalized = args.params_m.has_value() || args.macs_g.has_value();
  if (raw && normalized) {
    throw UsageError("--params/--macs cannot be combined with --params-m/--macs-g");
  }
  if (!raw && !normalized) {
    throw UsageError("provide --params and --macs, or --params-m and --macs-g");
  }

  double mparams = 0.0;
  double gmacs = 0.0;
  if (raw) {
    if (!args.params || !args.macs) {
      throw UsageError("--params and --macs must be given together");
    }
    const NetworkMetrics metrics(args.accuracy, to_count(*args.params, "--params"),
                                 to_count(*args.macs, "--macs"));
    const NormalizedMetrics n = normalize_units(metrics);
    mparams = n.mparams;
    gmacs = n.gmacs;
  } else {
    if (!args.params_m || !args.macs_g) {
      throw UsageError("--params-m and --macs-g must be given together");
    }
    if (!(*args.params_m > 0.0) || !(*args.macs_g > 0.0)) {
      throw ValidationError("--params-m and --macs-g must be > 0");
    }
    if (!(args.accuracy > 0.0) || args.accuracy > 100.0) {
      throw ValidationError("--accuracy must be in (0, 100]");
    }
    mparams = *args.params_m;
    gmacs = *args.macs_g;
  }

  if (args.metric == "density") {
    out << format_fixed(density_value(args.accuracy, mparams), 2) << "\n";
    return;
  }
  if (!(args.config == MetricConfig{})) out << config_comment(args.config);
  out << format_fixed(netscore_value(args.accuracy, mparams, gmacs, args.config), 2)
      << "\n";
}

void emit_complexity(const ComplexityReport& report, const std::string& format,
                     std::ostream& out) {
  if (format == "csv") {
    out << "layer,kind,output,params,macs\n";
    for (const LayerComplexity& row : report.per_layer) {
      out << row.id << ',' << to_string(row.kind) << ',' << row.output.to_string()
          << ',' << row.params << ',' << row.macs << '\n';
    }
    out << "total,,," << report.total_params << ',' << report.total_macs << '\n';
  } else {
    out << "| layer | kind | output | params | macs |\n";
    out << "| --- | --- | --- | ---: | ---: |\n";
    for (const LayerComplexity& row : report.per_layer) {
      out << "| " << row.id << " | " << to_string(row.kind) << " | "
          << row.output.to_string() << " | " << row.params << " | " << row.macs
          << " |\n";
    }
    out << "| total |  |  | " << report.total_params << " | " << report.total_macs
        << " |\n";
  }
}

Ranking top_n(Ranking ranking, int top) {
  if (top > 0 && static_cast<std::size_t>(top) < ranking.entries.size()) {
    ranking.entries.resize(static_cast<std::size_t>(top));
  }
  return ranking;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Static efficiency metrics for deep neural networks", "netscore"};
  app.require_subcommand(1);

  ScoreArgs score_args;
  auto* score = app.add_subcommand(
      "score", "Compute the NetScore or information density of one network");
  score->add_option("--accuracy", score_args.accuracy, "Top-1 accuracy in percent")
      ->required();
  score->add_option("--params", score_args.params,
                    "Raw parameter count (scientific notation accepted)");
  score->add_option("--macs", score_args.macs,
                    "Raw MAC count per inference (scientific notation accepted)");
  score->add_option("--params-m", score_args.params_m, "Parameters in millions");
  score->add_option("--macs-g", score_args.macs_g, "MACs in billions");
  score->add_option("--alpha", score_args.config.alpha, "Accuracy exponent")
      ->capture_default_str();
  score->add_option("--beta", score_args.config.beta, "Parameter-count exponent")
      ->capture_default_str();
  score->add_option("--gamma", score_args.config.gamma, "MAC-count exponent")
      ->capture_default_str();
  score->add_option("--metric", score_args.metric, "Metric to compute")
      ->check(CLI::IsMember({"netscore", "density"}))
      ->capture_default_str();

  std::string arch_file;
  std::string analyze_format = "csv";
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Count per-layer parameters and MACs of an architecture file");
  analyze_cmd->add_option("arch-file", arch_file, "Architecture description (JSON)")
      ->required();
  analyze_cmd->add_option("--format", analyze_format, "Output format")
      ->check(CLI::IsMember({"csv", "md"}))
      ->capture_default_str();

  std::string registry_file, rank_metric, rank_format = "csv";
  int top = 0;
  MetricConfig rank_config;
  auto* rank_cmd =
      app.add_subcommand("rank", "Rank every registry record under a metric");
  rank_cmd->add_option("--registry", registry_file, "Registry file (JSON)")->required();
  rank_cmd->add_option("--metric", rank_metric, "Metric to rank by")
      ->check(CLI::IsMember({"netscore", "density", "top1"}))
      ->required();
  rank_cmd->add_option("--top", top, "Keep only the first n entries")
      ->check(CLI::PositiveNumber);
  rank_cmd->add_option("--format", rank_format, "Output format")
      ->check(CLI::IsMember({"csv", "md"}))
      ->capture_default_str();
  rank_cmd->add_option("--alpha", rank_config.alpha, "Accuracy exponent")
      ->capture_default_str();
  rank_cmd->add_option("--beta", rank_config.beta, "Parameter-count exponent")
      ->capture_default_str();
  rank_cmd->add_option("--gamma", rank_config.gamma, "MAC-count exponent")
      ->capture_default_str();

  std::string plot_registry, plot_metric, plot_out, plot_sort = "score";
  int plot_width = 800;
  MetricConfig plot_config;
  auto* plot_cmd = app.add_subcommand("plot", "Render a ranking as an SVG bar chart");
  plot_cmd->add_option("--registry", plot_registry, "Registry file (JSON)")->required();
  plot_cmd->add_option("--metric", plot_metric, "Metric to rank by")
      ->check(CLI::IsMember({"netscore", "density", "top1"}))
      ->required();
  plot_cmd->add_option("--out", plot_out, "Output SVG path")->required();
  plot_cmd->add_option("--sort", plot_sort, "Bar order")
      ->check(CLI::IsMember({"score", "name"}))
      ->capture_default_str();
  plot_cmd->add_option("--width", plot_width, "Chart width in pixels")
      ->check(CLI::Range(120, 10000))
      ->capture_default_str();
  plot_cmd->add_option("--alpha", plot_config.alpha, "Accuracy exponent")
      ->capture_default_str();
  plot_cmd->add_option("--beta", plot_config.beta, "Parameter-count exponent")
      ->capture_default_str();
  plot_cmd->add_option("--gamma", plot_config.gamma, "MAC-count exponent")
      ->capture_default_str();

  std::string validate_registry, validate_arch;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a registry or architecture file");
  validate_cmd->add_option("--registry", validate_registry, "Registry file (JSON)");
  validate_cmd->add_option("--arch", validate_arch, "Architecture file (JSON)");

  auto innermost_help = [&]() -> std::string {
    for (CLI::App* sub : {score, analyze_cmd, rank_cmd, plot_cmd, validate_cmd}) {
      if (sub->parsed()) return sub->help();
    }
    return app.help();
  };

  try {
    // CLI11's vector overload consumes arguments back to front.
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      out << innermost_help();
      return 0;
    }
    err << e.what() << "\n";
    err << "Run with --help for usage.\n";
    return 1;
  }

  try {
    if (score->parsed()) {
      run_score(score_args, out);
    } else if (analyze_cmd->parsed()) {
      const ArchGraph graph = parse_arch(read_file(arch_file));
      emit_complexity(analyze(graph), analyze_format, out);
    } else if (rank_cmd->parsed()) {
      const Registry registry = load_registry(read_file(registry_file));
      const MetricKind kind = metric_kind_from_string(rank_metric);
      const Ranking ranking = top_n(rank(registry, kind, rank_config), top);
      if (kind == MetricKind::netscore && !(rank_config == MetricConfig{})) {
        out << config_comment(rank_config);
      }
      out << emit_table(ranking,
                        rank_format == "md" ? TableFormat::markdown : TableFormat::csv);
    } else if (plot_cmd->parsed()) {
      const Registry registry = load_registry(read_file(plot_registry));
      const MetricKind kind = metric_kind_from_string(plot_metric);
      ChartOptions options;
      options.width = plot_width;
      options.sort = plot_sort == "name" ? ChartOptions::Sort::name
                                         : ChartOptions::Sort::score;
      write_file(plot_out, emit_bar_chart(rank(registry, kind, plot_config), options));
    } else if (validate_cmd->parsed()) {
      const bool has_registry = !validate_registry.empty();
      const bool has_arch = !validate_arch.empty();
      if (has_registry == has_arch) {
        throw UsageError("validate needs exactly one of --registry or --arch");
      }
      if (has_registry) {
        const Registry registry = load_registry(read_file(validate_registry));
        out << "ok: " << registry.size() << " records\n";
      } else {
        const ShapedGraph shaped = infer_shapes(parse_arch(read_file(validate_arch)));
        out << "ok: " << shaped.graph.layers().size() << " layers\n";
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace netscore

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "marketforge/errors.hpp"
#include "marketforge/experiment.hpp"
#include "marketforge/io.hpp"
#include "marketforge/log.hpp"
#include "marketforge/runner.hpp"

namespace {

using namespace marketforge;

std::vector<int> parse_nda_values(const std::string& text) {
  std::vector<int> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const auto dots = token.find("..");
    if (dots != std::string::npos) {
      const int lo = std::stoi(token.substr(0, dots));
      const int hi = std::stoi(token.substr(dots + 2));
      if (lo > hi) throw CLI::ValidationError("--nda", "range has lo > hi");
      for (int v = lo; v <= hi; ++v) values.push_back(v);
    } else {
      values.push_back(std::stoi(token));
    }
  }
  if (values.empty()) throw CLI::ValidationError("--nda", "no values given");
  return values;
}

int do_run(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
           const std::string& format) {
  const std::string config_text = read_text_file(config_path);
  const SimulationConfig config = parse_config(config_text);

  const auto started = std::chrono::steady_clock::now();
  const RunResult result = run(config, seed);
  const double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);

  std::ostringstream steps;
  if (format == "jsonl") {
    write_steps_jsonl(steps, result.steps);
    write_text_file(out / "steps.jsonl", steps.str());
  } else {
    write_steps_csv(steps, result.steps);
    write_text_file(out / "steps.csv", steps.str());
  }

  std::ostringstream agents;
  write_agents_csv(agents, result);
  write_text_file(out / "agents.csv", agents.str());

  if (!result.training_reports.empty()) {
    std::ostringstream training;
    write_training_reports_jsonl(training, result.training_reports);
    write_text_file(out / "training.jsonl", training.str());
  }

  write_text_file(out / "meta.json", run_meta_json(seed, fnv1a_hex(config_text), wall_seconds));

  std::printf("run done: %zu step records, %zu executions, final price %s, %.2fs\n",
              result.steps.size(), result.executions.size(),
              format_double(static_cast<double>(result.final_prices.front()) *
                            result.tick_sizes.front())
                  .c_str(),
              wall_seconds);
  return 0;
}

int do_sweep(const std::string& nda_text, int trials, std::uint64_t seed, long steps, int jobs,
             const std::string& out_dir, const std::string& format) {
  SweepOptions options;
  options.n_da_values = parse_nda_values(nda_text);
  options.trials = trials;
  options.base_seed = seed;
  options.final_session_steps = steps;
  options.jobs = jobs;

  const auto started = std::chrono::steady_clock::now();
  const SweepResult result = run_sweep(options);
  const double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  std::ostringstream rows;
  if (format == "jsonl") {
    write_sweep_jsonl(rows, result);
    write_text_file(out / "sweep.jsonl", rows.str());
  } else {
    write_sweep_csv(rows, result);
    write_text_file(out / "sweep.csv", rows.str());
  }
  write_text_file(out / "meta.json", run_meta_json(seed, "", wall_seconds));

  std::printf("sweep done: %zu rows in %.1fs\n", result.rows.size(), wall_seconds);
  return 0;
}

int do_analyze(const std::string& in_path, const std::string& out_dir) {
  std::istringstream in(read_text_file(in_path));
  const SweepResult result = read_sweep_csv(in);
  const SweepAnalysis analysis = analyze_sweep(result);
  std::fputs(analysis.table.c_str(), stdout);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text_file(std::filesystem::path(out_dir) / "regression.txt", analysis.table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marketforge: deterministic continuous double auction market simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::string format = "csv";
  auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--seed", seed, "run seed");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--format", format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  std::string nda_text = "1..20";
  int trials = 10;
  long steps = 1000;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  auto* sweep_cmd =
      app.add_subcommand("sweep", "population sweep of deep vs stylized agents");
  sweep_cmd->add_option("--nda", nda_text, "deep-agent counts, e.g. 1..20 or 1,5,10");
  sweep_cmd->add_option("--trials", trials, "trials per count")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", seed, "base seed");
  sweep_cmd->add_option("--steps", steps, "final trading session length")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--format", format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  std::string in_path;
  std::string analyze_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "regress sweep profits on n_da");
  analyze_cmd->add_option("--in", in_path, "sweep.csv")->required();
  analyze_cmd->add_option("--out", analyze_out, "directory for regression.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run_cmd) return do_run(config_path, seed, out_dir, format);
    if (*sweep_cmd) return do_sweep(nda_text, trials, seed, steps, jobs, out_dir, format);
    if (*analyze_cmd) return do_analyze(in_path, analyze_out);
  } catch (const marketforge::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_config_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 1;
}

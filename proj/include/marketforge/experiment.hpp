#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marketforge/config.hpp"
#include "marketforge/runner.hpp"
#include "marketforge/stats.hpp"

namespace marketforge {

// One sweep cell: a full run with n_da deep agents out of 100, profits
// aggregated per agent type. Profit columns are absent when the type has
// no agents in the cell.
struct SweepRow {
  int n_da = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> avg_profit_deep;
  double avg_profit_stylized = 0.0;
  std::optional<double> var_profit_deep;
  double var_profit_stylized = 0.0;
  double final_price = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  std::vector<int> n_da_values;
  int trials = 10;
  std::uint64_t base_seed = 42;
  // Length of the extra trading session appended to the CI2002 template so
  // learning agents see enough history before acting.
  long final_session_steps = 1000;
  int jobs = 1;
};

// The Fig.-2-style baseline: one market (tick 1e-5, price 300), 100 FCN
// agents, sessions 100 (no execution) + 500 (execution).
SimulationConfig ci2002_config();

// Baseline plus a third execution session of the given length.
SimulationConfig sweep_template_config(long final_session_steps = 1000);

// Replaces n_da of the template's 100 FCN agents with deep agents
// (assetVolume 0, so the +/-1 position clamp holds from the start).
SimulationConfig sweep_cell_config(SimulationConfig config, int n_da);

// Mark-to-market profit of one agent: (cash + position * p_final) -
// (initial cash + initial position * p_initial). Exact in cash units.
std::int64_t profit_units(const AgentSnapshot& agent,
                          std::span<const std::int64_t> final_prices,
                          std::span<const std::int64_t> initial_prices,
                          std::span<const std::int64_t> price_multipliers);
double profit(const AgentSnapshot& agent, const RunResult& result);  // currency

// Per-type profit aggregation of one finished run into a sweep row.
SweepRow summarize_run(const RunResult& result, int n_da, int trial);

SweepRow run_sweep_cell(const SimulationConfig& config_template, int n_da, int trial,
                        std::uint64_t base_seed);

// Runs every (n_da, trial) cell on seed derive(base_seed, n_da, trial).
// Cells are independent; `jobs` of them run concurrently, and rows come
// back ordered by (n_da, trial) either way.
SweepResult run_sweep(const SweepOptions& options, const SimulationConfig& config_template);
SweepResult run_sweep(const SweepOptions& options);

struct SweepAnalysis {
  OlsFit deep;
  OlsFit stylized;
  std::string table;  // Table-style text: intercept, coefficient, stars, R^2
};

// Regresses per-type average profit on n_da across all rows.
SweepAnalysis analyze_sweep(const SweepResult& result);

}  // namespace marketforge

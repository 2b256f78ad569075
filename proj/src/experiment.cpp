#include "marketforge/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "marketforge/errors.hpp"

namespace marketforge {

namespace {

constexpr const char* kCi2002Json = R"json({
  "simulation": {
    "markets": ["Market"],
    "agents": ["FCNAgents"],
    "sessions": [
      { "sessionName": 0,
        "iterationSteps": 100,
        "withOrderPlacement": true,
        "withOrderExecution": false,
        "withPrint": true,
        "hiFrequencySubmitRate": 1.0
      },
      { "sessionName": 1,
        "iterationSteps": 500,
        "withOrderPlacement": true,
        "withOrderExecution": true,
        "withPrint": true
      }
    ]
  },
  "Market": {
    "class": "Market",
    "tickSize": 0.00001,
    "marketPrice": 300.0
  },
  "FCNAgents": {
    "class": "FCNAgent",
    "numAgents": 100,
    "markets": ["Market"],
    "assetVolume": 50,
    "cashAmount": 10000,
    "fundamentalWeight": {"expon": [1.0]},
    "chartWeight": {"expon": [0.0]},
    "noiseWeight": {"expon": [1.0]},
    "meanReversionTime": {"uniform": [50, 100]},
    "noiseScale": 0.001,
    "timeWindowSize": [100, 200],
    "orderMargin": [0.0, 0.1]
  }
})json";

}  // namespace

SimulationConfig ci2002_config() { return parse_config(kCi2002Json); }

SimulationConfig sweep_template_config(long final_session_steps) {
  SimulationConfig config = ci2002_config();
  for (auto& session : config.sessions) session.with_print = false;
  SessionConfig trading;
  trading.name = "2";
  trading.iteration_steps = final_session_steps;
  trading.with_order_placement = true;
  trading.with_order_execution = true;
  config.sessions.push_back(trading);
  return config;
}

SimulationConfig sweep_cell_config(SimulationConfig config, int n_da) {
  if (n_da < 0) raise(Errc::bad_range, "n_da must be >= 0");
  AgentGroupConfig* fcn_group = nullptr;
  for (auto& group : config.agent_groups)
    if (group.class_name == "FCNAgent") {
      if (fcn_group != nullptr) raise(Errc::bad_range, "template must have one FCN group");
      fcn_group = &group;
    }
  if (fcn_group == nullptr) raise(Errc::missing_key, "template has no FCN group");
  if (n_da > fcn_group->num_agents)
    raise(Errc::bad_range, "n_da exceeds the template's agent count");
  if (n_da == 0) return config;

  AgentGroupConfig deep;
  deep.name = "DeepAgents";
  deep.class_name = "DeepAgent";
  deep.num_agents = n_da;
  deep.markets = fcn_group->markets;
  deep.asset_volume = RandomSpec::constant(0);  // the position clamp starts satisfied
  deep.cash_amount = fcn_group->cash_amount;

  if (n_da == fcn_group->num_agents) {
    for (auto it = config.agent_groups.begin(); it != config.agent_groups.end(); ++it)
      if (&*it == fcn_group) {
        config.agent_groups.erase(it);
        break;
      }
  } else {
    fcn_group->num_agents -= n_da;
  }
  config.agent_groups.push_back(std::move(deep));
  return config;
}

std::int64_t profit_units(const AgentSnapshot& agent,
                          std::span<const std::int64_t> final_prices,
                          std::span<const std::int64_t> initial_prices,
                          std::span<const std::int64_t> price_multipliers) {
  std::int64_t value = agent.cash_units - agent.initial_cash_units;
  for (std::size_t m = 0; m < final_prices.size(); ++m) {
    value += agent.position[m] * final_prices[m] * price_multipliers[m];
    value -= agent.initial_position[m] * initial_prices[m] * price_multipliers[m];
  }
  return value;
}

double profit(const AgentSnapshot& agent, const RunResult& result) {
  return static_cast<double>(profit_units(agent, result.final_prices, result.initial_prices,
                                          result.price_multipliers)) *
         result.cash_unit;
}

namespace {

struct ProfitStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
};

ProfitStats profit_stats(const RunResult& result, bool deep) {
  std::vector<double> profits;
  for (const auto& agent : result.agents) {
    const bool is_deep = agent.class_name == "DeepAgent";
    if (is_deep == deep) profits.push_back(profit(agent, result));
  }
  ProfitStats stats;
  stats.count = profits.size();
  if (profits.empty()) return stats;
  for (const double p : profits) stats.mean += p;
  stats.mean /= static_cast<double>(profits.size());
  for (const double p : profits) stats.variance += (p - stats.mean) * (p - stats.mean);
  stats.variance /= static_cast<double>(profits.size());
  return stats;
}

}  // namespace

SweepRow summarize_run(const RunResult& result, int n_da, int trial) {
  SweepRow row;
  row.n_da = n_da;
  row.trial = trial;
  row.seed = result.seed;
  const ProfitStats deep = profit_stats(result, true);
  const ProfitStats stylized = profit_stats(result, false);
  if (deep.count > 0) {
    row.avg_profit_deep = deep.mean;
    row.var_profit_deep = deep.variance;
  }
  row.avg_profit_stylized = stylized.mean;
  row.var_profit_stylized = stylized.variance;
  row.final_price = static_cast<double>(result.final_prices.front()) * result.tick_sizes.front();
  return row;
}

SweepRow run_sweep_cell(const SimulationConfig& config_template, int n_da, int trial,
                        std::uint64_t base_seed) {
  const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(n_da),
                                         static_cast<std::uint64_t>(trial));
  const SimulationConfig config = sweep_cell_config(config_template, n_da);
  return summarize_run(run(config, seed), n_da, trial);
}

SweepResult run_sweep(const SweepOptions& options, const SimulationConfig& config_template) {
  if (options.n_da_values.empty()) raise(Errc::bad_range, "sweep needs n_da values");
  if (options.trials < 1) raise(Errc::bad_range, "sweep needs at least one trial");

  struct Cell {
    int n_da;
    int trial;
  };
  std::vector<Cell> cells;
  for (const int n_da : options.n_da_values)
    for (int trial = 0; trial < options.trials; ++trial) cells.push_back({n_da, trial});

  SweepResult result;
  result.rows.resize(cells.size());

  const int jobs = std::max(1, options.jobs);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= cells.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const Cell cell = cells[index];
      try {
        result.rows[index] =
            run_sweep_cell(config_template, cell.n_da, cell.trial, options.base_seed);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error)
          first_error = std::make_exception_ptr(
              Error(Errc::simulation_aborted,
                    "sweep cell (n_da=" + std::to_string(cell.n_da) +
                        ", trial=" + std::to_string(cell.trial) + "): " + e.what()));
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

SweepResult run_sweep(const SweepOptions& options) {
  return run_sweep(options, sweep_template_config(options.final_session_steps));
}

namespace {

std::string format_cell(double estimate, double p) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f%s", estimate, significance_stars(p));
  return buffer;
}

std::string format_r2(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

}  // namespace

SweepAnalysis analyze_sweep(const SweepResult& result) {
  std::vector<double> x_deep, y_deep, x_stylized, y_stylized;
  for (const auto& row : result.rows) {
    if (row.avg_profit_deep) {
      x_deep.push_back(static_cast<double>(row.n_da));
      y_deep.push_back(*row.avg_profit_deep);
    }
    x_stylized.push_back(static_cast<double>(row.n_da));
    y_stylized.push_back(row.avg_profit_stylized);
  }

  SweepAnalysis analysis;
  try {
    analysis.deep = ols_fit(x_deep, y_deep);
    analysis.stylized = ols_fit(x_stylized, y_stylized);
  } catch (const Error& e) {
    if (e.code() == Errc::degenerate_x)
      raise(Errc::degenerate_x,
            "regression needs at least two distinct n_da values in the sweep");
    throw;
  }

  char line[200];
  std::string table;
  std::snprintf(line, sizeof(line), "%-18s %-18s %-18s\n", "Metrics \\ Agents", "Deep Agents",
                "Stylized Agents");
  table += line;
  std::snprintf(line, sizeof(line), "%-18s %-18s %-18s\n", "Intercept",
                format_cell(analysis.deep.intercept, analysis.deep.intercept_p).c_str(),
                format_cell(analysis.stylized.intercept, analysis.stylized.intercept_p).c_str());
  table += line;
  std::snprintf(line, sizeof(line), "%-18s %-18s %-18s\n", "Coefficient",
                format_cell(analysis.deep.slope, analysis.deep.slope_p).c_str(),
                format_cell(analysis.stylized.slope, analysis.stylized.slope_p).c_str());
  table += line;
  std::snprintf(line, sizeof(line), "%-18s %-18s %-18s\n", "R^2",
                format_r2(analysis.deep.r_squared).c_str(),
                format_r2(analysis.stylized.r_squared).c_str());
  table += line;
  std::snprintf(line, sizeof(line), "%-18s %-18s %-18s\n", "Adjusted R^2",
                format_r2(analysis.deep.adjusted_r_squared).c_str(),
                format_r2(analysis.stylized.adjusted_r_squared).c_str());
  table += line;
  analysis.table = table;
  return analysis;
}

}  // namespace marketforge

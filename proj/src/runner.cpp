#include "marketforge/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "marketforge/errors.hpp"
#include "marketforge/log.hpp"

namespace marketforge {

std::vector<std::size_t> select_agents(Rng& rng, std::size_t n_select, std::size_t agent_count) {
  if (n_select < 1 || n_select > agent_count)
    raise(Errc::bad_selection_count, "need 1 <= n_select <= agent_count");
  std::vector<std::size_t> pool(agent_count);
  std::iota(pool.begin(), pool.end(), 0);
  // partial Fisher-Yates: exactly n_select draws, without replacement
  for (std::size_t i = 0; i < n_select; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(agent_count) - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n_select);
  return pool;
}

namespace {

double compute_cash_unit(const SimulationConfig& config) {
  double unit = config.markets.front().tick_size;
  for (const auto& mc : config.markets) unit = std::min(unit, mc.tick_size);
  for (const auto& mc : config.markets) {
    const double ratio = mc.tick_size / unit;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      raise(Errc::bad_range,
            "tick sizes are not commensurable; exact cash accounting is impossible");
  }
  return unit;
}

}  // namespace

Simulator build_simulator(const SimulationConfig& config, std::uint64_t seed, Rng& rng,
                          const ClassRegistry& registry) {
  if (config.markets.empty()) raise(Errc::missing_key, "config has no markets");
  if (config.agent_groups.empty()) raise(Errc::bad_range, "config has no agents");

  Simulator sim;
  sim.cash_unit = compute_cash_unit(config);
  for (std::size_t i = 0; i < config.markets.size(); ++i) {
    const auto& mc = config.markets[i];
    const auto resolved = registry.resolve(mc.class_name);
    sim.markets.push_back(resolved.market->factory(mc, static_cast<int>(i)));
    sim.price_multipliers.push_back(std::llround(mc.tick_size / sim.cash_unit));
  }

  int agent_id = 0;
  for (const auto& group : config.agent_groups) {
    const auto resolved = registry.resolve(group.class_name);
    std::vector<int> market_ids;
    for (const auto& name : group.markets) market_ids.push_back(config.market_index(name));
    for (int i = 0; i < group.num_agents; ++i, ++agent_id) {
      AgentBuildContext ctx{group,          agent_id, market_ids,
                            sim.markets,    sim.cash_unit,
                            rng,            derive_seed(seed, static_cast<std::uint64_t>(agent_id))};
      sim.agents.push_back(resolved.agent->factory(ctx));
    }
  }
  return sim;
}

namespace {

void settle(Simulator& sim, const Execution& exec) {
  const std::int64_t multiplier = sim.price_multipliers[static_cast<std::size_t>(exec.market_id)];
  apply_execution(sim.agents[static_cast<std::size_t>(exec.buy_agent_id)]->state(), exec,
                  Side::buy, multiplier);
  apply_execution(sim.agents[static_cast<std::size_t>(exec.sell_agent_id)]->state(), exec,
                  Side::sell, multiplier);
}

void run_sessions(const SimulationConfig& config, Simulator& sim, Rng& rng, Logger& logger,
                  RunResult& result) {
  for (const auto& session : config.sessions) {
    logger.on_session_begin(session);
    if (session.with_print)
      std::printf("session %s: %ld steps, placement=%d, execution=%d\n", session.name.c_str(),
                  session.iteration_steps, session.with_order_placement ? 1 : 0,
                  session.with_order_execution ? 1 : 0);

    const auto n_select = static_cast<std::size_t>(
        session.num_step_agents ? *session.num_step_agents : config.num_step_agents);
    long session_executions = 0;

    for (long step = 0; step < session.iteration_steps; ++step) {
      const auto selected = select_agents(rng, n_select, sim.agents.size());
      for (const std::size_t index : selected) {
        Agent& agent = *sim.agents[index];
        const auto& market_ids = agent.market_ids();
        const int market_id =
            market_ids.size() > 1
                ? market_ids[static_cast<std::size_t>(
                      rng.uniform_int(0, static_cast<std::int64_t>(market_ids.size()) - 1))]
                : market_ids.front();
        Market& market = sim.markets[static_cast<std::size_t>(market_id)];

        TurnView view{market, session.with_order_placement, session.with_order_execution};
        std::vector<Order> orders = agent.on_turn(view, rng);
        if (!session.with_order_placement) continue;  // polled, orders discarded

        for (Order& order : orders) {
          Market& target = sim.markets[static_cast<std::size_t>(order.market_id)];
          const auto fills = target.submit_order(order, session.with_order_execution);
          logger.on_order(order);
          for (const Execution& exec : fills) {
            settle(sim, exec);
            result.executions.push_back(exec);
            logger.on_execution(exec);
            ++session_executions;
          }
        }
      }

      for (Market& market : sim.markets) {
        market.expire_orders(market.time());
        StepLogRecord record = market.step_summary(session.name);
        result.steps.push_back(record);
        logger.on_market_step(record);
        market.advance_step();
      }
    }

    if (session.with_print)
      std::printf("session %s done: %ld executions, price %.8g\n", session.name.c_str(),
                  session_executions,
                  static_cast<double>(sim.markets.front().market_price()) *
                      sim.markets.front().tick_size());
    logger.on_session_end(session);
  }
}

}  // namespace

RunResult run(const SimulationConfig& config, std::uint64_t seed, Logger* logger,
              const ClassRegistry& registry) {
  Logger null_logger;
  Logger& log = logger ? *logger : null_logger;

  Rng rng(seed);
  Simulator sim = build_simulator(config, seed, rng, registry);

  RunResult result;
  result.seed = seed;
  result.cash_unit = sim.cash_unit;
  result.price_multipliers = sim.price_multipliers;
  for (const Market& market : sim.markets) {
    result.tick_sizes.push_back(market.tick_size());
    result.initial_prices.push_back(market.market_price());
  }

  try {
    log.on_simulation_begin(sim);
    run_sessions(config, sim, rng, log, result);
    log.on_simulation_end(sim);
  } catch (const std::exception& e) {
    const long step = sim.markets.empty() ? -1 : sim.markets.front().time();
    raise(Errc::simulation_aborted, "step " + std::to_string(step) + ": " + e.what());
  }

  for (const Market& market : sim.markets) result.final_prices.push_back(market.market_price());
  for (const auto& agent : sim.agents) {
    AgentSnapshot snap;
    snap.agent_id = agent->state().agent_id;
    snap.group = agent->group();
    snap.class_name = agent->class_name();
    snap.cash_unit = agent->state().cash_unit;
    snap.cash_units = agent->state().cash_units;
    snap.initial_cash_units = agent->state().initial_cash_units;
    snap.position = agent->state().position;
    snap.initial_position = agent->state().initial_position;
    result.agents.push_back(std::move(snap));

    if (const auto* deep = dynamic_cast<const DeepAgent*>(agent.get())) {
      const auto reports = deep->reports();
      result.training_reports.insert(result.training_reports.end(), reports.begin(),
                                     reports.end());
    }
  }
  return result;
}

}  // namespace marketforge

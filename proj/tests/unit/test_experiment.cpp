#include <doctest.h>

#include <set>
#include <sstream>

#include "marketforge/errors.hpp"
#include "marketforge/experiment.hpp"
#include "marketforge/io.hpp"

using namespace marketforge;

TEST_CASE("sweep seeds are distinct across the whole grid") {
  std::set<std::uint64_t> seeds;
  for (int n_da = 0; n_da <= 20; ++n_da)
    for (int trial = 0; trial < 10; ++trial)
      seeds.insert(derive_seed(42, static_cast<std::uint64_t>(n_da),
                               static_cast<std::uint64_t>(trial)));
  CHECK(seeds.size() == 21 * 10);
}

TEST_CASE("profit arithmetic on hand-built snapshots") {
  AgentSnapshot agent;
  agent.cash_unit = 1e-5;
  agent.cash_units = 1000000000;  // 10000.0
  agent.initial_cash_units = 1000000000;
  agent.position = {50};
  agent.initial_position = {50};

  const std::vector<std::int64_t> multipliers = {1};
  // unchanged holdings, unchanged price
  const std::vector<std::int64_t> p300 = {30000000};
  CHECK(profit_units(agent, p300, p300, multipliers) == 0);

  // bought one share at 300: cash down 300, position up 1, price ends at 310
  agent.cash_units -= 30000000;
  agent.position = {51};
  const std::vector<std::int64_t> p310 = {31000000};
  const std::int64_t units = profit_units(agent, p310, p300, multipliers);
  CHECK(units == 1000000 + 50 * 1000000);  // own trade +10, inventory 50 x 10

  AgentSnapshot flat = agent;
  flat.position = {50};
  flat.cash_units = agent.initial_cash_units;
  CHECK(profit_units(flat, p310, p300, multipliers) == 50 * 1000000);
}

TEST_CASE("cell configs keep the agent-count identity") {
  const SimulationConfig base = sweep_template_config(400);
  const SimulationConfig five = sweep_cell_config(base, 5);
  REQUIRE(five.agent_groups.size() == 2);
  CHECK(five.agent_groups[0].num_agents == 95);
  CHECK(five.agent_groups[1].class_name == "DeepAgent");
  CHECK(five.agent_groups[1].num_agents == 5);
  CHECK(five.agent_groups[1].asset_volume == RandomSpec::constant(0));

  const SimulationConfig zero = sweep_cell_config(base, 0);
  CHECK(zero == base);

  const SimulationConfig all = sweep_cell_config(base, 100);
  REQUIRE(all.agent_groups.size() == 1);
  CHECK(all.agent_groups[0].class_name == "DeepAgent");

  CHECK_THROWS_AS(sweep_cell_config(base, 101), Error);
  CHECK_THROWS_AS(sweep_cell_config(base, -1), Error);
}

TEST_CASE("tiny sweeps are deterministic and independent of the job count") {
  SweepOptions options;
  options.n_da_values = {0, 1};
  options.trials = 2;
  options.base_seed = 5;
  options.final_session_steps = 50;  // too short for training: cheap cells
  options.jobs = 1;

  const SweepResult sequential = run_sweep(options);
  REQUIRE(sequential.rows.size() == 4);
  CHECK(sequential.rows[0].n_da == 0);
  CHECK_FALSE(sequential.rows[0].avg_profit_deep.has_value());
  CHECK(sequential.rows[2].n_da == 1);
  CHECK(sequential.rows[2].trial == 0);

  options.jobs = 2;
  const SweepResult parallel = run_sweep(options);
  REQUIRE(parallel.rows.size() == sequential.rows.size());
  for (std::size_t i = 0; i < parallel.rows.size(); ++i) {
    CHECK(parallel.rows[i].seed == sequential.rows[i].seed);
    CHECK(parallel.rows[i].avg_profit_stylized == sequential.rows[i].avg_profit_stylized);
    CHECK(parallel.rows[i].final_price == sequential.rows[i].final_price);
  }
}

TEST_CASE("analysis recovers an exact synthetic linear rule") {
  SweepResult synthetic;
  for (int n_da = 1; n_da <= 10; ++n_da) {
    for (int trial = 0; trial < 3; ++trial) {
      SweepRow row;
      row.n_da = n_da;
      row.trial = trial;
      row.avg_profit_deep = 22.5 - 0.26 * n_da;
      row.avg_profit_stylized = -0.03 - 0.21 * n_da;
      synthetic.rows.push_back(row);
    }
  }
  const SweepAnalysis analysis = analyze_sweep(synthetic);
  CHECK(analysis.deep.intercept == doctest::Approx(22.5).epsilon(1e-12));
  CHECK(analysis.deep.slope == doctest::Approx(-0.26).epsilon(1e-12));
  CHECK(analysis.stylized.intercept == doctest::Approx(-0.03).epsilon(1e-12));
  CHECK(analysis.stylized.slope == doctest::Approx(-0.21).epsilon(1e-12));
  CHECK(analysis.table.find("Intercept") != std::string::npos);
  CHECK(analysis.table.find("***") != std::string::npos);
  CHECK(analysis.table.find("Adjusted R^2") != std::string::npos);
}

TEST_CASE("a single n_da value surfaces DegenerateX with guidance") {
  SweepResult flat;
  for (int trial = 0; trial < 5; ++trial) {
    SweepRow row;
    row.n_da = 7;
    row.trial = trial;
    row.avg_profit_deep = 1.0;
    row.avg_profit_stylized = -1.0;
    flat.rows.push_back(row);
  }
  try {
    analyze_sweep(flat);
    FAIL("expected DegenerateX");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_x);
    CHECK(std::string(e.what()).find("n_da") != std::string::npos);
  }
}

TEST_CASE("csv and jsonl emit identical values for the same records") {
  const RunResult result = run(ci2002_config(), 42);
  std::ostringstream csv, jsonl;
  write_steps_csv(csv, std::span(result.steps).subspan(0, 5));
  write_steps_jsonl(jsonl, std::span(result.steps).subspan(0, 5));

  std::istringstream csv_in(csv.str()), jsonl_in(jsonl.str());
  std::string csv_line, jsonl_line;
  std::getline(csv_in, csv_line);  // header
  while (std::getline(csv_in, csv_line) && std::getline(jsonl_in, jsonl_line)) {
    const auto j = nlohmann::json::parse(jsonl_line);
    std::vector<std::string> fields;
    std::string field;
    for (const char c : csv_line) {
      if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    fields.push_back(field);
    REQUIRE(fields.size() == 9);
    CHECK(std::to_string(j["step"].get<long>()) == fields[0]);
    CHECK(j["session"].get<std::string>() == fields[1]);
    CHECK(format_double(j["market_price"].get<double>()) == fields[3]);
    if (fields[5].empty()) {
      CHECK(j["best_bid"].is_null());
    } else {
      CHECK(format_double(j["best_bid"].get<double>()) == fields[5]);
    }
    CHECK(std::to_string(j["executed_volume"].get<long>()) == fields[7]);
  }
}

TEST_CASE("empty record lists emit a header-only file") {
  std::ostringstream out;
  write_steps_csv(out, {});
  CHECK(out.str() ==
        "step,session,market_id,market_price,fundamental_price,best_bid,best_ask,"
        "executed_volume,execution_count\n");
}

TEST_CASE("sweep csv round-trips through the reader") {
  SweepResult result;
  SweepRow row;
  row.n_da = 3;
  row.trial = 1;
  row.seed = 123456789;
  row.avg_profit_deep = 12.25;
  row.avg_profit_stylized = -0.75;
  row.var_profit_deep = 2.5;
  row.var_profit_stylized = 0.125;
  row.final_price = 300.00001;
  result.rows.push_back(row);
  SweepRow control;
  control.n_da = 0;
  control.trial = 0;
  control.seed = 42;
  control.avg_profit_stylized = 0.5;
  control.var_profit_stylized = 1.0;
  control.final_price = 299.5;
  result.rows.push_back(control);

  std::ostringstream out;
  write_sweep_csv(out, result);
  std::istringstream in(out.str());
  const SweepResult read = read_sweep_csv(in);
  REQUIRE(read.rows.size() == 2);
  CHECK(read.rows[0].avg_profit_deep == 12.25);
  CHECK(read.rows[0].seed == 123456789);
  CHECK(read.rows[0].final_price == 300.00001);
  CHECK_FALSE(read.rows[1].avg_profit_deep.has_value());
  CHECK(read.rows[1].avg_profit_stylized == 0.5);
}

TEST_CASE("format_double survives a parse round trip on awkward values") {
  for (const double v : {300.00001, 0.1, 1.0 / 3.0, 294.39770000000004, 1e-12, -42.5}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

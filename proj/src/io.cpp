#include "marketforge/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "marketforge/errors.hpp"

namespace marketforge {

std::string format_double(double value) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

namespace {

std::string currency(std::int64_t ticks, double tick_size) {
  return format_double(static_cast<double>(ticks) * tick_size);
}

std::string json_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

void write_steps_csv(std::ostream& out, std::span<const StepLogRecord> records) {
  out << "step,session,market_id,market_price,fundamental_price,best_bid,best_ask,"
         "executed_volume,execution_count\n";
  for (const auto& rec : records) {
    out << rec.step << ',' << rec.session << ',' << rec.market_id << ','
        << currency(rec.market_price, rec.tick_size) << ','
        << currency(rec.fundamental_price, rec.tick_size) << ',';
    if (rec.best_bid) out << currency(*rec.best_bid, rec.tick_size);
    out << ',';
    if (rec.best_ask) out << currency(*rec.best_ask, rec.tick_size);
    out << ',' << rec.executed_volume << ',' << rec.execution_count << '\n';
  }
}

void write_steps_jsonl(std::ostream& out, std::span<const StepLogRecord> records) {
  for (const auto& rec : records) {
    out << "{\"step\":" << rec.step << ",\"session\":\"" << json_escape(rec.session)
        << "\",\"market_id\":" << rec.market_id
        << ",\"market_price\":" << currency(rec.market_price, rec.tick_size)
        << ",\"fundamental_price\":" << currency(rec.fundamental_price, rec.tick_size)
        << ",\"best_bid\":" << (rec.best_bid ? currency(*rec.best_bid, rec.tick_size) : "null")
        << ",\"best_ask\":" << (rec.best_ask ? currency(*rec.best_ask, rec.tick_size) : "null")
        << ",\"executed_volume\":" << rec.executed_volume
        << ",\"execution_count\":" << rec.execution_count << "}\n";
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "n_da,trial,seed,avg_profit_deep,avg_profit_stylized,var_profit_deep,"
         "var_profit_stylized,final_price\n";
  for (const auto& row : result.rows) {
    out << row.n_da << ',' << row.trial << ',' << row.seed << ',';
    if (row.avg_profit_deep) out << format_double(*row.avg_profit_deep);
    out << ',' << format_double(row.avg_profit_stylized) << ',';
    if (row.var_profit_deep) out << format_double(*row.var_profit_deep);
    out << ',' << format_double(row.var_profit_stylized) << ','
        << format_double(row.final_price) << '\n';
  }
}

void write_sweep_jsonl(std::ostream& out, const SweepResult& result) {
  for (const auto& row : result.rows) {
    out << "{\"n_da\":" << row.n_da << ",\"trial\":" << row.trial << ",\"seed\":" << row.seed
        << ",\"avg_profit_deep\":"
        << (row.avg_profit_deep ? format_double(*row.avg_profit_deep) : "null")
        << ",\"avg_profit_stylized\":" << format_double(row.avg_profit_stylized)
        << ",\"var_profit_deep\":"
        << (row.var_profit_deep ? format_double(*row.var_profit_deep) : "null")
        << ",\"var_profit_stylized\":" << format_double(row.var_profit_stylized)
        << ",\"final_price\":" << format_double(row.final_price) << "}\n";
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text) { return std::strtod(text.c_str(), nullptr); }

}  // namespace

SweepResult read_sweep_csv(std::istream& in) {
  SweepResult result;
  std::string line;
  if (!std::getline(in, line)) raise(Errc::io_failure, "empty sweep file");
  const auto header = split_csv_line(line);
  if (header.size() != 8 || header[0] != "n_da")
    raise(Errc::io_failure, "unrecognized sweep CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 8) raise(Errc::io_failure, "malformed sweep CSV row");
    SweepRow row;
    row.n_da = std::atoi(fields[0].c_str());
    row.trial = std::atoi(fields[1].c_str());
    row.seed = std::strtoull(fields[2].c_str(), nullptr, 10);
    if (!fields[3].empty()) row.avg_profit_deep = parse_double(fields[3]);
    row.avg_profit_stylized = parse_double(fields[4]);
    if (!fields[5].empty()) row.var_profit_deep = parse_double(fields[5]);
    row.var_profit_stylized = parse_double(fields[6]);
    row.final_price = parse_double(fields[7]);
    result.rows.push_back(row);
  }
  return result;
}

void write_training_reports_jsonl(std::ostream& out, std::span<const TrainingReport> reports) {
  for (const auto& report : reports) {
    out << "{\"agent_id\":" << report.agent_id << ",\"trained_at\":" << report.trained_at
        << ",\"train_size\":" << report.train_size
        << ",\"holdout_accuracy\":" << format_double(report.holdout_accuracy)
        << ",\"gate_passed\":" << (report.gate_passed ? "true" : "false")
        << ",\"max_label_step\":" << report.max_label_step << "}\n";
  }
}

void write_agents_csv(std::ostream& out, const RunResult& result) {
  out << "agent_id,group,class,initial_cash,cash,positions,profit\n";
  for (const auto& agent : result.agents) {
    out << agent.agent_id << ',' << agent.group << ',' << agent.class_name << ','
        << format_double(agent.initial_cash()) << ',' << format_double(agent.cash()) << ',';
    for (std::size_t m = 0; m < agent.position.size(); ++m) {
      if (m > 0) out << ';';
      out << agent.position[m];
    }
    out << ',' << format_double(profit(agent, result)) << '\n';
  }
}

std::string run_meta_json(std::uint64_t seed, std::string_view config_digest,
                          double wall_seconds) {
  std::ostringstream out;
  out << "{\"seed\":" << seed << ",\"config_digest\":\"" << config_digest << "\",\"version\":\""
      << kVersion << "\",\"wall_seconds\":" << format_double(wall_seconds) << "}\n";
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_failure, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) raise(Errc::io_failure, "write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_failure, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace marketforge

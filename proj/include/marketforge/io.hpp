#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "marketforge/experiment.hpp"
#include "marketforge/runner.hpp"

namespace marketforge {

// Shortest round-trip decimal representation.
std::string format_double(double value);

// FNV-1a 64-bit hex digest, used to fingerprint config files in run metadata.
std::string fnv1a_hex(std::string_view text);

// Step log, CSV columns: step, session, market_id, market_price,
// fundamental_price, best_bid, best_ask, executed_volume, execution_count.
// Prices serialize as currency; absent quotes serialize as empty fields.
void write_steps_csv(std::ostream& out, std::span<const StepLogRecord> records);
void write_steps_jsonl(std::ostream& out, std::span<const StepLogRecord> records);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_jsonl(std::ostream& out, const SweepResult& result);
SweepResult read_sweep_csv(std::istream& in);

void write_training_reports_jsonl(std::ostream& out, std::span<const TrainingReport> reports);

// Per-agent final balances and mark-to-market profit.
void write_agents_csv(std::ostream& out, const RunResult& result);

std::string run_meta_json(std::uint64_t seed, std::string_view config_digest,
                          double wall_seconds);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace marketforge

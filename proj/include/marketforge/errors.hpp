#pragma once

#include <stdexcept>
#include <string>

namespace marketforge {

// Every failure the library can raise, by name. The CLI maps these onto
// exit codes (config errors -> 2, runtime errors -> 3).
enum class Errc {
  // config-rand
  malformed_json,
  missing_key,
  unknown_class,
  duplicate_registration,
  bad_range,
  bad_rate,
  // market-book
  non_positive_price,
  bad_order,
  market_order_no_counterparty,
  market_order_while_execution_disabled,
  // agents
  degenerate_weights,
  // sim-runner
  bad_selection_count,
  simulation_aborted,
  // neural
  non_finite_input,
  shape_mismatch,
  // experiment-cli
  degenerate_x,
  too_few_points,
  io_failure,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_json: return "MalformedJson";
    case Errc::missing_key: return "MissingKey";
    case Errc::unknown_class: return "UnknownClass";
    case Errc::duplicate_registration: return "DuplicateRegistration";
    case Errc::bad_range: return "BadRange";
    case Errc::bad_rate: return "BadRate";
    case Errc::non_positive_price: return "NonPositivePrice";
    case Errc::bad_order: return "BadOrder";
    case Errc::market_order_no_counterparty: return "MarketOrderNoCounterparty";
    case Errc::market_order_while_execution_disabled:
      return "MarketOrderWhileExecutionDisabled";
    case Errc::degenerate_weights: return "DegenerateWeights";
    case Errc::bad_selection_count: return "BadSelectionCount";
    case Errc::simulation_aborted: return "SimulationAborted";
    case Errc::non_finite_input: return "NonFiniteInput";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::degenerate_x: return "DegenerateX";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

  // Config-shaped errors are user errors in the input file; everything else
  // is a runtime failure.
  bool is_config_error() const {
    switch (code_) {
      case Errc::malformed_json:
      case Errc::missing_key:
      case Errc::unknown_class:
      case Errc::duplicate_registration:
      case Errc::bad_range:
      case Errc::bad_rate:
        return true;
      default:
        return false;
    }
  }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace marketforge

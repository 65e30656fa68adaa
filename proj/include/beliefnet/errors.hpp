#pragma once

#include <stdexcept>
#include <string>

namespace beliefnet {

// Bad user-supplied parameters (network spec, model parameters, config).
struct invalid_spec_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Combination matrix is not primitive (disconnected or periodic support).
struct non_primitive_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver ran out of its iteration budget.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A belief row lost all mass (every hypothesis at zero probability).
struct degenerate_belief_error : std::runtime_error {
  degenerate_belief_error(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration(iteration) {}
  long iteration;
};

// The requested bound or estimator does not apply to the given inputs.
struct inapplicable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Not enough trace data to form an estimate.
struct insufficient_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace beliefnet

#pragma once
#include <stdexcept>
#include <string>

namespace higgslab {

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, double last_residual, int iterations)
      : std::runtime_error(msg), last_residual(last_residual), iterations(iterations) {}
  double last_residual;
  int iterations;
};
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace higgslab

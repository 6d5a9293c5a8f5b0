#pragma once

#include <stdexcept>
#include <string>

namespace dynmix {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension/size mismatch or zero-sized input.
struct DimensionError : Error {
  using Error::Error;
};

// Cholesky pivot failure. `index` is the 1-based diagonal position of the
// first non-positive pivot.
struct NotPositiveDefiniteError : Error {
  int index;
  explicit NotPositiveDefiniteError(int idx)
      : Error("matrix not positive definite at pivot " + std::to_string(idx)),
        index(idx) {}
};

// Invalid fit configuration (bad iteration counts, incompatible mode/link, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (CSV schema, out-of-range responses).
struct DataError : Error {
  using Error::Error;
};

// Mid-run numerical failure; carries the iteration and the conditional that
// produced it so a run can be reported and aborted rather than retried.
struct NumericError : Error {
  long iteration;
  std::string conditional;
  NumericError(long iter, std::string cond, const std::string& what)
      : Error("iteration " + std::to_string(iter) + ", " + cond + ": " + what),
        iteration(iter),
        conditional(std::move(cond)) {}
};

}  // namespace dynmix

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symcap {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

/// Block matrices handed to build_form violate the required symmetries.
struct InvalidBlocks : Error {
  using Error::Error;
};

/// An antisymmetric form matrix is singular (or numerically so).
struct DegenerateForm : Error {
  using Error::Error;
};

struct NotPositiveSemidefinite : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// Scatter matrix of an estimate cannot be factorized (singular/indefinite).
struct DegenerateScatter : Error {
  using Error::Error;
};

/// No candidate subset of the cloud spans the full phase space.
struct GeneralPositionFailure : Error {
  using Error::Error;
};

/// Exhaustive enumeration guard exceeded.
struct TooLarge : Error {
  using Error::Error;
};

/// Matrix exponential left the representable range.
struct FlowOverflow : Error {
  using Error::Error;
};

/// Point-cloud ingestion failure; carries the offending location (1-based,
/// 0 when not applicable).
class IngestError : public Error {
public:
  IngestError(const std::string& msg, std::size_t row, std::size_t col = 0)
      : Error(msg + " (row " + std::to_string(row) +
              (col ? ", column " + std::to_string(col) : std::string{}) + ")"),
        row_(row),
        col_(col) {}

  explicit IngestError(const std::string& msg) : Error(msg), row_(0), col_(0) {}

  [[nodiscard]] std::size_t row() const { return row_; }
  [[nodiscard]] std::size_t col() const { return col_; }

private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace symcap

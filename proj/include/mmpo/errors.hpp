#pragma once

#include <stdexcept>
#include <string>

namespace mmpo {

// Error taxonomy shared by every module.  Each type corresponds to one
// documented failure contract; the CLI maps them onto exit codes.
struct ZeroLikelihood : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnumerationTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsatisfiableConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GroupTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateVariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace mmpo

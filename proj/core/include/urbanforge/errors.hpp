#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <utility>

namespace urbanforge {

// Failure vocabulary shared across the toolkit. Codes are stable: the CLI and
// the decision log print them by name.
enum class Errc {
  kNotALegendType,
  kUnknownRegion,
  kInvalidAction,
  kProtectedRole,
  kNonVacantReassign,
  kBudgetExceeded,
  kRegionOccupied,
  kNoResidents,
  kNoFacilityOfType,
  kAmbiguousLegend,
  kMaskDimensionMismatch,
  kRenderOutOfBounds,
  kEmptySubRegion,
  kParseError,
  kPlannerFailed,
  kInvalidConfig,
  kIoError,
  kServiceUnavailable,
};

const char* errc_name(Errc code);

struct Error {
  Errc code;
  std::string message;
};

inline Error make_error(Errc code, std::string message) {
  return Error{code, std::move(message)};
}

// Success-or-Error result for operations that return nothing on success.
class Status {
 public:
  Status() = default;
  Status(Error e) : error_(std::move(e)) {}  // NOLINT: implicit by design
  Status(Errc code, std::string message) : error_(Error{code, std::move(message)}) {}

  bool ok() const { return !error_.has_value(); }
  explicit operator bool() const { return ok(); }
  const Error& error() const {
    assert(error_.has_value());
    return *error_;
  }

 private:
  std::optional<Error> error_;
};

// Minimal value-or-Error carrier. The toolkit reports failures as values, not
// exceptions; callers branch on ok() before touching value().
template <typename T>
class Expected {
 public:
  Expected(T value) : value_(std::move(value)) {}  // NOLINT: implicit by design
  Expected(Error e) : error_(std::move(e)) {}      // NOLINT: implicit by design
  Expected(Errc code, std::string message) : error_(Error{code, std::move(message)}) {}

  bool ok() const { return value_.has_value(); }
  explicit operator bool() const { return ok(); }

  T& value() & {
    assert(value_.has_value());
    return *value_;
  }
  const T& value() const& {
    assert(value_.has_value());
    return *value_;
  }
  T&& value() && {
    assert(value_.has_value());
    return *std::move(value_);
  }
  const Error& error() const {
    assert(error_.has_value());
    return *error_;
  }

 private:
  std::optional<T> value_;
  std::optional<Error> error_;
};

}  // namespace urbanforge

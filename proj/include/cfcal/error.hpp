#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfcal {

enum class ErrorKind {
  Domain,
  InsufficientData,
  Ordering,
  Pairing,
  NoCarFollowing,
  Split,
  UndefinedStatistic,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; the
// kind is stable and is what the CLI prints as the machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace cfcal

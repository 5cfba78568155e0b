// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dpmix {

enum class ErrorCategory {
  invalid_argument,  // malformed or inconsistent input values
  domain,            // parameters outside their mathematical domain
  tail_guard,        // lazily extended stick tail underflowed
  exhausted,         // accept-reject ran out of attempts
  io,                // file could not be opened or written
  parse,             // malformed dataset or chain file
  range,             // observation outside [0, trials]
  missing_input,     // a prerequisite file or chain is absent
  empty_input,       // dataset file without observations
};

std::string_view category_name(ErrorCategory c) noexcept;

// Process exit code used by the CLI for each category (0 is success).
int exit_code(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Thrown by accept-reject transcoding when max_attempts proposals were all
// rejected.
class AttemptsExhausted : public Error {
 public:
  explicit AttemptsExhausted(std::uint64_t attempts)
      : Error(ErrorCategory::exhausted,
              "accept-reject exhausted after " + std::to_string(attempts) +
                  " proposals"),
        attempts_(attempts) {}

  std::uint64_t attempts() const noexcept { return attempts_; }

 private:
  std::uint64_t attempts_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) {
  throw Error(c, what);
}

inline void require(bool cond, ErrorCategory c, const char* what) {
  if (!cond) throw Error(c, what);
}

}  // namespace dpmix

// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/error.hpp"

namespace dpmix {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::tail_guard: return "tail_guard";
    case ErrorCategory::exhausted: return "exhausted";
    case ErrorCategory::io: return "io";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::range: return "range";
    case ErrorCategory::missing_input: return "missing_input";
    case ErrorCategory::empty_input: return "empty_input";
  }
  return "unknown";
}

int exit_code(ErrorCategory c) noexcept {
  return 10 + static_cast<int>(c);
}

}  // namespace dpmix

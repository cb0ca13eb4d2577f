#pragma once

#include <stdexcept>

namespace passby {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : error { using error::error; };          // filesystem failures
struct format_error : error { using error::error; };      // malformed containers / schemas
struct unsupported_error : error { using error::error; }; // valid container, unsupported encoding
struct validation_error : error { using error::error; };  // data violates documented invariants
struct config_error : error { using error::error; };      // invalid configuration values
struct shape_error : error { using error::error; };       // dimension mismatches
struct train_error : error { using error::error; };       // optimizer divergence

}  // namespace passby

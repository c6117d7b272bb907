#pragma once

#include <stdexcept>

namespace latacc {

// Base class for all library errors. The CLI maps the concrete type to a
// machine-readable error kind on stderr.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : error { using error::error; };
struct data_error : error { using error::error; };
struct elicitation_error : error { using error::error; };
struct sampler_error : error { using error::error; };
struct identifiability_error : error { using error::error; };
struct grid_error : error { using error::error; };
struct io_error : error { using error::error; };
struct analysis_error : error { using error::error; };

}  // namespace latacc

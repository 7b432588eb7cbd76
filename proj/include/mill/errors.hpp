#pragma once

#include <stdexcept>
#include <string>

namespace mill {

/// Base class for all errors raised by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad arguments, bad configuration, misuse of an API contract. CLI exit code 1.
struct argument_error : error {
    using error::error;
};

/// Malformed input files, corrupt indexes, inconsistent data. CLI exit code 2.
struct data_error : error {
    using error::error;
};

/// Remote backend failures: transport, protocol, empty completions. CLI exit code 3.
struct backend_error : error {
    using error::error;
};

}  // namespace mill

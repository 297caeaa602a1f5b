#pragma once

#include <stdexcept>
#include <string>

namespace prodlex {

/// Data, model, or numeric failure. The CLI maps this to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace prodlex

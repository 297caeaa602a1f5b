#pragma once

#include <string>
#include <vector>

namespace prodlex::cli {

/// Entry point behind the `prodlex` binary. Exit codes: 0 success,
/// 1 usage error, 2 data/model error.
int run(int argc, const char* const* argv);

/// Test convenience: args without the program name.
int run(const std::vector<std::string>& args);

}  // namespace prodlex::cli

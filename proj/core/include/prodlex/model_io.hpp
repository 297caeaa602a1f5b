#pragma once

#include <cstdint>
#include <string>

namespace prodlex::io {

inline constexpr int kModelFormatVersion = 1;

struct ModelFileInfo {
    int format_version = 0;
    std::string model_type;
    std::uint64_t seed = 0;
};

/// Reads only the header fields of a model file; throws prodlex::Error on
/// unreadable/invalid files or unsupported versions.
ModelFileInfo peek_model_file(const std::string& path);

}  // namespace prodlex::io

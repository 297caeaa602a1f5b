#include "prodlex/model_io.hpp"

#include <json.hpp>

#include "json_util.hpp"
#include "prodlex/error.hpp"

namespace prodlex::io {

ModelFileInfo peek_model_file(const std::string& path) {
    auto j = parse_json_file(path);
    if (!j.is_object() || !j.contains("format_version") || !j.contains("model_type")) {
        throw Error("not a model file: " + path);
    }
    ModelFileInfo info;
    info.format_version = j.at("format_version").get<int>();
    if (info.format_version != kModelFormatVersion) {
        throw Error("unsupported model format_version " + std::to_string(info.format_version) +
                    " in " + path);
    }
    info.model_type = j.at("model_type").get<std::string>();
    info.seed = j.value("seed", std::uint64_t{0});
    return info;
}

}  // namespace prodlex::io

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>

#include "hspde/scheme.hpp"

namespace hspde {

struct ConfigError : std::runtime_error {
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + msg), line(line_) {}
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg), line(0) {}
    int line;
};

// Flat key-value run configuration with dotted section prefixes, e.g.
//   model.kernel.g.type = bjerksund
//   model.kernel.g.alpha = 0.01
// Exact grammar in the README.
struct RunConfig {
    HSPDEModel model;
    GridSpec grid;
    std::uint64_t seed = 0;
    std::size_t paths = 1;
    std::filesystem::path out_dir = ".";
    std::set<std::string> outputs;  // boundary | field | moments | budget
    std::string text;               // canonical config text (for the manifest hash)
    std::uint64_t config_hash = 0;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

}  // namespace hspde

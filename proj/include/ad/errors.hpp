#pragma once

#include <stdexcept>
#include <string>

namespace ad {

// Input/config validation failures: CLI exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem/serialization failures: CLI exit code 2.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ad

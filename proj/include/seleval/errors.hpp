#pragma once

#include <stdexcept>
#include <string>

namespace seleval {

// Bad user input: malformed logs, out-of-range parameters, constraint
// violations. Maps to exit code 1 in the CLI.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem trouble: unreadable inputs, unwritable output directories.
// Maps to exit code 2 in the CLI.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seleval

#pragma once

#include <stdexcept>
#include <string>

namespace storetwin {

/// Thrown when an input violates a documented precondition or a config is invalid.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace storetwin

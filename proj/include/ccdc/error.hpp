#pragma once

#include <stdexcept>
#include <string>

namespace ccdc {

/// Broad failure class; the CLI maps it onto an exit status.
enum class ErrorCategory { Config, Numerical, IO };

/// Every library failure carries a stable name (e.g. "MissingKey") plus a
/// human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string name, const std::string& message)
        : std::runtime_error(message), category_(category), name_(std::move(name)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& name() const noexcept { return name_; }

private:
    ErrorCategory category_;
    std::string name_;
};

inline Error config_error(std::string name, const std::string& message) {
    return Error(ErrorCategory::Config, std::move(name), message);
}

inline Error numerical_error(std::string name, const std::string& message) {
    return Error(ErrorCategory::Numerical, std::move(name), message);
}

inline Error io_error(std::string name, const std::string& message) {
    return Error(ErrorCategory::IO, std::move(name), message);
}

}  // namespace ccdc

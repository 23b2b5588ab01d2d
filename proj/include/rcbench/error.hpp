#pragma once

#include <stdexcept>
#include <string>

namespace rcbench {

enum class ErrorKind {
    schema,
    parse,
    label,
    argument,
    shape,
    init,
    singular,
    degenerate,
    io,
};

const char* to_string(ErrorKind kind);

/// Library error carrying a category, used by the CLI to pick an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace rcbench

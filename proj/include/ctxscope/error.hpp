#pragma once

#include <stdexcept>
#include <string>

namespace ctxscope {

enum class ErrorKind {
    Usage,                 // caller broke a documented precondition
    Input,                 // malformed or invalid input data
    Io,                    // file could not be read or written
    UndefinedConditional,  // conditioning event has probability zero
    Invariant,             // internal consistency check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace ctxscope

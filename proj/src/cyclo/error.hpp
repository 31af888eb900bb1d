#pragma once

#include <stdexcept>
#include <string>

namespace cyclo {

/// Failure categories. The numeric values are mirrored by the C API status codes.
enum class ErrorKind {
    Domain = 1,       ///< argument outside the mathematical domain of an operation
    Config = 2,       ///< invalid configuration (unknown key, bad scheme, ...)
    Numerical = 3,    ///< factorization or quadrature failure
    Coverage = 4,     ///< series does not cover the filter window
    Singularity = 5,  ///< evaluation at or across the spectral singularity
    Internal = 7,     ///< invariant violation inside the library
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what)
{
    if (!ok) fail(kind, what);
}

}  // namespace cyclo

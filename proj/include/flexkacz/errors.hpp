#pragma once

#include <stdexcept>
#include <string>

namespace flexkacz {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedFormat : std::runtime_error {
    explicit UnsupportedFormat(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRange : std::out_of_range {
    explicit IndexOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct AllRowsZero : std::runtime_error {
    explicit AllRowsZero(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroRow : std::runtime_error {
    explicit ZeroRow(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroResidual : std::runtime_error {
    explicit ZeroResidual(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroRhs : std::invalid_argument {
    explicit ZeroRhs(const std::string& what) : std::invalid_argument(what) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

struct InfeasibleDensity : std::invalid_argument {
    explicit InfeasibleDensity(const std::string& what) : std::invalid_argument(what) {}
};

struct SingularTriangular : std::runtime_error {
    explicit SingularTriangular(const std::string& what) : std::runtime_error(what) {}
};

struct OverflowError : std::overflow_error {
    explicit OverflowError(const std::string& what) : std::overflow_error(what) {}
};

}  // namespace flexkacz

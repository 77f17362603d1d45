#pragma once

#include <stdexcept>
#include <string>

namespace klab {

// Every precondition / certification failure maps to one of these, so callers
// (CLI, python bindings) can distinguish usage errors from numeric ones.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct CompositeModulus : Error {
    explicit CompositeModulus(long long q)
        : Error("modulus " + std::to_string(q) + " is not prime") {}
};

struct NotCoprime : Error {
    NotCoprime(long long a, long long q)
        : Error("argument " + std::to_string(a) + " is not coprime to " + std::to_string(q)) {}
};

struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

struct DegenerateSupport : Error {
    explicit DegenerateSupport(const std::string& what) : Error(what) {}
};

struct InvalidDelta : Error {
    explicit InvalidDelta(double d)
        : Error("delta parameter " + std::to_string(d) + " outside (0, 1/2)") {}
};

struct OscillationBudgetExceeded : Error {
    explicit OscillationBudgetExceeded(const std::string& what) : Error(what) {}
};

struct TruncationNotCertified : Error {
    explicit TruncationNotCertified(const std::string& what) : Error(what) {}
};

struct TailNotCertified : Error {
    explicit TailNotCertified(const std::string& what) : Error(what) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& what) : Error(what) {}
};

struct ParameterOutOfRange : Error {
    explicit ParameterOutOfRange(const std::string& what) : Error(what) {}
};

struct TupleInvariantViolated : Error {
    explicit TupleInvariantViolated(const std::string& what) : Error(what) {}
};

struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& what) : Error(what) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& what) : Error(what) {}
};

struct GaussSumDegenerate : Error {
    explicit GaussSumDegenerate(const std::string& what) : Error(what) {}
};

struct RangeOutOfBounds : Error {
    explicit RangeOutOfBounds(const std::string& what) : Error(what) {}
};

}  // namespace klab

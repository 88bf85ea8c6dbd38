#ifndef MEANPER_ERRORS_HPP
#define MEANPER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace meanper {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// growth
struct DomainError : Error {
    using Error::Error;
};
struct LinearCaseError : Error {
    LinearCaseError() : Error("legendre: the linear kind has no finite conjugate") {}
};

// entire
struct OrderTooLargeError : Error {
    using Error::Error;
};
struct NoZerosError : Error {
    using Error::Error;
};
struct ContourThroughZeroError : Error {
    using Error::Error;
};
struct MultiplicityCapError : Error {
    using Error::Error;
};

// newton
struct CoincidentNodesError : Error {
    using Error::Error;
};

// variety
struct EmptyVarietyError : Error {
    EmptyVarietyError() : Error("variety is empty") {}
};
struct DerivativeVanishesError : Error {
    using Error::Error;
};

// functionals
struct DivergentPairingError : Error {
    using Error::Error;
};
struct DeflationResidualError : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

// cli / config
struct ConfigError : Error {
    using Error::Error;
};

} // namespace meanper

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace pcsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct BuildError : Error {
    using Error::Error;
};

struct ExtractError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct UnknownDevice : Error {
    using Error::Error;
};

struct DegenerateCapacity : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct FingerprintMismatch : Error {
    using Error::Error;
};

} // namespace pcsim

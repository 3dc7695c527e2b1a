#ifndef UQI_ERRORS_HPP
#define UQI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace uqi {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested mode has imaginary axial wavenumber (angle beyond the light cone).
struct EvanescentMode : Error {
    explicit EvanescentMode(const std::string& msg) : Error(msg) {}
};

struct TotalInternalReflection : Error {
    explicit TotalInternalReflection(const std::string& msg) : Error(msg) {}
};

// Fringe amplitude too small to locate extrema (e.g. one pump switched off).
struct DegenerateFringe : Error {
    explicit DegenerateFringe(const std::string& msg) : Error(msg) {}
};

// A Fock term would need an occupation above the configured truncation.
struct TruncationOverflow : Error {
    explicit TruncationOverflow(const std::string& msg) : Error(msg) {}
};

struct DegenerateFit : Error {
    explicit DegenerateFit(const std::string& msg) : Error(msg) {}
};

struct DotsUnresolved : Error {
    explicit DotsUnresolved(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct UnitarityViolation : Error {
    explicit UnitarityViolation(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Bad or missing configuration key; message names the key.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace uqi

#endif

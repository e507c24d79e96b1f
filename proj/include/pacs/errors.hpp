#pragma once

#include <stdexcept>
#include <string>

namespace pacs {

// Named error conditions. Every failure mode the library reports is one of
// these; the CLI maps them to exit codes.

struct InvalidParams : std::runtime_error {
    explicit InvalidParams(const std::string& what) : std::runtime_error("InvalidParams: " + what) {}
};

struct NoIncentivizingSensitivity : std::runtime_error {
    explicit NoIncentivizingSensitivity(const std::string& what)
        : std::runtime_error("NoIncentivizingSensitivity: " + what) {}
};

struct CflViolation : std::runtime_error {
    explicit CflViolation(const std::string& what) : std::runtime_error("CflViolation: " + what) {}
};

struct NonFiniteValue : std::runtime_error {
    explicit NonFiniteValue(const std::string& what) : std::runtime_error("NonFiniteValue: " + what) {}
};

struct OutOfBounds : std::runtime_error {
    explicit OutOfBounds(const std::string& what) : std::runtime_error("OutOfBounds: " + what) {}
};

struct GridEscape : std::runtime_error {
    explicit GridEscape(const std::string& what) : std::runtime_error("GridEscape: " + what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error("ParseError: " + what) {}
};

struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& what) : std::runtime_error("CoverageError: " + what) {}
};

struct ArtifactMismatch : std::runtime_error {
    explicit ArtifactMismatch(const std::string& what) : std::runtime_error("ArtifactMismatch: " + what) {}
};

}  // namespace pacs

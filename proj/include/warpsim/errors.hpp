#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace warpsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parameter or dimension misuse detected at a call boundary.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Fock-space truncation cannot represent the requested state.
class TruncationError : public Error {
public:
    TruncationError(const std::string& msg, double tail) : Error(msg), tail_mass(tail) {}
    double tail_mass;
};

/// State norm drifted beyond the configured tolerance during propagation.
class NormDriftError : public Error {
public:
    NormDriftError(const std::string& msg, double drift) : Error(msg), drift(drift) {}
    double drift;
};

/// Time step rejected by the stability pre-check.
class StepSizeError : public Error {
public:
    explicit StepSizeError(const std::string& msg) : Error(msg) {}
};

/// A spatial or momentum grid does not resolve or cover the state.
class GridError : public Error {
public:
    explicit GridError(const std::string& msg) : Error(msg) {}
};

/// Configuration file could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg), line(line), column(column) {}
    int line;
    int column;
};

/// Configuration parsed but violates one or more invariants; every
/// violation is collected, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations(std::move(violations)) {}
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration:";
        for (const auto& s : v) {
            out += "\n  - " + s;
        }
        return out;
    }
};

/// Cross-backend verification found a violation.
class VerificationError : public Error {
public:
    explicit VerificationError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure while emitting results.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace warpsim

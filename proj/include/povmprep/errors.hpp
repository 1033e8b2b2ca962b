#pragma once

#include <stdexcept>
#include <string>

namespace povmprep {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Pivoting elimination met a pivot below the relative threshold; no unique
/// extremal solution exists.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class NegativeEigenvalue : public Error {
public:
    using Error::Error;
};

/// A measurement set failed validation (resolution of the identity, vector
/// norms, or mismatched outcome counts).
class InvalidSet : public Error {
public:
    using Error::Error;
};

class InvalidAngle : public Error {
public:
    using Error::Error;
};

class NotOnSimplex : public Error {
public:
    using Error::Error;
};

class GramNotDiagonal : public Error {
public:
    using Error::Error;
};

class ZeroDenominator : public Error {
public:
    using Error::Error;
};

/// The self-consistency condition has no solution at this temperature.
class Unattainable : public Error {
public:
    using Error::Error;
};

/// Requested setting parameters fall outside the admissible window.
class OutOfWindow : public Error {
public:
    using Error::Error;
};

class SingularOverlap : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace povmprep

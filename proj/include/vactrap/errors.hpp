#pragma once

#include <stdexcept>
#include <string>

namespace vactrap {

// Base for every failure raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A denominator |Delta +- g| fell below the degeneracy threshold.
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

// Input makes the requested quantity meaningless (zero drive, zero loss).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class Timeout : public Error {
public:
    using Error::Error;
};

class EmptyChannel : public Error {
public:
    using Error::Error;
};

// The laser optimisation has no finite optimum (no spontaneous emission).
class Unbounded : public Error {
public:
    using Error::Error;
};

} // namespace vactrap

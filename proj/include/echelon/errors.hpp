#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace echelon {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Raised when an operation's input contract does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class SignatureMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class ScaleDomainError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// A small divisor vanished (or fell below tolerance). `witness` is the
// offending lattice index; `slot` is the component for vector-valued
// problems (-1 when not applicable).
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, std::vector<int> witness, int slot = -1)
        : Error(what), witness_(std::move(witness)), slot_(slot) {}
    const std::vector<int>& witness() const { return witness_; }
    int slot() const { return slot_; }

private:
    std::vector<int> witness_;
    int slot_;
};

class ConvergenceAbort : public Error {
public:
    ConvergenceAbort(const std::string& what, int step) : Error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

}  // namespace echelon

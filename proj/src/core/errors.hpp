#pragma once

#include <stdexcept>
#include <string>

namespace edgeminer {

// Base of everything the core throws on purpose. The C API maps each
// subclass onto its own status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input syntax (XML, CSV, timestamps). Carries a 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

// Well-formed input that violates the event log schema or its invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

class MergeError : public Error {
public:
    using Error::Error;
};

// A node received a message its state machine cannot accept.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Counter or link invariant broken inside a node.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

// Raised by the simulator (watchdog, misconfiguration).
class SimulationError : public Error {
public:
    using Error::Error;
};

class MiningError : public Error {
public:
    using Error::Error;
};

} // namespace edgeminer

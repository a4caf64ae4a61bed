#pragma once

#include <stdexcept>
#include <string>

namespace gapflood {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (embedding file, JSON line, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// A predicate has no cluster id in the clustering being applied.
class CoverageError : public Error {
public:
    explicit CoverageError(const std::string& predicate)
        : Error("predicate not covered by clustering: \"" + predicate + "\""), predicate_(predicate) {}

    const std::string& predicate() const noexcept { return predicate_; }

private:
    std::string predicate_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class OracleTooLargeError : public Error {
public:
    using Error::Error;
};

} // namespace gapflood

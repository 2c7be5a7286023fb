#pragma once

#include <stdexcept>
#include <string>

namespace signatlas {

/* Error taxonomy mirrored by the CLI exit codes:
 *   ParseError  -> 2   malformed input text / JSON / schema version
 *   BudgetError -> 3   configured resource budget exceeded
 *   DomainError -> 4   input outside a documented precondition
 * Anything else escaping to main is a bug and exits 1. */

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct SchemaError : ParseError {
    using ParseError::ParseError;
};

struct BudgetError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

/* The Cauchy lower bound is undefined when 0 itself is a root. */
struct ZeroRootPresent : DomainError {
    using DomainError::DomainError;
};

/* Bound calculators refuse results beyond the configured digit budget. */
struct BoundTooLarge : BudgetError {
    using BudgetError::BudgetError;
};

/* Uniform grid would exceed the configured cell budget. */
struct GridTooLarge : BudgetError {
    using BudgetError::BudgetError;
};

/* Query point outside [0,1]^n. */
struct OutOfDomain : DomainError {
    using DomainError::DomainError;
};

/* Query point outside the delta-restricted region. */
struct OutsideRegion : DomainError {
    using DomainError::DomainError;
};

/* A certified database record contradicted an exact re-evaluation. */
struct InvariantError : Error {
    using Error::Error;
};

} // namespace signatlas

#pragma once

#include <stdexcept>
#include <string>

namespace smoothcop {

//! Requested family, kernel or dimension has no implementation.
class UnsupportedOperation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

//! Iterative solver failed to bracket or converge.
class ConvergenceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! The requested level does not cross the evaluated surface.
class EmptyContour : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Argument errors are std::invalid_argument, domain errors std::domain_error.

} // namespace smoothcop

// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_ERROR_HPP
#define EIGENROM_ERROR_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace eigenrom
{

// Base of all library errors.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or malformed user input.
class InvalidInput : public Error
{
public:
  using Error::Error;
};

// Factorization breakdown, non-convergence and similar.
class NumericalFailure : public Error
{
public:
  using Error::Error;
};

// Unreadable, mismatched or tampered model/config files.
class FormatError : public Error
{
public:
  using Error::Error;
};

namespace detail
{

template <typename Exc, typename... Args>
[[noreturn]] void Throw(const Args &...args)
{
  std::ostringstream oss;
  (oss << ... << args);
  throw Exc(oss.str());
}

}  // namespace detail

}  // namespace eigenrom

#define EIGENROM_VERIFY(cond, Exc, ...)                 \
  do                                                    \
  {                                                     \
    if (!(cond))                                        \
    {                                                   \
      ::eigenrom::detail::Throw<::eigenrom::Exc>(__VA_ARGS__); \
    }                                                   \
  } while (false)

#endif  // EIGENROM_ERROR_HPP

/*
* Copyright (C) 2026 The stageshift authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef STAGESHIFT_ERRORS_HPP
#define STAGESHIFT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stageshift
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A rate, probability or size is outside its admissible domain.
class InvalidParameter : public Error
{
public:
    using Error::Error;
};

/// A function argument (time, index, age) is outside its domain.
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// An identifiability bound on lambda23 or on the sojourn hypothesis is violated.
class ConstraintViolation : public Error
{
public:
    using Error::Error;
};

/// Malformed input table or key-value file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what)
        , m_line(line)
    {
    }

    std::size_t line() const noexcept
    {
        return m_line;
    }

private:
    std::size_t m_line;
};

/// A required input file or table does not exist.
class MissingInput : public Error
{
public:
    using Error::Error;
};

/// Numerical integrity check failed (row sums, survival underflow, ...).
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// The cumulative stage shift has a zero denominator.
class UndefinedShift : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

} // namespace stageshift

#endif // STAGESHIFT_ERRORS_HPP

#ifndef REACTSYNTH_ERROR_HPP_
#define REACTSYNTH_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reactsynth {

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Formula text does not match the grammar. Positions are 1-based.
struct ParseError : Error
{
  ParseError(const std::string & msg, std::size_t line, std::size_t column)
      : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line(line), column(column)
  {}
  std::size_t line;
  std::size_t column;
};

struct DimensionError : Error
{
  using Error::Error;
};

struct TraceTooShort : Error
{
  using Error::Error;
};

struct DomainError : Error
{
  using Error::Error;
};

/// Raised when an iteration or node budget runs out before a decision is reached.
struct BudgetExhausted : Error
{
  using Error::Error;
};

}  // namespace reactsynth

#endif  // REACTSYNTH_ERROR_HPP_

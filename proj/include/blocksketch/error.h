#ifndef BLOCKSKETCH_ERROR_H_
#define BLOCKSKETCH_ERROR_H_

#include <stdexcept>
#include <string>

namespace blocksketch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments: bad probabilities, out-of-range indices, odd n in
// balanced mode, and so on.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input exceeds a hard size cap (exhaustive enumeration, dense convolution).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Arguments valid individually but outside the domain where a bound holds.
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

// Malformed graph or CSV text.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace blocksketch

#endif  // BLOCKSKETCH_ERROR_H_

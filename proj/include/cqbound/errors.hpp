#pragma once

#include <stdexcept>

namespace cqbound {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHermitian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct DimensionOverflow : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct TraceNotOne : Error { using Error::Error; };
struct NotBlockDiagonal : Error { using Error::Error; };
struct NotOrthonormal : Error { using Error::Error; };
struct Unreachable : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct EpsilonOutOfRange : Error { using Error::Error; };
struct BadTruncationLevel : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace cqbound

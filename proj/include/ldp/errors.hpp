#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lang
struct UnknownLanguage : Error {
  explicit UnknownLanguage(const std::string& what) : Error("unknown language: " + what) {}
};

// corpus
struct NotEnoughLines : Error {
  using Error::Error;
};
struct InvalidSizes : Error {
  using Error::Error;
};
struct MissingCorpus : Error {
  using Error::Error;
};

// prompt
struct MixedTargetLanguage : Error {
  using Error::Error;
};
struct NeedTriplets : Error {
  using Error::Error;
};
struct NoTargetSegment : Error {
  using Error::Error;
};
struct BadTemplate : Error {
  using Error::Error;
};
struct UnparsableRating : Error {
  using Error::Error;
};

// backend
struct TransportError : Error {
  using Error::Error;
};
struct AuthError : Error {
  using Error::Error;
};
struct RateLimited : Error {
  using Error::Error;
};
struct BadTable : Error {
  using Error::Error;
};

// synthesis
struct NotEnoughPairs : Error {
  using Error::Error;
};

// metrics
struct Misaligned : Error {
  using Error::Error;
};
struct NoSegments : Error {
  using Error::Error;
};
struct ZeroDenominator : Error {
  using Error::Error;
};
struct NeedSeedData : Error {
  using Error::Error;
};
struct EmptyText : Error {
  using Error::Error;
};

// harness / CLI configuration
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ldp

#pragma once

#include <stdexcept>
#include <string>

namespace eegaug {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration: montage documents, scenario options, parameter
// ranges. CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent data: file format violations, shape mismatches,
// non-finite samples, label range. CLI maps this to exit code 3.
struct DataError : Error {
  using Error::Error;
};

// Reflection requested on a montage without left/right pairs.
struct PairlessMontageError : ConfigError {
  PairlessMontageError()
      : ConfigError("montage has no left/right pairs; reflection is undefined") {}
  using ConfigError::ConfigError;
};

}  // namespace eegaug

#pragma once

#include <stdexcept>
#include <string>

namespace swformer {

// Shape or axis mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse: backward on a detached tensor, mismatched scale lists, etc.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid configuration key or parameter range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File-system or decode failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Paired-folder ingestion found stems present on only one side.
class IngestionError : public IoError {
 public:
  using IoError::IoError;
};

// NaN/Inf encountered in gradients or loss.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swformer

// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace trustforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input stream or file.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A parse produced no usable records.
class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters (sizes that do not divide, counts out of range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Neighbor selection could not find enough correlated peers.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// Feature extraction is missing an input window.
class FeatureError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace trustforge

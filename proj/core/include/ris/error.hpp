// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ris
{

/// Base class for every error raised by the platform.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// One or more input invariants were violated. Carries every violation found, not just the
/// first one.
class ValidationError : public Error
{
public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string> &violations() const noexcept { return violations_; }

private:
  std::vector<std::string> violations_;
};

/// The field solver blew up (energy growth or non-finite values).
class DivergenceError : public Error
{
public:
  using Error::Error;
};

}  // namespace ris

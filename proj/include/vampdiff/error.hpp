// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vampdiff {

// Base of every library exception. category() is a stable lowercase tag.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

#define VAMPDIFF_DEFINE_ERROR(Name, tag)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(tag, message) {}    \
  }

VAMPDIFF_DEFINE_ERROR(DimensionError, "dimension");
VAMPDIFF_DEFINE_ERROR(DomainError, "domain");
VAMPDIFF_DEFINE_ERROR(UsageError, "usage");
VAMPDIFF_DEFINE_ERROR(ParameterError, "parameter");
VAMPDIFF_DEFINE_ERROR(RangeError, "range");
VAMPDIFF_DEFINE_ERROR(InsufficientPeaksError, "insufficient_peaks");
VAMPDIFF_DEFINE_ERROR(InitError, "init");
VAMPDIFF_DEFINE_ERROR(IoError, "io");
VAMPDIFF_DEFINE_ERROR(ConfigError, "config");
VAMPDIFF_DEFINE_ERROR(IngestError, "ingest");
VAMPDIFF_DEFINE_ERROR(NumericError, "numeric");

#undef VAMPDIFF_DEFINE_ERROR

}  // namespace vampdiff

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace matchlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Serial dictatorship (and q-hat guarantees) need every school to share one priority order.
class CommonPriorityViolation : public Error {
 public:
  CommonPriorityViolation()
      : Error("schools do not share a common priority order") {}
};

class UnknownSchool : public Error {
 public:
  using Error::Error;
};

class UnknownFixture : public Error {
 public:
  explicit UnknownFixture(const std::string& name)
      : Error("unknown fixture: " + name) {}
};

/// Raised before any scan whose mechanism-evaluation count would exceed the cap.
class SizeCapExceeded : public Error {
 public:
  SizeCapExceeded(std::uint64_t estimate, std::uint64_t cap)
      : Error("audit needs about " + std::to_string(estimate) +
              " mechanism evaluations, cap is " + std::to_string(cap)),
        estimate_(estimate),
        cap_(cap) {}

  std::uint64_t estimate() const noexcept { return estimate_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t estimate_;
  std::uint64_t cap_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::string field)
      : Error(message), line_(line), field_(std::move(field)) {}

  /// 1-based; 0 when the error is not tied to a source line.
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid problem:";
    for (const auto& v : items) out += "\n  - " + v;
    return out;
  }
  std::vector<std::string> violations_;
};

class SpecParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace matchlab

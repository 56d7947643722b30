#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mesospec {

/// Input rejected before any computation starts. `field()` names the
/// offending parameter when there is one.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : std::invalid_argument(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numerical kernel failed: eigensolver non-convergence, a singular pivot,
/// or a broken backward-stability identity.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& message,
                          std::optional<std::uint64_t> stream_id = std::nullopt)
      : std::runtime_error(stream_id ? message + " (stream_id " + std::to_string(*stream_id) + ")"
                                     : message),
        stream_id_(stream_id) {}

  std::optional<std::uint64_t> stream_id() const noexcept { return stream_id_; }

 private:
  std::optional<std::uint64_t> stream_id_;
};

}  // namespace mesospec

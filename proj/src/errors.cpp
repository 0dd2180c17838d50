#include "projeq/errors.hpp"

#include <fmt/format.h>

namespace projeq {

namespace {

std::string singular_message(const std::string& operation,
                             const std::string& detail,
                             std::optional<std::size_t> location) {
  std::string msg = fmt::format("singular input to {}: {}", operation, detail);
  if (location) msg += fmt::format(" (at offset {})", *location);
  return msg;
}

}  // namespace

SingularInputError::SingularInputError(std::string operation,
                                       const std::string& detail,
                                       std::optional<std::size_t> location)
    : Error(singular_message(operation, detail, location)),
      operation_(std::move(operation)),
      detail_(detail),
      location_(location) {}

SingularInputError SingularInputError::with_location(std::size_t offset) const {
  return SingularInputError(operation_, detail_, offset);
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : Error(fmt::format("{} at offset {}", message, offset)),
      bare_(message),
      offset_(offset) {}

}  // namespace projeq

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evd {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file does not follow its schema. `location` is a JSON path such as
/// "volumes[0].shape.type".
class FormatError : public Error {
 public:
  FormatError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)),
        detail_(message) {}

  [[nodiscard]] const std::string& location() const { return location_; }
  [[nodiscard]] const std::string& detail() const { return detail_; }

 private:
  std::string location_;
  std::string detail_;
};

}  // namespace evd

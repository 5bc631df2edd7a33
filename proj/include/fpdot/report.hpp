#pragma once

#include <span>
#include <string>
#include <string_view>

#include "fpdot/matrix.hpp"

namespace fpdot {

/// Builds a JSON object whose fields appear exactly in the order they are
/// added. Doubles print with 17 significant digits so values round-trip
/// bit-exactly; non-finite values print as null.
class JsonObject {
 public:
  JsonObject& field(std::string_view name, double value);
  JsonObject& field(std::string_view name, int value);
  JsonObject& field(std::string_view name, bool value);
  JsonObject& field(std::string_view name, std::string_view value);
  /// Keeps string literals away from the bool overload.
  JsonObject& field(std::string_view name, const char* value) {
    return field(name, std::string_view(value));
  }
  JsonObject& field(std::string_view name, std::span<const double> values);
  JsonObject& field(std::string_view name, const Matrix& values);
  /// Splices pre-rendered JSON (an array or object) as the field value.
  JsonObject& field_json(std::string_view name, std::string_view rendered);

  /// The finished object, single line, no trailing newline.
  std::string str() const;

 private:
  void key(std::string_view name);
  std::string body_;
};

/// One double at 17 significant digits ("null" when non-finite).
std::string format_double(double value);

/// A JSON array of doubles.
std::string format_array(std::span<const double> values);

}  // namespace fpdot

#include "fpdot/report.hpp"

#include <cmath>
#include <cstdio>

namespace fpdot {

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_array(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  out += ']';
  return out;
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

void JsonObject::key(std::string_view name) {
  if (!body_.empty()) body_ += ',';
  body_ += '"';
  body_ += escape(name);
  body_ += "\":";
}

JsonObject& JsonObject::field(std::string_view name, double value) {
  key(name);
  body_ += format_double(value);
  return *this;
}

JsonObject& JsonObject::field(std::string_view name, int value) {
  key(name);
  body_ += std::to_string(value);
  return *this;
}

JsonObject& JsonObject::field(std::string_view name, bool value) {
  key(name);
  body_ += value ? "true" : "false";
  return *this;
}

JsonObject& JsonObject::field(std::string_view name, std::string_view value) {
  key(name);
  body_ += '"';
  body_ += escape(value);
  body_ += '"';
  return *this;
}

JsonObject& JsonObject::field(std::string_view name, std::span<const double> values) {
  key(name);
  body_ += format_array(values);
  return *this;
}

JsonObject& JsonObject::field(std::string_view name, const Matrix& values) {
  key(name);
  body_ += '[';
  for (std::size_t i = 0; i < values.rows(); ++i) {
    if (i > 0) body_ += ',';
    body_ += format_array(
        std::span<const double>(&values.flat()[i * values.cols()], values.cols()));
  }
  body_ += ']';
  return *this;
}

JsonObject& JsonObject::field_json(std::string_view name, std::string_view rendered) {
  key(name);
  body_ += rendered;
  return *this;
}

std::string JsonObject::str() const { return "{" + body_ + "}"; }

}  // namespace fpdot

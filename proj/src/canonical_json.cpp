#include "evd/canonical_json.hpp"

#include <charconv>
#include <cmath>

namespace evd {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void dump_into(const nlohmann::json& v, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::object: {
      // nlohmann::json objects are std::map backed, so iteration is sorted.
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(key).dump();
        out += ':';
        dump_into(item, out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        dump_into(item, out);
      }
      out += ']';
      break;
    }
    case value_t::number_float: out += format_double(v.get<double>()); break;
    default: out += v.dump(); break;
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

}  // namespace evd

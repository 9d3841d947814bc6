#pragma once

// Minimal ordered JSON emitter. Keys come out in insertion order and every
// double is printed with 17 significant digits so output is byte-stable.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace jout {

inline std::string number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v == 0.0 ? 0.0 : v);  // no -0
  return buf;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

class Object {
 public:
  Object& raw(const std::string& key, std::string value) {
    fields_.emplace_back(key, std::move(value));
    return *this;
  }
  Object& num(const std::string& key, double v) { return raw(key, number(v)); }
  Object& str(const std::string& key, const std::string& v) { return raw(key, quote(v)); }
  Object& boolean(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
  Object& integer(const std::string& key, long long v) { return raw(key, std::to_string(v)); }
  Object& complex(const std::string& key, double re, double im) {
    return raw(key, Object().num("re", re).num("im", im).dump());
  }
  Object& obj(const std::string& key, const Object& o) { return raw(key, o.dump()); }

  std::string dump() const {
    std::string out = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) out += ',';
      out += quote(fields_[i].first) + ':' + fields_[i].second;
    }
    return out + "}";
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

inline std::string array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out + "]";
}

}  // namespace jout

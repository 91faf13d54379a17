#pragma once

// Deterministic report emission. Identical configs and seeds must yield
// byte-identical output, so every float is rendered by one %.12g
// formatter and key order is insertion order.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace report {

inline std::string fmt_double(double v) {
  if (!std::isfinite(v)) return v > 0 ? "\"inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
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
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

class JsonWriter {
 public:
  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(std::string_view k) {
    separate();
    out_ += escape(k);
    out_ += ':';
    after_key_ = true;
  }

  void value(double v) { token(fmt_double(v)); }
  void value(bool v) { token(v ? "true" : "false"); }
  void value(std::string_view v) { token(escape(v)); }
  void value(const char* v) { token(escape(v)); }
  void value_uint(std::uint64_t v) { token(std::to_string(v)); }
  void value_int(std::int64_t v) { token(std::to_string(v)); }
  // pre-validated JSON token, e.g. an exact big-integer literal
  void raw(std::string_view tok) { token(std::string(tok)); }

  void field(std::string_view k, double v) { key(k), value(v); }
  void field(std::string_view k, bool v) { key(k), value(v); }
  void field(std::string_view k, std::string_view v) { key(k), value(v); }
  void field(std::string_view k, const char* v) { key(k), value(v); }
  void field_uint(std::string_view k, std::uint64_t v) { key(k), value_uint(v); }
  void field_raw(std::string_view k, std::string_view tok) { key(k), raw(tok); }

  const std::string& str() const { return out_; }

 private:
  std::string out_;
  std::vector<bool> comma_;
  bool after_key_ = false;

  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!comma_.empty()) {
      if (comma_.back()) out_ += ',';
      comma_.back() = true;
    }
  }

  void open(char c) {
    separate();
    out_ += c;
    comma_.push_back(false);
  }

  void close(char c) {
    comma_.pop_back();
    out_ += c;
  }

  void token(const std::string& t) {
    separate();
    out_ += t;
  }
};

// key,value lines for scalar reports; a header + rows table for sweeps.
class CsvWriter {
 public:
  void line(std::string_view key, std::string_view value) {
    out_ += cell(key);
    out_ += ',';
    out_ += cell(value);
    out_ += '\n';
  }
  void line(std::string_view key, const char* v) { line(key, std::string_view(v)); }
  void line(std::string_view key, double v) { line(key, std::string_view(fmt_double(v))); }
  void line(std::string_view key, bool v) { line(key, std::string_view(v ? "true" : "false")); }
  void line_uint(std::string_view key, std::uint64_t v) { line(key, std::to_string(v)); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cell(cells[i]);
    }
    out_ += '\n';
  }

  const std::string& str() const { return out_; }

 private:
  std::string out_;

  static std::string cell(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    q += '"';
    return q;
  }
};

}  // namespace report

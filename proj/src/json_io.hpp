#pragma once

// JSON encoding shared by certificates, benchmark reports and the C API.
// Doubles are written as shortest round-trip decimal strings so that reading
// a file back reproduces every bit; readers also accept plain JSON numbers.

#include <json.hpp>
#include <string>

#include "khtrack/linalg.hpp"

namespace kht::jsonio {

using nlohmann::json;

inline json encode(double v) { return format_double(v); }
inline json encode(Complex z) { return json::array({encode(z.real()), encode(z.imag())}); }
inline json encode(const ComplexInterval& z) {
  return json::array(
      {encode(z.re().lo()), encode(z.re().hi()), encode(z.im().lo()), encode(z.im().hi())});
}

inline json encode(std::span<const Complex> v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(encode(z));
  return out;
}

inline json encode(const Box& b) {
  json out = json::array();
  for (const auto& z : b.entries()) out.push_back(encode(z));
  return out;
}

inline json encode(const PointMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(encode(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, "at " + path + ": " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

inline const json& array(const json& j, const std::string& path, std::size_t expected = 0) {
  if (!j.is_array()) fail(path, "expected an array");
  if (expected != 0 && j.size() != expected)
    fail(path, "expected " + std::to_string(expected) + " elements, got " + std::to_string(j.size()));
  return j;
}

inline double decode_double(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) fail(path, "expected a number");
  try {
    return parse_double(j.get<std::string>());
  } catch (const Error&) {
    fail(path, "not a binary64 literal: '" + j.get<std::string>() + "'");
  }
}

inline long decode_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

inline std::string decode_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline Complex decode_complex(const json& j, const std::string& path) {
  array(j, path, 2);
  return {decode_double(j[0], path + "[0]"), decode_double(j[1], path + "[1]")};
}

inline ComplexInterval decode_interval(const json& j, const std::string& path) {
  array(j, path, 4);
  double v[4];
  for (std::size_t k = 0; k < 4; ++k) v[k] = decode_double(j[k], path + "[" + std::to_string(k) + "]");
  try {
    return {RealInterval(v[0], v[1]), RealInterval(v[2], v[3])};
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

inline PointVector decode_vector(const json& j, const std::string& path) {
  array(j, path);
  PointVector out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(decode_complex(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Box decode_box(const json& j, const std::string& path) {
  array(j, path);
  Box out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out[i] = decode_interval(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

inline PointMatrix decode_matrix(const json& j, const std::string& path) {
  array(j, path);
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = 0;
  if (rows > 0) cols = static_cast<Eigen::Index>(array(j[0], path + "[0]").size());
  PointMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const json& row = array(j[static_cast<std::size_t>(i)], rp, static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = decode_complex(row[static_cast<std::size_t>(c)], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

// Parses text, mapping syntax errors onto kParseError with the byte offset.
inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

}  // namespace kht::jsonio

#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "scorepred/error.hpp"

// Little-endian primitives for the model file formats. Byte order is written
// explicitly so files are portable regardless of host endianness.

namespace scorepred::binio {

inline void put_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline void put_str(std::ostream& os, std::string_view s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_f64_span(std::ostream& os, std::span<const double> v) {
  for (double x : v) put_f64(os, x);
}

inline std::uint8_t get_u8(std::istream& is) {
  int c = is.get();
  if (c == std::char_traits<char>::eof()) fail(ErrorKind::Parse, "unexpected end of file");
  return static_cast<std::uint8_t>(c);
}

inline std::uint32_t get_u32(std::istream& is) {
  char b[4];
  if (!is.read(b, 4)) fail(ErrorKind::Parse, "unexpected end of file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& is) {
  char b[8];
  if (!is.read(b, 8)) fail(ErrorKind::Parse, "unexpected end of file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is) {
  return std::bit_cast<double>(get_u64(is));
}

inline std::string get_str(std::istream& is, std::uint32_t max_len = 1u << 20) {
  std::uint32_t n = get_u32(is);
  if (n > max_len) fail(ErrorKind::Parse, "string length out of range");
  std::string s(n, '\0');
  if (n > 0 && !is.read(s.data(), n)) fail(ErrorKind::Parse, "unexpected end of file");
  return s;
}

inline void get_f64_span(std::istream& is, std::span<double> out) {
  for (double& x : out) x = get_f64(is);
}

}  // namespace scorepred::binio

#pragma once

// Little-endian binary writer/reader with a trailing CRC-64 used by the graph
// and landmark table file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmprm/error.hpp"

namespace lmprm::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// CRC-64/XZ (ECMA-182 polynomial, reflected, init and xorout all ones).
std::uint64_t crc64(std::span<const std::uint8_t> bytes);

class ByteWriter {
 public:
  void magic(std::string_view m) { raw(m.data(), m.size()); }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void f64_array(std::span<const double> v) { raw(v.data(), v.size_bytes()); }
  template <class T>
  void u64_array(std::span<const T> v) {
    for (T x : v) u64(static_cast<std::uint64_t>(x));
  }

  // Appends the CRC-64 of everything written so far.
  void seal() { u64(crc64(buffer_)); }

  const std::vector<std::uint8_t>& bytes() const { return buffer_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buffer_.insert(buffer_.end(), b, b + n);
  }
  std::vector<std::uint8_t> buffer_;
};

class ByteReader {
 public:
  // Checks the leading magic and the trailing CRC-64 before any field is read;
  // the reader is positioned just past the magic.
  ByteReader(std::vector<std::uint8_t> bytes, std::string_view magic, std::string what);
  static ByteReader from_file(const std::filesystem::path& path, std::string_view magic, std::string what);

  std::uint8_t u8() { return take<std::uint8_t>(); }
  std::uint32_t u32() { return take<std::uint32_t>(); }
  std::uint64_t u64() { return take<std::uint64_t>(); }
  double f64() { return take<double>(); }
  std::string str();
  void f64_array(std::span<double> out);
  std::size_t remaining() const { return payload_end_ - pos_; }
  // Throws unless every payload byte has been consumed.
  void expect_end() const;

 private:
  template <class T>
  T take() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const;

  std::vector<std::uint8_t> data_;
  std::string what_;
  std::size_t pos_ = 0;
  std::size_t payload_end_ = 0;
};

}  // namespace lmprm::io

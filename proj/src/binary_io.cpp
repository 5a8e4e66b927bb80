#include "lmprm/binary_io.hpp"

#include <boost/crc.hpp>
#include <fstream>
#include <iterator>

namespace lmprm::io {

std::uint64_t crc64(std::span<const std::uint8_t> bytes) {
  boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true> crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void ByteWriter::write_file(const std::filesystem::path& path) const { io::write_file(path, buffer_); }

ByteReader::ByteReader(std::vector<std::uint8_t> bytes, std::string_view magic, std::string what)
    : data_(std::move(bytes)), what_(std::move(what)) {
  if (data_.size() < magic.size() + sizeof(std::uint64_t)) throw FormatError(what_ + ": file truncated");
  if (std::memcmp(data_.data(), magic.data(), magic.size()) != 0)
    throw FormatError(what_ + ": bad magic (expected \"" + std::string(magic) + "\")");
  payload_end_ = data_.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, data_.data() + payload_end_, sizeof stored);
  if (crc64(std::span(data_.data(), payload_end_)) != stored)
    throw FormatError(what_ + ": checksum mismatch (file truncated or corrupted)");
  pos_ = magic.size();
}

ByteReader ByteReader::from_file(const std::filesystem::path& path, std::string_view magic, std::string what) {
  return ByteReader(read_file(path), magic, std::move(what));
}

std::string ByteReader::str() {
  std::uint32_t len = u32();
  need(len);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), len);
  pos_ += len;
  return s;
}

void ByteReader::f64_array(std::span<double> out) {
  need(out.size_bytes());
  std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
  pos_ += out.size_bytes();
}

void ByteReader::need(std::size_t n) const {
  if (n > payload_end_ - pos_) throw FormatError(what_ + ": unexpected end of data");
}

void ByteReader::expect_end() const {
  if (pos_ != payload_end_) throw FormatError(what_ + ": trailing bytes after payload");
}

}  // namespace lmprm::io

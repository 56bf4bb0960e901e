#include "hdlock/binary_io.hpp"

#include <boost/crc.hpp>
#include <fstream>
#include <iterator>

#include "hdlock/error.hpp"

namespace hdlock::io {

std::uint32_t crc32c(std::span<const std::uint8_t> bytes) {
  boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

void ByteWriter::bytes(std::string_view raw) { data_.insert(data_.end(), raw.begin(), raw.end()); }
void ByteWriter::u8(std::uint8_t v) { data_.push_back(v); }
void ByteWriter::u16(std::uint16_t v) {
  for (int i = 0; i < 2; ++i) data_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) data_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) data_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void ByteWriter::i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
void ByteWriter::hypervector(const Hypervector& hv) {
  for (auto w : hv.words()) u64(w);
}
void ByteWriter::crc_trailer() { u32(crc32c(data_)); }

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  if (remaining() < n) {
    detail::fail(ErrorCode::kFormat, what_ + ": truncated at byte " + std::to_string(pos_));
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::bytes(std::size_t n) {
  auto s = take(n);
  return {s.begin(), s.end()};
}
std::uint8_t ByteReader::u8() { return take(1)[0]; }
std::uint16_t ByteReader::u16() {
  auto s = take(2);
  return static_cast<std::uint16_t>(s[0] | (s[1] << 8));
}
std::uint32_t ByteReader::u32() {
  auto s = take(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | s[i];
  return v;
}
std::uint64_t ByteReader::u64() {
  auto s = take(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | s[i];
  return v;
}
std::int32_t ByteReader::i32() { return static_cast<std::int32_t>(u32()); }
Hypervector ByteReader::hypervector(std::size_t dim) {
  std::vector<std::uint64_t> words(word_count(dim));
  for (auto& w : words) w = u64();
  try {
    return Hypervector::from_words(dim, words);
  } catch (const Error& e) {
    detail::fail(ErrorCode::kFormat, what_ + ": " + e.what());
  }
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    detail::fail(ErrorCode::kFormat,
                 what_ + ": " + std::to_string(remaining()) + " unexpected trailing bytes");
  }
}

std::span<const std::uint8_t> verify_crc_trailer(std::span<const std::uint8_t> bytes,
                                                 const std::string& what) {
  if (bytes.size() < 4) detail::fail(ErrorCode::kFormat, what + ": too short for checksum");
  auto payload = bytes.first(bytes.size() - 4);
  ByteReader trailer(bytes.last(4), what);
  if (trailer.u32() != crc32c(payload)) {
    detail::fail(ErrorCode::kFormat, what + ": CRC-32C mismatch");
  }
  return payload;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::fail(ErrorCode::kData, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) detail::fail(ErrorCode::kData, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) detail::fail(ErrorCode::kData, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace hdlock::io

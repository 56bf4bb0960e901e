#pragma once

// Little-endian byte codec shared by the key and model file formats.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdlock/hypervector.hpp"

namespace hdlock::io {

// CRC-32C (Castagnoli, reflected, init/xorout 0xFFFFFFFF).
std::uint32_t crc32c(std::span<const std::uint8_t> bytes);

class ByteWriter {
 public:
  void bytes(std::string_view raw);
  void u8(std::uint8_t v);
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v);
  // ceil(D/64) little-endian words.
  void hypervector(const Hypervector& hv);
  // Appends the CRC-32C of everything written so far.
  void crc_trailer();

  [[nodiscard]] const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::vector<std::uint8_t> release() { return std::move(data_); }

 private:
  std::vector<std::uint8_t> data_;
};

class ByteReader {
 public:
  // what names the artifact in error messages.
  ByteReader(std::span<const std::uint8_t> data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::string bytes(std::size_t n);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32();
  Hypervector hypervector(std::size_t dim);

  [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }
  void expect_end() const;

 private:
  std::span<const std::uint8_t> take(std::size_t n);

  std::span<const std::uint8_t> data_;
  std::string what_;
  std::size_t pos_ = 0;
};

// Checks the 4-byte CRC-32C trailer and returns the payload before it.
std::span<const std::uint8_t> verify_crc_trailer(std::span<const std::uint8_t> bytes,
                                                 const std::string& what);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace hdlock::io

#pragma once

// Minimal little-endian binary serialization used by the n-gram index and
// LDA model files. Every file starts with a 8-byte magic followed by a
// uint32 format version.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "answerability/error.hpp"

namespace answerability {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class BinaryWriter {
 public:
  BinaryWriter(const std::filesystem::path& path, std::string_view magic,
               std::uint32_t version)
      : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw IoError("binary_io", "cannot open for writing: " + path.string());
    write_magic(magic);
    put_u32(version);
  }

  void put_u32(std::uint32_t v) { write_raw(&v, sizeof v); }
  void put_u64(std::uint64_t v) { write_raw(&v, sizeof v); }
  void put_i64(std::int64_t v) { write_raw(&v, sizeof v); }
  void put_f64(double v) { write_raw(&v, sizeof v); }
  void put_string(std::string_view s) {
    put_u64(s.size());
    write_raw(s.data(), s.size());
  }

  void finish() {
    out_.flush();
    if (!out_) throw IoError("binary_io", "write failed: " + path_.string());
  }

 private:
  void write_magic(std::string_view magic) {
    char buf[8] = {};
    std::memcpy(buf, magic.data(), std::min<std::size_t>(magic.size(), 8));
    write_raw(buf, 8);
  }
  void write_raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }

  std::ofstream out_;
  std::filesystem::path path_;
};

class BinaryReader {
 public:
  // Throws ValidationError if the magic does not match or the version is
  // newer than max_version.
  BinaryReader(const std::filesystem::path& path, std::string_view magic,
               std::uint32_t max_version)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("binary_io", "cannot open: " + path.string());
    char buf[8] = {};
    char expected[8] = {};
    std::memcpy(expected, magic.data(), std::min<std::size_t>(magic.size(), 8));
    read_raw(buf, 8);
    if (std::memcmp(buf, expected, 8) != 0)
      throw ValidationError("binary_io", path.string() + ": bad magic header");
    version_ = get_u32();
    if (version_ == 0 || version_ > max_version)
      throw ValidationError("binary_io", path.string() + ": unsupported version " +
                                             std::to_string(version_));
  }

  std::uint32_t version() const { return version_; }

  std::uint32_t get_u32() { return get<std::uint32_t>(); }
  std::uint64_t get_u64() { return get<std::uint64_t>(); }
  std::int64_t get_i64() { return get<std::int64_t>(); }
  double get_f64() { return get<double>(); }
  std::string get_string() {
    const std::uint64_t n = get_u64();
    if (n > (1ULL << 32)) throw ValidationError("binary_io", path_.string() + ": corrupt string length");
    std::string s(n, '\0');
    read_raw(s.data(), n);
    return s;
  }

 private:
  template <typename T>
  T get() {
    T v;
    read_raw(&v, sizeof v);
    return v;
  }
  void read_raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw ValidationError("binary_io", path_.string() + ": truncated file");
  }

  std::ifstream in_;
  std::filesystem::path path_;
  std::uint32_t version_ = 0;
};

}  // namespace answerability

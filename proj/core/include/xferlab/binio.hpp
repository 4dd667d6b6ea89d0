#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "xferlab/errors.hpp"
#include "xferlab/tensor.hpp"

namespace xferlab::binio {

// Little-endian binary file helpers shared by the on-disk formats.
// All readers fail with the byte offset of the problem.

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  }

  void magic(const char tag[4]) { raw(tag, 4); }
  void u16(uint16_t v) { put_le(v); }
  void u32(uint32_t v) { put_le(v); }
  void u64(uint64_t v) { put_le(v); }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_le(bits);
  }
  void f64s(const std::vector<double>& vs) {
    for (double v : vs) f64(v);
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void tensor(const Tensor& t) {
    u32(static_cast<uint32_t>(t.rank()));
    for (size_t d : t.shape) u32(static_cast<uint32_t>(d));
    f64s(t.data);
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorKind::Io, "write to '" + path_ + "' failed");
  }

 private:
  template <typename T>
  void put_le(T v) {
    unsigned char buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = (v >> (8 * i)) & 0xff;
    raw(reinterpret_cast<const char*>(buf), sizeof(T));
  }
  void raw(const char* p, size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
  }

  void expect_magic(const char tag[4]) {
    char buf[4];
    raw(buf, 4, "magic");
    if (std::memcmp(buf, tag, 4) != 0) {
      throw Error(ErrorKind::Format,
                  path_ + ": bad magic, expected '" + std::string(tag, 4) + "'");
    }
  }
  uint16_t u16() { return get_le<uint16_t>("u16"); }
  uint32_t u32() { return get_le<uint32_t>("u32"); }
  uint64_t u64() { return get_le<uint64_t>("u64"); }
  double f64() {
    uint64_t bits = get_le<uint64_t>("f64");
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    const uint32_t n = u32();
    std::string s(n, '\0');
    raw(s.data(), n, "string payload");
    return s;
  }
  Tensor tensor(const char* what) {
    const uint32_t rank = u32();
    if (rank > 8) {
      throw Error(ErrorKind::Format, fail_ctx(what) + ": implausible tensor rank " +
                                         std::to_string(rank));
    }
    std::vector<size_t> shape(rank);
    for (auto& d : shape) {
      d = u32();
      if (d == 0) throw Error(ErrorKind::Format, fail_ctx(what) + ": zero dimension");
    }
    Tensor t(shape);
    for (auto& v : t.data) v = f64();
    return t;
  }

  bool at_eof() {
    in_.peek();
    return in_.eof();
  }
  size_t offset() const { return offset_; }

 private:
  template <typename T>
  T get_le(const char* what) {
    unsigned char buf[sizeof(T)];
    raw(reinterpret_cast<char*>(buf), sizeof(T), what);
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= T(buf[i]) << (8 * i);
    return v;
  }
  void raw(char* p, size_t n, const char* what) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) {
      throw Error(ErrorKind::Format, fail_ctx(what) + ": truncated (wanted " +
                                         std::to_string(n) + " bytes)");
    }
    offset_ += n;
  }
  std::string fail_ctx(const char* what) const {
    return path_ + " at byte " + std::to_string(offset_) + " reading " + what;
  }

  std::string path_;
  std::ifstream in_;
  size_t offset_ = 0;
};

}  // namespace xferlab::binio

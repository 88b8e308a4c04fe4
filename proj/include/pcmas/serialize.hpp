#pragma once

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcmas/types.hpp"

namespace pcmas::io {

/// Little-endian binary writer for checkpoint files. Doubles are written as
/// raw 8-byte payloads, so round trips are bit-exact.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s);
  void ints(const std::vector<int>& v);
  void vec(const Vector& v);
  /// Engine state via the standard textual representation.
  void rng(const Rng& engine);

 private:
  void raw(const void* p, std::size_t n);
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::string str();
  std::vector<int> ints();
  Vector vec();
  Rng rng();

 private:
  void raw(void* p, std::size_t n);
  std::istream& in_;
};

/// Reads a tag written by BinaryWriter::str and fails loudly on mismatch;
/// used for magic strings and section markers.
void expect_tag(BinaryReader& reader, const std::string& tag);

struct CorruptFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pcmas::io

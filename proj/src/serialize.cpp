#include "pcmas/serialize.hpp"

#include <sstream>

namespace pcmas::io {

void BinaryWriter::raw(const void* p, std::size_t n) {
  out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out_) throw CorruptFileError("write failed");
}

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  if (!s.empty()) raw(s.data(), s.size());
}

void BinaryWriter::ints(const std::vector<int>& v) {
  u64(v.size());
  for (int x : v) i64(x);
}

void BinaryWriter::vec(const Vector& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  if (v.size() > 0) raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void BinaryWriter::rng(const Rng& engine) {
  std::ostringstream ss;
  ss << engine;
  str(ss.str());
}

void BinaryReader::raw(void* p, std::size_t n) {
  in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in_.gcount() != static_cast<std::streamsize>(n)) {
    throw CorruptFileError("unexpected end of file");
  }
}

std::uint32_t BinaryReader::u32() {
  std::uint32_t v;
  raw(&v, sizeof v);
  return v;
}

std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  raw(&v, sizeof v);
  return v;
}

std::int64_t BinaryReader::i64() {
  std::int64_t v;
  raw(&v, sizeof v);
  return v;
}

double BinaryReader::f64() {
  double v;
  raw(&v, sizeof v);
  return v;
}

std::string BinaryReader::str() {
  const std::uint64_t n = u64();
  if (n > (1ULL << 32)) throw CorruptFileError("string length implausible");
  std::string s(n, '\0');
  if (n > 0) raw(s.data(), n);
  return s;
}

std::vector<int> BinaryReader::ints() {
  const std::uint64_t n = u64();
  if (n > (1ULL << 32)) throw CorruptFileError("int list length implausible");
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(i64());
  return v;
}

Vector BinaryReader::vec() {
  const std::uint64_t n = u64();
  if (n > (1ULL << 40)) throw CorruptFileError("vector length implausible");
  Vector v(static_cast<Eigen::Index>(n));
  if (n > 0) raw(v.data(), sizeof(double) * n);
  return v;
}

Rng BinaryReader::rng() {
  std::istringstream ss(str());
  Rng engine;
  ss >> engine;
  if (!ss) throw CorruptFileError("bad rng state");
  return engine;
}

void expect_tag(BinaryReader& reader, const std::string& tag) {
  const std::string got = reader.str();
  if (got != tag) {
    throw CorruptFileError("expected tag '" + tag + "', found '" + got + "'");
  }
}

}  // namespace pcmas::io

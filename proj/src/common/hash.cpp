#include "common/hash.hpp"

#include <cstdio>
#include <stdexcept>

namespace pacasm {

uint64_t fnv1a64(std::span<const uint8_t> bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.value();
}

std::span<const uint8_t> ByteReader::bytes(size_t n) {
  if (in_.size() - pos_ < n) throw std::out_of_range("truncated byte stream");
  auto s = in_.subspan(pos_, n);
  pos_ += n;
  return s;
}

uint64_t ByteReader::get(int n) {
  auto s = bytes(static_cast<size_t>(n));
  uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(s[i]) << (8 * i);
  return v;
}

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string hex32(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

}  // namespace pacasm

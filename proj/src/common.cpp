#include "xeo/common.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace xeo {

void Fnv64::add_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0.0
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  add_u64(bits);
}

uint64_t fnv64(const std::string& s) {
  Fnv64 f;
  f.add_bytes(s.data(), s.size());
  return f.digest();
}

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t seed_stream(uint64_t seed, uint64_t a, uint64_t b) {
  return mix64(mix64(seed ^ mix64(a)) ^ mix64(b ^ 0x5851f42d4c957f2dull));
}

double Rng::normal() {
  // Box-Muller; u clamped away from 0 so log stays finite
  double u = uniform01();
  double v = uniform01();
  if (u < 1e-300) u = 1e-300;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (hi < lo) throw Error("uniform_int: empty range");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(next_u64());  // full 64-bit range
  // rejection sampling to avoid modulo bias
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % span);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace xeo

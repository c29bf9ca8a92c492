#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax-level failure; carries the 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

class BindError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ResourceCapError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Stable 64-bit hashing (FNV-1a). Used for fingerprints and schema hashes;
// must not depend on std::hash.
// ---------------------------------------------------------------------------

struct Fnv64 {
  static constexpr uint64_t kOffset = 1469598103934665603ull;
  static constexpr uint64_t kPrime = 1099511628211ull;

  uint64_t h = kOffset;

  void add_bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= kPrime;
    }
  }
  void add_u8(uint8_t v) { add_bytes(&v, 1); }
  void add_u32(uint32_t v) { add_bytes(&v, 4); }
  void add_u64(uint64_t v) { add_bytes(&v, 8); }
  void add_i64(int64_t v) { add_u64(static_cast<uint64_t>(v)); }
  void add_double(double v);
  void add_string(const std::string& s) {
    add_u64(s.size());
    add_bytes(s.data(), s.size());
  }
  uint64_t digest() const { return h; }
};

uint64_t fnv64(const std::string& s);

// splitmix64 finalizer; also used to derive independent seed streams.
uint64_t mix64(uint64_t x);
uint64_t seed_stream(uint64_t seed, uint64_t a, uint64_t b = 0);

// ---------------------------------------------------------------------------
// Deterministic RNG. All randomness in the project flows through this type so
// outputs are reproducible bit-for-bit across runs and platforms.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; the spare draw is discarded
  double normal();

  // inclusive bounds
  int64_t uniform_int(int64_t lo, int64_t hi);

  size_t index(size_t n) { return static_cast<size_t>(uniform_int(0, static_cast<int64_t>(n) - 1)); }

  bool bernoulli(double p) { return uniform01() < p; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace xeo

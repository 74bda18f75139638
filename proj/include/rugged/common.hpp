#pragma once

// Shared plumbing: error taxonomy, deterministic hashing, float formatting,
// atomic file writes.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rugged {

// All recoverable errors derive from error; the CLI maps them to exit 2.
// Anything else escaping to main is treated as an internal fault (exit 3).
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class domain_error : public error {
 public:
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// Lattice is malformed: non-uniform steps, missing cells, bad axis.
class lattice_error : public error {
 public:
  explicit lattice_error(const std::string& msg) : error(msg) {}
};

// Two grids that must share a lattice do not.
class shape_error : public error {
 public:
  explicit shape_error(const std::string& msg) : error(msg) {}
};

// A requested point is not on the lattice.
class lookup_error : public error {
 public:
  explicit lookup_error(const std::string& msg) : error(msg) {}
};

class io_error : public error {
 public:
  explicit io_error(const std::string& msg) : error(msg) {}
};

// Two logs that must cover the same configs do not.
class join_error : public error {
 public:
  explicit join_error(const std::string& msg) : error(msg) {}
};

// Violated internal invariant; the CLI maps this to exit 3, not 2.
class invariant_error : public std::logic_error {
 public:
  explicit invariant_error(const std::string& msg) : std::logic_error(msg) {}
};

// splitmix64 finalizer step. Stateless form: returns the mixed value of x.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Sequential splitmix64 generator (the PRNG behind sweep shuffles).
class splitmix64_engine {
 public:
  explicit splitmix64_engine(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Deterministic mix of a (m, n, k) triple into one 64-bit word.
inline std::uint64_t mix_mnk(std::int64_t m, std::int64_t n, std::int64_t k) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(m));
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(k));
  return h;
}

// Map a 64-bit hash affinely onto [-1, 1).
inline double hash_unit(std::uint64_t h) {
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
  return 2.0 * u - 1.0;
}

// Shape-dependent overhead term used by the cost model and by the
// attribution predicates; both must agree on the definition.
inline double overhead_hash(std::int64_t m, std::int64_t n, std::int64_t k) {
  return hash_unit(mix_mnk(m, n, k));
}

// Shortest-round-trip decimal form of a double (bit-exact on re-parse).
std::string format_double(double v);

// Write `content` to `path` via a temp file + rename.
void atomic_write_file(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

}  // namespace rugged

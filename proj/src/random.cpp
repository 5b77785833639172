#include "sparsefit/random.hpp"

namespace sparsefit::random {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::string_view purpose) {
  return splitmix(splitmix(splitmix(seed) ^ index) ^ fnv1a(purpose));
}

std::mt19937_64 engine(std::uint64_t seed, std::uint64_t index, std::string_view purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream_key(seed, index, purpose)),
                    static_cast<std::uint32_t>(stream_key(seed, index, purpose) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace sparsefit::random

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sparsefit::random {

/// Mixes (seed, index, purpose) into one 64-bit key. Different purposes give
/// unrelated streams, so the draws for one replication never depend on what
/// another replication or another consumer did.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::string_view purpose);

std::mt19937_64 engine(std::uint64_t seed, std::uint64_t index, std::string_view purpose);

}  // namespace sparsefit::random

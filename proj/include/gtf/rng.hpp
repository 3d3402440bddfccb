#ifndef GTF_RNG_HPP
#define GTF_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace gtf {

// All randomness flows from one root seed. Sub-streams are derived from
// (root, module tag, index) so independent components never share a stream
// and runs are reproducible regardless of evaluation order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(root);
  for (char c : tag) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  }
  return splitmix64(h ^ index);
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(root, tag, index));
}

}  // namespace gtf

#endif  // GTF_RNG_HPP

#include "avf/random.hpp"

#include <array>

namespace avf {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed) {
  std::array<std::uint32_t, 8> words{};
  std::uint64_t s = seed;
  for (std::size_t i = 0; i < words.size(); i += 2) {
    s = splitmix64(s);
    words[i] = static_cast<std::uint32_t>(s);
    words[i + 1] = static_cast<std::uint32_t>(s >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

RandomSource RandomSource::stream(std::uint64_t seed, std::uint64_t index) {
  return RandomSource(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace avf

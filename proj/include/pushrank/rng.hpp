#ifndef PUSHRANK_RNG_HPP_
#define PUSHRANK_RNG_HPP_

#include <cstdint>
#include <vector>

namespace pushrank {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/*!
 * \brief Seeded xoshiro256++ stream.
 *
 * The state is expanded from a single 64-bit seed with splitmix64, so the
 * same seed always produces the same stream. Every random quantity in this
 * library is drawn from one of these streams, which is what makes whole
 * experiment runs replayable.
 */
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = detail::splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /*! \brief Uniform double strictly inside (0, 1), 53 usable bits. */
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /*! \brief Uniform integer in [0, n). Requires n > 0. */
  std::uint64_t bounded(std::uint64_t n) {
    // multiply-shift; bias is < 2^-64 per draw which is irrelevant here
    const unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  static constexpr const char* algorithm() { return "xoshiro256++"; }

 private:
  std::uint64_t state_[4];
};

/*!
 * \brief Derive an independent child seed from a base seed and a tag.
 *
 * Used to hand disjoint streams to sub-tasks (per-seed logs, per-variant
 * training, evaluation) so that adding a consumer never shifts the draws
 * of another.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag,
                                 std::uint64_t index = 0) {
  std::uint64_t s = base;
  std::uint64_t a = detail::splitmix64(s);
  s ^= tag * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = detail::splitmix64(s);
  s ^= index * 0xd1b54a32d192ed03ULL;
  std::uint64_t c = detail::splitmix64(s);
  return a ^ detail::rotl64(b, 17) ^ detail::rotl64(c, 41);
}

/*! \brief In-place Fisher-Yates shuffle driven by the given stream. */
template <typename T>
void shuffle(std::vector<T>& items, SeededRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace pushrank

#endif  // PUSHRANK_RNG_HPP_

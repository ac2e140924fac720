#pragma once

#include <cstdint>
#include <random>

namespace sheetlab {

// SplitMix64 finalizer. Used to harden stream seeds so that nearby replicate
// indices do not produce correlated mt19937_64 states.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-replicate stream: seed XOR replicate index, passed through SplitMix64.
// A replicate's draws depend only on (seed, index), never on thread schedule,
// which is what makes parallel runs byte-identical to serial runs.
inline std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ index));
}

// Standard-normal draws for one stream. Holds its own distribution state so a
// stream can never observe another stream's cached spare variate.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t index)
        : engine_(replicate_engine(seed, index)) {}

    double operator()() { return normal_(engine_); }
    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace sheetlab

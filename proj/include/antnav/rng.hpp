#pragma once

#include <cstdint>
#include <random>

namespace antnav {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream seed for (base, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    return splitmix64(splitmix64(base) ^ (index * 0xd1342543de82ef95ULL + 1));
}

// mt19937_64 with distribution helpers that do not depend on the standard
// library's (implementation-defined) distribution algorithms, so generated
// scenes are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    // Uniform real in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace antnav

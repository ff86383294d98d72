#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace spatseg {

// Counter-based substream derivation: replicate m of a study seeded with
// `seed` draws from substream(seed, m), so replicates are reproducible
// independently of evaluation order (serial == parallel, bitwise).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
    return std::mt19937_64(s);
}

// Standard-normal draws with a stable draw order per engine instance.
struct GaussianStream {
    explicit GaussianStream(std::mt19937_64 engine) : eng(std::move(engine)) {}

    double operator()() { return nd(eng); }

    Eigen::VectorXd vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(eng);
        return v;
    }

    std::mt19937_64 eng;
    std::normal_distribution<double> nd{0.0, 1.0};
};

} // namespace spatseg

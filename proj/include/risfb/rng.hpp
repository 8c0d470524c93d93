// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_RNG_HPP
#define RISFB_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace risfb {

/// splitmix64 mixing step; used to derive independent stream seeds
/// (per trial, per codebook) from one master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(master ^ mix_seed(stream + 1));
}

/// One sample of CN(0, variance): circularly symmetric complex Gaussian.
inline std::complex<double> complex_gaussian(std::mt19937_64 &rng, double variance = 1.0) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

} // namespace risfb

#endif

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "itow/vec.hpp"

namespace itow {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    // Stafford's mix13 finalizer.
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based splittable random stream.
///
/// A stream is identified by (seed, stream id); the k-th output is a pure
/// function of (key, k), so streams can be created independently on any
/// worker and replayed without shared state. One 64-bit master seed feeds
/// every stream in a run.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::mix64(seed ^ detail::mix64(stream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL;
        return detail::mix64(z);
    }

    /// Uniform on (0,1]; never returns 0 so log() is safe.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the paired variate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    Vec normal_vec(int m, double scale = 1.0) {
        Vec z(m);
        for (int i = 0; i < m; ++i) z[i] = scale * normal();
        return z;
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace itow

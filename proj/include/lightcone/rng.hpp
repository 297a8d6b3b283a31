#pragma once

// Seeded, stream-indexed randomness. A (master_seed, stream_index) pair fully
// determines the draw sequence, so parallel tasks each take their own stream
// and results do not depend on scheduling. Gaussian variates are generated
// here (Box-Muller) instead of std::normal_distribution, whose output is not
// pinned down by the standard.

#include <cstdint>
#include <random>

#include "lightcone/linalg.hpp"

namespace lightcone {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = detail::splitmix64(s);
        s = master_seed ^ (0x6a09e667f3bcc909ULL + stream_index);
        std::uint64_t b = detail::splitmix64(s);
        engine_.seed(a ^ (b << 1));
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    RngStream substream(std::uint64_t offset) const {
        return RngStream(master_seed_, stream_index_ * 0x10001ULL + offset + 1);
    }

    // Uniform on [0, 1).
    double uniform() {
        return (engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() { return engine_(); }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Complex complex_gaussian() {
        return Complex(gaussian(), gaussian()) / std::sqrt(2.0);
    }

  private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Haar-distributed unitary: QR of a complex Ginibre matrix with the column
// phases fixed by the diagonal of R.
inline CMat sample_cue(long dim, RngStream& rng) {
    if (dim < 1) throw ValidationError("sample_cue: dim must be >= 1");
    CMat g(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long j = 0; j < dim; ++j) {
        Complex rjj = r(j, j);
        Complex phase = std::abs(rjj) > 0.0 ? rjj / std::abs(rjj) : Complex(1.0);
        q.col(j) *= phase;
    }
    return q;
}

}  // namespace lightcone

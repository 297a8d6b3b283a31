#pragma once

// Global Floquet diagnostics on small chains: eigenphase statistics
// (unfolded spacings, mean consecutive gap ratio), local eigenstate
// expectations and half-chain entanglement entropy.

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "lightcone/brickwork.hpp"
#include "lightcone/linalg.hpp"

namespace lightcone {

struct FloquetSpectrum {
    int local_dim = 2;
    int chain_size = 0;    // N + 1 qudits
    RVec eigenphases;      // sorted, in (-pi, pi]
    CMat eigenvectors;     // unitary; column k belongs to eigenphases(k)
};

// The Floquet unitary is normal, so its Schur form is diagonal and the Schur
// vectors are an exactly unitary eigenbasis; this keeps degenerate spectra
// (e.g. the SWAP circuit) well-behaved.
inline FloquetSpectrum floquet_spectrum(const CMat& u, int local_dim,
                                        double normality_tol = 1e-6) {
    if (!is_unitary(u, 1e-10))
        throw ValidationError("floquet_spectrum: input not unitary");
    Eigen::ComplexSchur<CMat> schur(u, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw NumericalError("floquet_spectrum: Schur decomposition failed");
    const CMat& t = schur.matrixT();
    CMat q = schur.matrixU();
    const long n = u.rows();
    double off = 0.0;
    for (long j = 0; j < n; ++j)
        for (long i = 0; i < j; ++i) off = std::max(off, std::abs(t(i, j)));
    if (off > normality_tol)
        throw NumericalError("floquet_spectrum: matrix not normal within tol");

    std::vector<long> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0L);
    RVec phases(n);
    for (long k = 0; k < n; ++k) phases(k) = std::arg(t(k, k));
    std::sort(perm.begin(), perm.end(),
              [&](long a, long b) { return phases(a) < phases(b); });

    FloquetSpectrum out;
    out.local_dim = local_dim;
    int chain = 0;
    long dim = 1;
    while (dim < n) {
        dim *= local_dim;
        ++chain;
    }
    if (dim != n) throw ValidationError("floquet_spectrum: dimension not d^(N+1)");
    out.chain_size = chain;
    out.eigenphases.resize(n);
    out.eigenvectors.resize(n, n);
    for (long k = 0; k < n; ++k) {
        out.eigenphases(k) = phases(perm[static_cast<std::size_t>(k)]);
        out.eigenvectors.col(k) = q.col(perm[static_cast<std::size_t>(k)]);
    }
    return out;
}

inline FloquetSpectrum floquet_spectrum(const Gate& g, int n, LayerOrder order) {
    return floquet_spectrum(build_floquet(g, n, order), g.local_dim);
}

// Circular nearest-neighbour spacings of the sorted phases, rescaled to unit
// mean (global unfolding).
inline std::vector<double> unfolded_spacings(const RVec& phases) {
    const long k = phases.size();
    if (k < 2) return {};
    std::vector<double> s(static_cast<std::size_t>(k));
    for (long i = 0; i + 1 < k; ++i)
        s[static_cast<std::size_t>(i)] = phases(i + 1) - phases(i);
    s[static_cast<std::size_t>(k - 1)] = 2 * M_PI - (phases(k - 1) - phases(0));
    const double mean = 2 * M_PI / double(k);
    for (auto& v : s) v /= mean;
    return s;
}

// Mean consecutive gap ratio with circular wraparound; zero spacings are
// kept as-is (a pair of equal spacings contributes 1, a single zero
// contributes 0).
inline double mean_gap_ratio(const std::vector<double>& spacings) {
    const std::size_t k = spacings.size();
    if (k < 2) return 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double a = spacings[i];
        const double b = spacings[(i + 1) % k];
        const double hi = std::max(a, b);
        acc += hi > 0.0 ? std::min(a, b) / hi : 1.0;
    }
    return acc / double(k);
}

struct EigenphaseStatistics {
    std::vector<double> spacings;  // unfolded, unit mean
    double mean_gap_ratio = 0.0;
    std::vector<double> hist_edges;
    std::vector<long> hist_counts;
};

inline EigenphaseStatistics eigenphase_statistics(const FloquetSpectrum& f,
                                                  int bins = 40,
                                                  double hist_max = 4.0) {
    EigenphaseStatistics out;
    out.spacings = unfolded_spacings(f.eigenphases);
    out.mean_gap_ratio = mean_gap_ratio(out.spacings);
    out.hist_edges.resize(static_cast<std::size_t>(bins) + 1);
    out.hist_counts.assign(static_cast<std::size_t>(bins), 0);
    for (int b = 0; b <= bins; ++b)
        out.hist_edges[static_cast<std::size_t>(b)] = hist_max * b / double(bins);
    for (double s : out.spacings) {
        long b = static_cast<long>(std::floor(s / hist_max * bins));
        if (b < 0) b = 0;
        if (b >= bins) b = bins - 1;  // overflow collected in the last bin
        ++out.hist_counts[static_cast<std::size_t>(b)];
    }
    return out;
}

// <sigma_x>, <sigma_y>, <sigma_z> at one site for every eigenstate (d = 2).
inline std::vector<std::array<double, 3>> eigenstate_site_expectations(
    const FloquetSpectrum& f, int site) {
    if (f.local_dim != 2)
        throw ValidationError("eigenstate_site_expectations: requires d = 2");
    if (site < 0 || site >= f.chain_size)
        throw ValidationError("eigenstate_site_expectations: site out of range");
    const long n = f.eigenvectors.rows();
    const long right = 1L << (f.chain_size - 1 - site);
    const long left = n / (2 * right);
    std::vector<std::array<double, 3>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        const auto& psi = f.eigenvectors.col(k);
        double ex = 0.0, ey = 0.0, ez = 0.0;
        for (long l = 0; l < left; ++l)
            for (long r = 0; r < right; ++r) {
                const Complex a0 = psi((l * 2 + 0) * right + r);
                const Complex a1 = psi((l * 2 + 1) * right + r);
                const Complex w = std::conj(a0) * a1;
                ex += 2 * w.real();
                ey += 2 * w.imag();
                ez += std::norm(a0) - std::norm(a1);
            }
        out.push_back({ex, ey, ez});
    }
    return out;
}

// Von Neumann entropy (natural log) of the reduced state of the first
// ceil((N+1)/2) sites, for every eigenstate.
inline std::vector<double> half_chain_entropy(const FloquetSpectrum& f) {
    const long n = f.eigenvectors.rows();
    const int na = (f.chain_size + 1) / 2;
    long dim_a = 1;
    for (int s = 0; s < na; ++s) dim_a *= f.local_dim;
    const long dim_b = n / dim_a;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        CMat m(dim_a, dim_b);
        for (long i = 0; i < dim_a; ++i)
            for (long j = 0; j < dim_b; ++j) m(i, j) = f.eigenvectors(i * dim_b + j, k);
        Eigen::BDCSVD<CMat> svd(m);
        double s_ent = 0.0;
        for (long i = 0; i < svd.singularValues().size(); ++i) {
            const double p = svd.singularValues()(i) * svd.singularValues()(i);
            if (p > 1e-15) s_ent -= p * std::log(p);
        }
        out.push_back(s_ent);
    }
    return out;
}

}  // namespace lightcone

#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they are used to check.

#include <algorithm>
#include <vector>

#include "lightcone/linalg.hpp"
#include "lightcone/rng.hpp"

namespace oracle {

using lightcone::CMat;
using lightcone::Complex;
using lightcone::RngStream;

// Kronecker product by explicit index arithmetic.
inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            for (long k = 0; k < b.rows(); ++k)
                for (long l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

// Partial trace of the first factor by the index-summation definition
// sum_k (<k| ⊗ I) X (|k> ⊗ I).
inline CMat ptrace_first(const CMat& x, long d_first) {
    const long rest = x.rows() / d_first;
    CMat out = CMat::Zero(rest, rest);
    for (long k = 0; k < d_first; ++k) {
        CMat bra = CMat::Zero(rest, x.rows());
        for (long r = 0; r < rest; ++r) bra(r, k * rest + r) = 1.0;
        out += bra * x * bra.adjoint();
    }
    return out;
}

inline CMat random_complex(long rows, long cols, RngStream& rng) {
    CMat m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = rng.complex_gaussian();
    return m;
}

inline CMat random_density(long dim, RngStream& rng) {
    CMat g = random_complex(dim, dim, rng);
    CMat rho = g * g.adjoint();
    rho /= rho.trace();
    return rho;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = double(i) / double(a.size());
        const double fb = double(j) / double(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

inline double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / double(v.size());
}

inline double stddev(const std::vector<double>& v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return v.size() > 1 ? std::sqrt(acc / double(v.size() - 1)) : 0.0;
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean(x), my = mean(y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

}  // namespace oracle

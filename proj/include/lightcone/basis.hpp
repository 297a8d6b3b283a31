#pragma once

// Hermitian orthonormal operator bases. Single-site elements are the scaled
// Pauli set for d=2 and scaled generalized Gell-Mann sets for d>=3; element 0
// is always I/sqrt(d). Multi-site elements are tensor products ordered
// site-major lexicographically, so element 0 of an M-site basis is
// I/sqrt(d^M) and the flat index mu has the site-1 digit most significant.

#include <vector>

#include "lightcone/linalg.hpp"

namespace lightcone {

inline std::vector<CMat> single_site_hermitian_basis(int d) {
    if (d < 2) throw ValidationError("hermitian_basis: d must be >= 2");
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(d) * d);
    out.push_back(CMat::Identity(d, d) / std::sqrt(double(d)));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            CMat sym = CMat::Zero(d, d);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            out.push_back(sym);
            CMat asym = CMat::Zero(d, d);
            asym(j, k) = Complex(0.0, -inv_sqrt2);
            asym(k, j) = Complex(0.0, inv_sqrt2);
            out.push_back(asym);
        }
    }
    for (int l = 1; l < d; ++l) {
        CMat diag = CMat::Zero(d, d);
        const double f = 1.0 / std::sqrt(double(l) * (l + 1));
        for (int j = 0; j < l; ++j) diag(j, j) = f;
        diag(l, l) = -f * l;
        out.push_back(diag);
    }
    return out;
}

class HermitianBasis {
  public:
    HermitianBasis(int d, int sites, long size_cap = kMaxSuperopDim)
        : d_(d), sites_(sites), single_(single_site_hermitian_basis(d)) {
        if (sites < 1) throw ValidationError("hermitian_basis: M must be >= 1");
        size_ = 1;
        for (int s = 0; s < sites; ++s) {
            size_ *= static_cast<long>(d) * d;
            if (size_ > size_cap)
                throw ValidationError("hermitian_basis: d^(2M) exceeds size cap " +
                                      std::to_string(size_cap));
        }
        op_dim_ = 1;
        for (int s = 0; s < sites; ++s) op_dim_ *= d;
        // Full element cache only at modest sizes; larger bases build on demand.
        if (size_ * size_ <= (1L << 22)) {
            cache_.reserve(size_);
            for (long mu = 0; mu < size_; ++mu) cache_.push_back(build(mu));
        }
    }

    int local_dim() const { return d_; }
    int sites() const { return sites_; }
    long size() const { return size_; }      // number of elements, d^(2M)
    long op_dim() const { return op_dim_; }  // operator side length, d^M
    const std::vector<CMat>& single_site() const { return single_; }

    CMat element(long mu) const {
        if (mu < 0 || mu >= size_)
            throw ValidationError("hermitian_basis: element index out of range");
        if (!cache_.empty()) return cache_[static_cast<std::size_t>(mu)];
        return build(mu);
    }

    // Coordinates c_mu = Tr[Gamma_mu X] for arbitrary X (complex in general,
    // real when X is Hermitian).
    CVec coordinates(const CMat& x) const {
        if (x.rows() != op_dim_ || x.cols() != op_dim_)
            throw ValidationError("hermitian_basis: operator dimension mismatch");
        CVec c(size_);
        for (long mu = 0; mu < size_; ++mu) {
            const CMat g = element(mu);
            c(mu) = (g.conjugate().cwiseProduct(x)).sum();  // Tr[G X], G Hermitian
        }
        return c;
    }

    RVec real_coordinates(const CMat& x, double imag_tol = 1e-9) const {
        CVec c = coordinates(x);
        if (c.imag().cwiseAbs().maxCoeff() > imag_tol)
            throw NumericalError(
                "hermitian_basis: coordinates of a non-Hermitian operator "
                "requested as real");
        return c.real();
    }

    CMat reconstruct(const CVec& c) const {
        if (c.size() != size_)
            throw ValidationError("hermitian_basis: coordinate length mismatch");
        CMat x = CMat::Zero(op_dim_, op_dim_);
        for (long mu = 0; mu < size_; ++mu)
            if (c(mu) != Complex(0.0)) x += c(mu) * element(mu);
        return x;
    }

    CMat reconstruct(const RVec& c) const {
        return reconstruct(CVec(c.cast<Complex>()));
    }

  private:
    CMat build(long mu) const {
        CMat out = CMat::Identity(1, 1);
        const long dd = static_cast<long>(d_) * d_;
        // site-major: site 1 holds the most significant digit
        std::vector<long> digit(sites_);
        long rest = mu;
        for (int s = sites_ - 1; s >= 0; --s) {
            digit[s] = rest % dd;
            rest /= dd;
        }
        for (int s = 0; s < sites_; ++s)
            out = tensor_product(out, single_[static_cast<std::size_t>(digit[s])]);
        return out;
    }

    int d_;
    int sites_;
    long size_ = 0;
    long op_dim_ = 0;
    std::vector<CMat> single_;
    std::vector<CMat> cache_;
};

inline HermitianBasis hermitian_basis(int d, int sites,
                                      long size_cap = kMaxSuperopDim) {
    return HermitianBasis(d, sites, size_cap);
}

}  // namespace lightcone

#pragma once

// The lightcone channel Phi_M of a brickwork circuit, its matrix
// representation in a Hermitian orthonormal operator basis, spectral
// analysis with peripheral-eigenvalue classification, the boundary channels
// Lambda_M^{in/out}, and CPTP validation.
//
// Phi_M[rho] = Tr_{q1} { W (rho ⊗ I/d) W† } where W is the staircase unitary
// on M+1 qudits: the gate acts on (M, M+1) first, then (M-1, M), ..., (1, 2).
// Matrix elements: S_{mu,nu} = Tr[Gamma_mu Phi_M[Gamma_nu]]
//                            = (1/d) Tr[(I ⊗ Gamma_mu) W (Gamma_nu ⊗ I) W†].
// Column 0 is e0 (unitality) and row 0 is e0^T (trace preservation); all
// entries are real because the basis is Hermitian and Phi_M preserves
// Hermiticity.

#include <algorithm>
#include <memory>
#include <vector>

#include "lightcone/basis.hpp"
#include "lightcone/gates.hpp"
#include "lightcone/linalg.hpp"

namespace lightcone {

struct Superoperator {
    int local_dim = 2;
    int sites = 1;
    std::shared_ptr<const HermitianBasis> basis;
    RMat matrix;  // d^(2M) x d^(2M), real

    long dim() const { return matrix.rows(); }
};

// Staircase unitary on n_sites qudits built from a two-qudit gate.
inline CMat staircase_unitary(const Gate& g, int n_sites,
                              long size_cap = kMaxTensorDim) {
    const int d = g.local_dim;
    if (n_sites < 2) throw ValidationError("staircase_unitary: need >= 2 sites");
    long dim = 1;
    for (int s = 0; s < n_sites; ++s) {
        dim *= d;
        if (dim > size_cap)
            throw ValidationError("staircase_unitary: dimension exceeds cap");
    }
    CMat w = CMat::Identity(dim, dim);
    // apply the gate on (s, s+1) for s = n_sites-1 down to 1 (1-based sites)
    for (int s = 1; s <= n_sites - 1; ++s) {
        long left = 1;
        for (int k = 1; k < s; ++k) left *= d;
        long right = dim / (left * d * d);
        CMat layer = tensor_product(
            tensor_product(CMat::Identity(left, left), g.matrix, size_cap),
            CMat::Identity(right, right), size_cap);
        w = w * layer;  // s = 1 ends up leftmost, i.e. applied last
    }
    return w;
}

// Superoperator of conjugation by a unitary L on the basis's operator space.
inline Superoperator unitary_superoperator(
    const CMat& l, std::shared_ptr<const HermitianBasis> basis,
    double imag_tol = 1e-10) {
    const long n = basis->size();
    const long dd = basis->op_dim();
    if (l.rows() != dd || l.cols() != dd)
        throw ValidationError("unitary_superoperator: dimension mismatch");
    RMat s(n, n);
    for (long nu = 0; nu < n; ++nu) {
        const CMat y = l * basis->element(nu) * l.adjoint();
        CVec c = basis->coordinates(y);
        if (c.imag().cwiseAbs().maxCoeff() > imag_tol)
            throw NumericalError("unitary_superoperator: non-real coordinates");
        s.col(nu) = c.real();
    }
    return Superoperator{basis->local_dim(), basis->sites(), std::move(basis), std::move(s)};
}

inline Superoperator identity_superoperator(
    std::shared_ptr<const HermitianBasis> basis) {
    const long n = basis->size();
    return Superoperator{basis->local_dim(), basis->sites(), std::move(basis),
                         RMat::Identity(n, n)};
}

inline Superoperator build_phi(const Gate& g, int sites,
                               long size_cap = kMaxSuperopDim,
                               double struct_tol = 1e-10) {
    const int d = g.local_dim;
    check_gate_unitary(g.matrix, "build_phi gate");
    auto basis = std::make_shared<const HermitianBasis>(d, sites, size_cap);
    const long n = basis->size();
    const CMat w = staircase_unitary(g, sites + 1);
    const CMat id_d = CMat::Identity(d, d);

    RMat s(n, n);
    for (long nu = 0; nu < n; ++nu) {
        CMat x = tensor_product(basis->element(nu), id_d) / double(d);
        CMat y = w * x * w.adjoint();
        CMat c = partial_trace_first(y, d);
        CVec col = basis->coordinates(c);
        if (col.imag().cwiseAbs().maxCoeff() > struct_tol)
            throw NumericalError("build_phi: channel matrix not real within tol");
        s.col(nu) = col.real();
    }
    // unitality (column 0) and trace preservation (row 0)
    RVec e0 = RVec::Zero(n);
    e0(0) = 1.0;
    if ((s.col(0) - e0).cwiseAbs().maxCoeff() > struct_tol)
        throw NumericalError("build_phi: channel not unital within tol");
    if ((s.row(0).transpose() - e0).cwiseAbs().maxCoeff() > struct_tol)
        throw NumericalError("build_phi: channel not trace-preserving within tol");
    return Superoperator{d, sites, std::move(basis), std::move(s)};
}

// Apply the channel to an operator (complex coordinates, by linearity).
inline CMat apply_superoperator(const Superoperator& s, const CMat& x) {
    CVec c = s.basis->coordinates(x);
    return s.basis->reconstruct(CVec(s.matrix.cast<Complex>() * c));
}

// Nontrivial Phi_1 diagonal for U = V(Jx,Jy,Jz):
// (sin2Jy sin2Jz, sin2Jz sin2Jx, sin2Jx sin2Jy).
inline std::array<double, 3> phi1_qubit_analytic(double jx, double jy, double jz) {
    return {std::sin(2 * jy) * std::sin(2 * jz),
            std::sin(2 * jz) * std::sin(2 * jx),
            std::sin(2 * jx) * std::sin(2 * jy)};
}

// Singular values of the nontrivial block, descending.
inline RVec singular_values_phi(const Superoperator& s) {
    const long n = s.dim();
    RMat block = s.matrix.bottomRightCorner(n - 1, n - 1);
    Eigen::JacobiSVD<RMat> svd(block);
    return svd.singularValues();
}

struct ChannelSpectrum {
    Eigen::VectorXcd eigenvalues;
    CMat coords;  // columns: eigenoperator coordinates, Frobenius-normalized
    std::shared_ptr<const HermitianBasis> basis;
    long trivial_index = 0;
    std::vector<long> peripheral_indices;
    Complex z_max = 0.0;  // nontrivial eigenvalue of largest modulus
    long z_max_index = -1;
    double diag_condition = 0.0;
    double eps = 1e-9;

    CMat eigen_operator(long i) const {
        return basis->reconstruct(CVec(coords.col(i)));
    }
};

inline ChannelSpectrum channel_spectrum(const Superoperator& s,
                                        double eps = 1e-9) {
    const long n = s.dim();
    Eigen::EigenSolver<RMat> es(s.matrix);
    if (es.info() != Eigen::Success) {
        throw NumericalError("channel_spectrum: eigensolver failed");
    }
    ChannelSpectrum out;
    out.basis = s.basis;
    out.eps = eps;
    out.eigenvalues = es.eigenvalues();
    out.coords = es.eigenvectors();

    for (long i = 0; i < n; ++i) {
        if (std::abs(out.eigenvalues(i)) > 1.0 + 1e-9)
            throw NumericalError("channel_spectrum: eigenvalue outside unit disc");
    }

    // Degenerate unit eigenvalues: rotate the z=1 eigenspace so one direction
    // is the identity and the rest are traceless (zero 0-coordinate).
    std::vector<long> unit_cluster;
    for (long i = 0; i < n; ++i)
        if (std::abs(out.eigenvalues(i) - Complex(1.0)) <= 1e-8)
            unit_cluster.push_back(i);
    if (unit_cluster.empty())
        throw NumericalError("channel_spectrum: no unit eigenvalue found");

    CVec e0 = CVec::Zero(n);
    e0(0) = 1.0;
    if (unit_cluster.size() == 1) {
        out.trivial_index = unit_cluster[0];
        CVec v = out.coords.col(out.trivial_index);
        if (std::abs(v(0)) < (1.0 - 1e-8) * v.norm())
            throw NumericalError(
                "channel_spectrum: unit eigenoperator not proportional to the "
                "identity");
        out.coords.col(out.trivial_index) = e0;
    } else {
        CMat b(n, static_cast<long>(unit_cluster.size()));
        for (std::size_t k = 0; k < unit_cluster.size(); ++k)
            b.col(static_cast<long>(k)) = out.coords.col(unit_cluster[k]);
        CVec a = b.colPivHouseholderQr().solve(e0);
        CVec t = b * a;
        if ((t - e0).norm() > 1e-6)
            throw NumericalError(
                "channel_spectrum: identity not contained in unit eigenspace");
        out.trivial_index = unit_cluster[0];
        out.coords.col(out.trivial_index) = e0;
        for (std::size_t k = 1; k < unit_cluster.size(); ++k) {
            const long i = unit_cluster[k];
            CVec v = out.coords.col(i);
            v -= v(0) * e0;  // remove identity component -> traceless
            const double nv = v.norm();
            if (nv > 1e-12) out.coords.col(i) = v / nv;
        }
    }

    // Normalize (Frobenius 1 in the orthonormal basis = unit coordinate norm)
    // and fix the phase by the largest-magnitude operator entry.
    for (long i = 0; i < n; ++i) {
        CVec v = out.coords.col(i);
        const double nv = v.norm();
        if (nv > 0) v /= nv;
        CMat op = s.basis->reconstruct(v);
        long r = 0, c = 0;
        op.cwiseAbs().maxCoeff(&r, &c);
        const Complex top = op(r, c);
        if (std::abs(top) > 0) v *= std::conj(top / std::abs(top));
        out.coords.col(i) = v;
    }

    // Trivial pair sanity: z = 1 and operator proportional to the identity.
    if (std::abs(out.eigenvalues(out.trivial_index) - Complex(1.0)) > 1e-8)
        throw NumericalError("channel_spectrum: trivial eigenvalue != 1");

    double zmax_mod = -1.0;
    for (long i = 0; i < n; ++i) {
        if (i == out.trivial_index) continue;
        const double m = std::abs(out.eigenvalues(i));
        if (m >= 1.0 - eps) out.peripheral_indices.push_back(i);
        if (m > zmax_mod) {
            zmax_mod = m;
            out.z_max = out.eigenvalues(i);
            out.z_max_index = i;
        }
    }

    // Condition number of the eigenvector matrix.
    {
        Eigen::BDCSVD<CMat> svd(out.coords);
        const auto& sv = svd.singularValues();
        out.diag_condition =
            sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                  : std::numeric_limits<double>::infinity();
    }
    return out;
}

inline constexpr double kNearDefectiveCondition = 1e8;

inline bool near_defective(const ChannelSpectrum& spec) {
    return !(spec.diag_condition < kNearDefectiveCondition);
}

// Boundary channels (identity for M < 3).
inline CMat lambda_in_matrix(const Gate& g, int sites) {
    const int d = g.local_dim;
    auto idm = [&](int k) {
        long dim = 1;
        for (int i = 0; i < k; ++i) dim *= d;
        return CMat::Identity(dim, dim);
    };
    if (sites < 3) return idm(sites);
    CMat l = tensor_product(g.matrix, idm(1));  // M = 3
    for (int m = 3; m < sites; ++m) {
        CMat layer =
            (m % 2 == 1)
                ? tensor_product(tensor_product(idm(1), tensor_power(g.matrix, (m - 1) / 2)), idm(1))
                : tensor_product(tensor_power(g.matrix, m / 2), idm(1));
        l = tensor_product(l, idm(1)) * layer;
    }
    return l;
}

inline CMat lambda_out_matrix(const Gate& g, int sites) {
    const int d = g.local_dim;
    auto idm = [&](int k) {
        long dim = 1;
        for (int i = 0; i < k; ++i) dim *= d;
        return CMat::Identity(dim, dim);
    };
    if (sites < 3) return idm(sites);
    CMat l = tensor_product(idm(1), g.matrix);  // M = 3
    for (int m = 3; m < sites; ++m) {
        CMat layer =
            (m % 2 == 1)
                ? tensor_product(tensor_product(idm(1), tensor_power(g.matrix, (m - 1) / 2)), idm(1))
                : tensor_product(tensor_power(g.matrix, m / 2), idm(1));
        l = layer * tensor_product(idm(1), l);
    }
    return l;
}

inline Superoperator lambda_in(const Gate& g, int sites,
                               long size_cap = kMaxSuperopDim) {
    auto basis = std::make_shared<const HermitianBasis>(g.local_dim, sites, size_cap);
    if (sites < 3) return identity_superoperator(std::move(basis));
    return unitary_superoperator(lambda_in_matrix(g, sites), std::move(basis));
}

inline Superoperator lambda_out(const Gate& g, int sites,
                                long size_cap = kMaxSuperopDim) {
    auto basis = std::make_shared<const HermitianBasis>(g.local_dim, sites, size_cap);
    if (sites < 3) return identity_superoperator(std::move(basis));
    return unitary_superoperator(lambda_out_matrix(g, sites), std::move(basis));
}

struct ChannelValidationReport {
    double unitality_residual = 0.0;
    double trace_residual = 0.0;
    double choi_min_eigenvalue = 0.0;
    bool unital = false;
    bool trace_preserving = false;
    bool completely_positive = false;

    bool ok() const { return unital && trace_preserving && completely_positive; }
};

// Choi matrix via C = Σ_nu Phi[Gamma_nu] ⊗ Gamma_nu^T (completeness of the
// orthonormal Hermitian basis).
inline CMat choi_matrix(const Superoperator& s) {
    const long n = s.dim();
    const long dd = s.basis->op_dim();
    CMat c = CMat::Zero(dd * dd, dd * dd);
    for (long nu = 0; nu < n; ++nu) {
        CVec col = s.matrix.col(nu).cast<Complex>();
        CMat img = s.basis->reconstruct(col);
        c += tensor_product(img, s.basis->element(nu).transpose(),
                            kMaxTensorDim * 4);
    }
    return c;
}

inline ChannelValidationReport validate_channel(
    const Superoperator& s, double unital_tol = 1e-10, double cp_floor = -1e-9) {
    ChannelValidationReport rep;
    const long n = s.dim();
    RVec e0 = RVec::Zero(n);
    e0(0) = 1.0;
    rep.unitality_residual = (s.matrix.col(0) - e0).cwiseAbs().maxCoeff();
    rep.trace_residual = (s.matrix.row(0).transpose() - e0).cwiseAbs().maxCoeff();
    CMat choi = choi_matrix(s);
    choi = 0.5 * (choi + choi.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(choi, Eigen::EigenvaluesOnly);
    rep.choi_min_eigenvalue = es.eigenvalues().minCoeff();
    rep.unital = rep.unitality_residual <= unital_tol;
    rep.trace_preserving = rep.trace_residual <= unital_tol;
    rep.completely_positive = rep.choi_min_eigenvalue >= cp_floor;
    return rep;
}

struct NestingReport {
    std::vector<double> eigenvalue_distance;    // per nontrivial eigenvalue of Phi_M
    std::vector<double> eigenoperator_residual;  // ||Phi_{M+1}[A⊗I] - z A⊗I||_F
    double max_distance = 0.0;
    double max_residual = 0.0;
};

// The spectrum of Phi_M is a subset of the spectrum of Phi_{M+1}:
// A ⊗ I is an eigenoperator of Phi_{M+1} with the same eigenvalue.
//
// The raw distance to the eigensolver spectrum of Phi_{M+1} can reach ~1e-7
// on clustered eigenvalues of a non-normal matrix even though the subset
// property is exact. When the embedded eigenoperator is certified by a tiny
// eigen-residual, its Rayleigh quotient under Phi_{M+1} locates the nested
// eigenvalue to machine precision, so the reported distance uses it.
inline NestingReport spectrum_nesting_check(const Gate& g, int sites,
                                            long size_cap = kMaxSuperopDim) {
    Superoperator s_m = build_phi(g, sites, size_cap);
    Superoperator s_m1 = build_phi(g, sites + 1, size_cap);
    ChannelSpectrum spec = channel_spectrum(s_m);
    const long n = s_m.dim();
    const long dd = static_cast<long>(g.local_dim) * g.local_dim;
    const double sqrt_d = std::sqrt(double(g.local_dim));
    NestingReport rep;
    Eigen::VectorXcd z1 = Eigen::VectorXcd::Zero(s_m1.dim());
    {
        Eigen::EigenSolver<RMat> es(s_m1.matrix);
        z1 = es.eigenvalues();
    }
    CMat big = s_m1.matrix.cast<Complex>();
    for (long i = 0; i < n; ++i) {
        if (i == spec.trivial_index) continue;
        const Complex z = spec.eigenvalues(i);
        double dist = std::numeric_limits<double>::infinity();
        for (long k = 0; k < z1.size(); ++k)
            dist = std::min(dist, std::abs(z1(k) - z));
        // embed coordinates of A ⊗ I (identity appended as the last factor)
        CVec emb = CVec::Zero(s_m1.dim());
        for (long mu = 0; mu < n; ++mu)
            emb(mu * dd) = sqrt_d * spec.coords(mu, i);
        const double nrm2 = emb.squaredNorm();
        CVec img = big * emb;
        const double res =
            nrm2 > 0 ? (img - z * emb).norm() / std::sqrt(nrm2) : 0.0;
        if (res <= 1e-10 && nrm2 > 0) {
            const Complex rayleigh = emb.dot(img) / nrm2;
            dist = std::min(dist, std::abs(rayleigh - z));
        }
        rep.eigenvalue_distance.push_back(dist);
        rep.eigenoperator_residual.push_back(res);
        rep.max_distance = std::max(rep.max_distance, dist);
        rep.max_residual = std::max(rep.max_residual, res);
    }
    return rep;
}

}  // namespace lightcone

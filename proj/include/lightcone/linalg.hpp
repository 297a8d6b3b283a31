#pragma once

// Dense complex-matrix substrate: tensor products, partial traces, norms and
// the error taxonomy shared by every module.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace lightcone {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Complex = std::complex<double>;

// Bad inputs or configuration (CLI exit code 2).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation left its numerical contract (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Largest matrix side produced by tensor products / full-chain evolution
// (2^14 qubit-equivalents).
inline constexpr long kMaxTensorDim = 16384;
// Largest superoperator / operator-basis dimension d^(2M).
inline constexpr long kMaxSuperopDim = 4096;

inline double max_abs(const CMat& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

inline double frobenius(const CMat& x) { return x.norm(); }

inline bool is_hermitian(const CMat& x, double tol = 1e-12) {
    return x.rows() == x.cols() && max_abs(x - x.adjoint()) <= tol;
}

inline bool is_unitary(const CMat& x, double tol = 1e-12) {
    if (x.rows() != x.cols()) return false;
    return max_abs(x.adjoint() * x - CMat::Identity(x.rows(), x.cols())) <= tol;
}

inline void require_finite(const CMat& x, const std::string& what) {
    if (!x.allFinite()) throw NumericalError(what + ": non-finite entries");
}

// Kronecker product with A's indices outermost.
inline CMat tensor_product(const CMat& a, const CMat& b,
                           long size_cap = kMaxTensorDim) {
    const long rows = a.rows() * b.rows();
    const long cols = a.cols() * b.cols();
    if (rows > size_cap || cols > size_cap)
        throw ValidationError("tensor_product: result " + std::to_string(rows) +
                              "x" + std::to_string(cols) + " exceeds size cap " +
                              std::to_string(size_cap));
    CMat out(rows, cols);
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

// Kronecker power A^{⊗k}; k = 0 gives the 1x1 identity.
inline CMat tensor_power(const CMat& a, int k, long size_cap = kMaxTensorDim) {
    CMat out = CMat::Identity(1, 1);
    for (int i = 0; i < k; ++i) out = tensor_product(out, a, size_cap);
    return out;
}

// Trace out the outermost tensor factor of dimension d_first.
inline CMat partial_trace_first(const CMat& x, long d_first) {
    if (x.rows() != x.cols())
        throw ValidationError("partial_trace_first: matrix not square");
    if (d_first < 1 || x.rows() % d_first != 0)
        throw ValidationError("partial_trace_first: dimension " +
                              std::to_string(x.rows()) + " not divisible by " +
                              std::to_string(d_first));
    const long rest = x.rows() / d_first;
    CMat out = CMat::Zero(rest, rest);
    for (long k = 0; k < d_first; ++k)
        out += x.block(k * rest, k * rest, rest, rest);
    return out;
}

// Trace out the innermost (last) tensor factor of dimension d_last.
inline CMat partial_trace_last(const CMat& x, long d_last) {
    if (x.rows() != x.cols())
        throw ValidationError("partial_trace_last: matrix not square");
    if (d_last < 1 || x.rows() % d_last != 0)
        throw ValidationError("partial_trace_last: dimension not divisible");
    const long rest = x.rows() / d_last;
    CMat out = CMat::Zero(rest, rest);
    for (long i = 0; i < rest; ++i)
        for (long j = 0; j < rest; ++j) {
            Complex s = 0.0;
            for (long k = 0; k < d_last; ++k) s += x(i * d_last + k, j * d_last + k);
            out(i, j) = s;
        }
    return out;
}

// 1/2 * sum of singular values of X - Y.
inline double trace_norm_distance(const CMat& x, const CMat& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ValidationError("trace_norm_distance: shape mismatch");
    CMat diff = x - y;
    if (is_hermitian(diff, 1e-13)) {
        Eigen::SelfAdjointEigenSolver<CMat> es(diff, Eigen::EigenvaluesOnly);
        return 0.5 * es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<CMat> svd(diff);
    return 0.5 * svd.singularValues().sum();
}

// exp(i H) for Hermitian H, via spectral decomposition.
inline CMat exp_i_hermitian(const CMat& h) {
    if (!is_hermitian(h, 1e-10))
        throw ValidationError("exp_i_hermitian: generator not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    CVec phases(h.rows());
    for (long k = 0; k < h.rows(); ++k)
        phases(k) = std::exp(Complex(0.0, es.eigenvalues()(k)));
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
}

}  // namespace lightcone

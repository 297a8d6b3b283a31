#pragma once

// Two-qudit gate families and the operator-entanglement / dual-unitarity
// diagnostics applied to them.
//
// KAK form for qubits:  U = (u' ⊗ u) V(J) (v ⊗ v') with
// V(J) = exp(i Jx σx⊗σx + i Jy σy⊗σy + i Jz σz⊗σz); the three exponent terms
// commute, so V is built from the closed-form product of the three factors.
// Qutrit family:        U = (u' ⊗ u) exp(-i Σ_{μ=1..8} J_μ Γ_μ⊗Γ_μ) (v ⊗ v').

#include <array>
#include <string>
#include <vector>

#include "lightcone/basis.hpp"
#include "lightcone/linalg.hpp"
#include "lightcone/rng.hpp"

namespace lightcone {

enum class GateFamily { kak, swap, qutrit24, lossless7, explicit_matrix, haar };

inline std::string family_name(GateFamily f) {
    switch (f) {
        case GateFamily::kak: return "kak";
        case GateFamily::swap: return "swap";
        case GateFamily::qutrit24: return "qutrit24";
        case GateFamily::lossless7: return "lossless7";
        case GateFamily::explicit_matrix: return "explicit";
        case GateFamily::haar: return "haar";
    }
    return "?";
}

struct Gate {
    int local_dim = 2;
    CMat matrix;  // d^2 x d^2 unitary
    GateFamily family = GateFamily::explicit_matrix;
    std::vector<double> params;
};

inline void check_gate_unitary(const CMat& u, const std::string& what,
                               double tol = 1e-10) {
    if (!is_unitary(u, tol))
        throw ValidationError(what + ": matrix not unitary within " +
                              std::to_string(tol));
}

inline Gate make_explicit_gate(int d, const CMat& u) {
    if (u.rows() != static_cast<long>(d) * d || u.cols() != u.rows())
        throw ValidationError("explicit gate: dimension != d^2");
    check_gate_unitary(u, "explicit gate");
    return Gate{d, u, GateFamily::explicit_matrix, {}};
}

inline Gate haar_gate(int d, RngStream& rng) {
    Gate g{d, sample_cue(static_cast<long>(d) * d, rng), GateFamily::haar, {}};
    return g;
}

// Single-site unitary from unconstrained coordinates: exp(i a . Gamma) over
// the traceless elements (3 reals for d=2, 8 for d=3).
inline CMat local_unitary_from_params(int d, const std::vector<double>& a) {
    const auto basis = single_site_hermitian_basis(d);
    const std::size_t n = basis.size() - 1;
    if (a.size() != n)
        throw ValidationError("local unitary: expected " + std::to_string(n) +
                              " parameters for d=" + std::to_string(d));
    CMat h = CMat::Zero(d, d);
    for (std::size_t k = 0; k < n; ++k) h += a[k] * basis[k + 1];
    return exp_i_hermitian(h);
}

namespace paulis {
inline CMat sx() {
    CMat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline CMat sy() {
    CMat m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}
inline CMat sz() {
    CMat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
}  // namespace paulis

// V(J) = exp(i Σ J_α σα⊗σα). Each factor is cos(J) I + i sin(J) σα⊗σα
// because (σα⊗σα)^2 = I.
inline CMat kak_core(double jx, double jy, double jz) {
    const CMat id4 = CMat::Identity(4, 4);
    auto factor = [&](double j, const CMat& s) {
        CMat ss = tensor_product(s, s);
        return CMat(std::cos(j) * id4 + Complex(0.0, std::sin(j)) * ss);
    };
    return factor(jx, paulis::sx()) * factor(jy, paulis::sy()) *
           factor(jz, paulis::sz());
}

inline Gate kak_gate(double jx, double jy, double jz,
                     const CMat& u = CMat::Identity(2, 2),
                     const CMat& u_p = CMat::Identity(2, 2),
                     const CMat& v = CMat::Identity(2, 2),
                     const CMat& v_p = CMat::Identity(2, 2)) {
    const double lim = M_PI / 2 + 1e-12;
    if (std::abs(jx) > lim || std::abs(jy) > lim || std::abs(jz) > lim)
        throw ValidationError("kak_gate: J components must lie in [-pi/2, pi/2]");
    for (const CMat* m : {&u, &u_p, &v, &v_p}) {
        if (m->rows() != 2 || m->cols() != 2)
            throw ValidationError("kak_gate: local factor is not 2x2");
        check_gate_unitary(*m, "kak_gate local factor", 1e-10);
    }
    CMat full = tensor_product(u_p, u) * kak_core(jx, jy, jz) * tensor_product(v, v_p);
    return Gate{2, full, GateFamily::kak, {jx, jy, jz}};
}

inline Gate swap_gate(int d) {
    if (d < 2) throw ValidationError("swap_gate: d must be >= 2");
    const long dd = static_cast<long>(d) * d;
    CMat s = CMat::Zero(dd, dd);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
    return Gate{d, s, GateFamily::swap, {}};
}

inline Gate qutrit_gate(const std::array<double, 8>& j,
                        const CMat& u = CMat::Identity(3, 3),
                        const CMat& u_p = CMat::Identity(3, 3),
                        const CMat& v = CMat::Identity(3, 3),
                        const CMat& v_p = CMat::Identity(3, 3)) {
    for (const CMat* m : {&u, &u_p, &v, &v_p}) {
        if (m->rows() != 3 || m->cols() != 3)
            throw ValidationError("qutrit_gate: local factor is not 3x3");
        check_gate_unitary(*m, "qutrit_gate local factor", 1e-10);
    }
    const auto gm = single_site_hermitian_basis(3);
    CMat h = CMat::Zero(9, 9);
    for (int mu = 1; mu <= 8; ++mu)
        h += j[static_cast<std::size_t>(mu - 1)] *
             tensor_product(gm[static_cast<std::size_t>(mu)],
                            gm[static_cast<std::size_t>(mu)]);
    CMat core = exp_i_hermitian(-h);  // exp(-i Σ J Γ⊗Γ)
    CMat full = tensor_product(u_p, u) * core * tensor_product(v, v_p);
    Gate g{3, full, GateFamily::qutrit24, {}};
    g.params.assign(j.begin(), j.end());
    return g;
}

// Dual-unitary construction with one peripheral channel eigenvalue:
// Jx = -Jy = -pi/4, u = w exp(-i θQ σz/2), v = exp(i θR σz/2) w†.
inline Gate lossless_example_gate(double jz, double theta_q, double theta_r,
                                  const CMat& w,
                                  const CMat& u_p = CMat::Identity(2, 2),
                                  const CMat& v_p = CMat::Identity(2, 2)) {
    if (w.rows() != 2 || w.cols() != 2)
        throw ValidationError("lossless_example_gate: w is not 2x2");
    check_gate_unitary(w, "lossless_example_gate w", 1e-10);
    const CMat u = w * exp_i_hermitian(-0.5 * theta_q * paulis::sz());
    const CMat v = exp_i_hermitian(0.5 * theta_r * paulis::sz()) * w.adjoint();
    Gate g = kak_gate(-M_PI / 4, M_PI / 4, jz, u, u_p, v, v_p);
    g.family = GateFamily::lossless7;
    g.params = {jz, theta_q, theta_r};
    return g;
}

// Realignment R[(a b),(α β)] = U[(a α),(b β)]; its singular values squared,
// normalized by d^2, are the operator Schmidt coefficients.
inline CMat realign(const CMat& u, int d) {
    const long dd = static_cast<long>(d) * d;
    if (u.rows() != dd || u.cols() != dd)
        throw ValidationError("realign: dimension != d^2");
    CMat r(dd, dd);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int al = 0; al < d; ++al)
                for (int be = 0; be < d; ++be)
                    r(a * d + b, al * d + be) = u(a * d + al, b * d + be);
    return r;
}

struct SchmidtData {
    std::vector<double> coefficients;  // a_mu, descending, sum = 1
    double linear_entropy = 0.0;       // E = 1 - Σ a_mu^2
};

inline SchmidtData operator_schmidt(const Gate& g) {
    const int d = g.local_dim;
    Eigen::JacobiSVD<CMat> svd(realign(g.matrix, d));
    const RVec s = svd.singularValues();
    SchmidtData out;
    double sum_sq = 0.0;
    const double dd = double(d) * d;
    for (long k = 0; k < s.size(); ++k) {
        const double a = s(k) * s(k) / dd;
        if (a > 1e-14) out.coefficients.push_back(a);
        sum_sq += a * a;
    }
    out.linear_entropy = 1.0 - sum_sq;
    return out;
}

inline double max_linear_entropy(int d) {
    const double dd = double(d) * d;
    return (dd - 1.0) / dd;
}

inline double dual_unitarity_residual(const Gate& g) {
    const CMat r = realign(g.matrix, g.local_dim);
    return max_abs(r.adjoint() * r - CMat::Identity(r.rows(), r.cols()));
}

inline bool is_dual_unitary(const Gate& g, double tol = 1e-8) {
    return dual_unitarity_residual(g) <= tol;
}

}  // namespace lightcone

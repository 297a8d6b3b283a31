#pragma once

// Information transfer along the lightcone: channel iteration of density
// matrices, quantum Fisher information of parameterized state families,
// eta curves (trace-distance and QFI transfer ratios), decomposition in the
// channel eigenbasis, and the brute-force full-chain oracle.

#include <functional>
#include <string>
#include <vector>

#include "lightcone/brickwork.hpp"
#include "lightcone/channel.hpp"

namespace lightcone {

struct DensityMatrix {
    int local_dim = 2;
    int sites = 1;
    CMat matrix;
};

inline void validate_density_matrix(const DensityMatrix& rho,
                                    double herm_tol = 1e-10,
                                    double trace_tol = 1e-10,
                                    double eig_floor = -1e-9,
                                    const std::string& what = "density matrix") {
    long dim = 1;
    for (int s = 0; s < rho.sites; ++s) dim *= rho.local_dim;
    if (rho.matrix.rows() != dim || rho.matrix.cols() != dim)
        throw ValidationError(what + ": dimension mismatch");
    if (max_abs(rho.matrix - rho.matrix.adjoint()) > herm_tol)
        throw NumericalError(what + ": not Hermitian within tol");
    if (std::abs(rho.matrix.trace() - Complex(1.0)) > trace_tol)
        throw NumericalError(what + ": trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eig_floor)
        throw NumericalError(what + ": negative eigenvalue beyond floor");
}

// Apply the channel k times. Iteration runs in basis coordinates; the state
// invariants are re-checked at every power so drift is caught at the first
// failing step.
inline DensityMatrix iterate_channel(const DensityMatrix& rho,
                                     const Superoperator& s, int k) {
    if (k < 0) throw ValidationError("iterate_channel: k must be >= 0");
    if (rho.local_dim != s.local_dim || rho.sites != s.sites)
        throw ValidationError("iterate_channel: state/channel shape mismatch");
    validate_density_matrix(rho);
    RVec c = s.basis->real_coordinates(rho.matrix);
    DensityMatrix out = rho;
    for (int step = 1; step <= k; ++step) {
        c = s.matrix * c;
        out.matrix = s.basis->reconstruct(c);
        try {
            validate_density_matrix(out);
        } catch (const NumericalError& e) {
            throw NumericalError("iterate_channel: invariant drift at power " +
                                 std::to_string(step) + ": " + e.what());
        }
    }
    return out;
}

enum class EncodingKind { peripheral7, lossy7, phase_plus, custom };

inline std::string encoding_name(EncodingKind k) {
    switch (k) {
        case EncodingKind::peripheral7: return "peripheral7";
        case EncodingKind::lossy7: return "lossy7";
        case EncodingKind::phase_plus: return "phase_plus";
        case EncodingKind::custom: return "custom";
    }
    return "?";
}

// A lambda-parameterized family of M-qudit states.
struct StateFamily {
    EncodingKind kind = EncodingKind::custom;
    double lambda0 = 0.0;
    std::function<DensityMatrix(double)> generator;

    DensityMatrix at(double lam) const { return generator(lam); }
};

// rho(lambda) = (I + tanh(lambda) w σz w†)/2 — supported on the peripheral
// eigenoperator of the lossless construction.
inline StateFamily make_peripheral_encoding(const CMat& w, double lambda0 = 0.3) {
    check_gate_unitary(w, "peripheral encoding w");
    CMat a1 = w * paulis::sz() * w.adjoint();
    StateFamily fam;
    fam.kind = EncodingKind::peripheral7;
    fam.lambda0 = lambda0;
    fam.generator = [a1](double lam) {
        DensityMatrix rho{2, 1, CMat::Zero(2, 2)};
        rho.matrix = 0.5 * (CMat::Identity(2, 2) + std::tanh(lam) * a1);
        return rho;
    };
    return fam;
}

// rho(lambda) = (I + tanh(lambda) (A2 + A3)/sqrt(2))/2, supported on the two
// decaying eigenoperators A2, A3 of the lossless construction;
// theta_bar = theta_Q + theta_R.
inline StateFamily make_lossy_encoding(const CMat& w, double theta_bar,
                                       double lambda0 = 0.3) {
    check_gate_unitary(w, "lossy encoding w");
    const CMat sx = w * paulis::sx() * w.adjoint();
    const CMat sy = w * paulis::sy() * w.adjoint();
    const double h = 0.5 * theta_bar;
    CMat a2 = std::cos(h) * sx + std::sin(h) * sy;
    CMat a3 = -std::sin(h) * sx + std::cos(h) * sy;
    CMat dir = (a2 + a3) / std::sqrt(2.0);
    StateFamily fam;
    fam.kind = EncodingKind::lossy7;
    fam.lambda0 = lambda0;
    fam.generator = [dir](double lam) {
        DensityMatrix rho{2, 1, CMat::Zero(2, 2)};
        rho.matrix = 0.5 * (CMat::Identity(2, 2) + std::tanh(lam) * dir);
        return rho;
    };
    return fam;
}

// rho(lambda) = (e^{i λ σz} |+><+| e^{-i λ σz})^{⊗ M}.
inline StateFamily make_phase_plus_encoding(int sites = 1, double lambda0 = 0.25) {
    if (sites < 1) throw ValidationError("phase_plus: sites must be >= 1");
    StateFamily fam;
    fam.kind = EncodingKind::phase_plus;
    fam.lambda0 = lambda0;
    fam.generator = [sites](double lam) {
        CMat plus(2, 2);
        plus << 0.5, 0.5, 0.5, 0.5;
        CMat r = exp_i_hermitian(lam * paulis::sz());
        CMat one = r * plus * r.adjoint();
        DensityMatrix rho{2, sites, tensor_power(one, sites)};
        return rho;
    };
    return fam;
}

// QFI spectral formula: F = 2 Σ_{ij; p_i+p_j > floor} |<i|∂ρ|j>|^2/(p_i+p_j).
inline double qfi_spectral(const CMat& rho, const CMat& drho,
                           double p_floor = 1e-12) {
    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    const RVec p = es.eigenvalues().cwiseMax(0.0);
    const CMat v = es.eigenvectors();
    const CMat m = v.adjoint() * drho * v;
    double f = 0.0;
    for (long i = 0; i < p.size(); ++i)
        for (long j = 0; j < p.size(); ++j) {
            const double denom = p(i) + p(j);
            if (denom <= p_floor) continue;
            f += std::norm(m(i, j)) / denom;
        }
    return 2.0 * f;
}

inline constexpr double kQfiDefaultStep = 1e-5;
inline constexpr double kQfiFloor = 1e-12;

// Central-difference QFI with a step-halving consistency check: if the
// estimates at delta and delta/2 disagree by more than richardson_tol
// (relative), the derivative is dominated by eigensolver noise.
inline double quantum_fisher_information(
    const std::function<DensityMatrix(double)>& gen, double lambda0,
    double delta = kQfiDefaultStep, double richardson_tol = 0.01,
    double p_floor = kQfiFloor) {
    if (delta <= 0.0) throw ValidationError("qfi: delta must be positive");
    const CMat rho0 = gen(lambda0).matrix;
    auto estimate = [&](double h) {
        CMat drho = (gen(lambda0 + h).matrix - gen(lambda0 - h).matrix) / (2 * h);
        return qfi_spectral(rho0, drho, p_floor);
    };
    const double f_full = estimate(delta);
    const double f_half = estimate(delta / 2);
    const double scale = std::max(std::abs(f_full), std::abs(f_half));
    if (scale > 1e-12 && std::abs(f_full - f_half) > richardson_tol * scale)
        throw NumericalError(
            "qfi: step-size check failed (estimates at delta and delta/2 "
            "disagree by more than " + std::to_string(richardson_tol * 100) +
            "%)");
    return f_full;
}

inline double quantum_fisher_information(const StateFamily& fam,
                                         double delta = kQfiDefaultStep,
                                         double richardson_tol = 0.01,
                                         double p_floor = kQfiFloor) {
    return quantum_fisher_information(fam.generator, fam.lambda0, delta,
                                      richardson_tol, p_floor);
}

struct TransferCurve {
    std::string kind;         // "eta_F" or "eta_D"
    std::vector<int> steps;   // t = number of channel applications
    std::vector<double> eta;
    std::vector<double> bound;  // |z_max|^t
};

inline void check_curve_monotone(const TransferCurve& c, double tol = 1e-8) {
    for (std::size_t i = 0; i + 1 < c.eta.size(); ++i)
        if (c.eta[i + 1] > c.eta[i] + tol)
            throw NumericalError("transfer curve: eta increased at step " +
                                 std::to_string(c.steps[i + 1]));
}

// eta_F(t) = sqrt(F[rho_out(t)] / F[rho_in]) for every t in 0..t_max.
inline TransferCurve eta_curves(const StateFamily& fam, const Superoperator& s,
                                int t_max, double delta = kQfiDefaultStep,
                                double richardson_tol = 0.01,
                                double p_floor = kQfiFloor) {
    if (t_max < 1) throw ValidationError("eta_curves: t_max must be >= 1");
    const double zmax = std::abs(channel_spectrum(s).z_max);

    // Evolve the five probe states (lambda0, ±delta, ±delta/2) in lockstep.
    const std::array<double, 5> offsets = {0.0, delta, -delta, delta / 2,
                                           -delta / 2};
    std::array<RVec, 5> coords;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        DensityMatrix rho = fam.at(fam.lambda0 + offsets[k]);
        validate_density_matrix(rho);
        if (rho.local_dim != s.local_dim || rho.sites != s.sites)
            throw ValidationError("eta_curves: family/channel shape mismatch");
        coords[k] = s.basis->real_coordinates(rho.matrix);
    }
    auto qfi_here = [&]() {
        const CMat rho0 = s.basis->reconstruct(coords[0]);
        auto est = [&](const RVec& plus, const RVec& minus, double h) {
            CMat drho =
                (s.basis->reconstruct(plus) - s.basis->reconstruct(minus)) /
                (2 * h);
            return qfi_spectral(rho0, drho, p_floor);
        };
        const double f_full = est(coords[1], coords[2], delta);
        const double f_half = est(coords[3], coords[4], delta / 2);
        const double scale = std::max(std::abs(f_full), std::abs(f_half));
        if (scale > 1e-12 && std::abs(f_full - f_half) > richardson_tol * scale)
            throw NumericalError("eta_curves: qfi step-size check failed");
        return f_full;
    };

    const double f_in = qfi_here();
    if (f_in <= 1e-12)
        throw ValidationError("eta_curves: initial QFI is zero; eta undefined");

    TransferCurve curve;
    curve.kind = "eta_F";
    double bound_t = 1.0;
    curve.steps.push_back(0);
    curve.eta.push_back(1.0);
    curve.bound.push_back(bound_t);
    for (int t = 1; t <= t_max; ++t) {
        for (auto& c : coords) c = s.matrix * c;
        bound_t *= zmax;
        curve.steps.push_back(t);
        curve.eta.push_back(std::sqrt(std::max(qfi_here(), 0.0) / f_in));
        curve.bound.push_back(bound_t);
    }
    check_curve_monotone(curve);
    return curve;
}

// eta_D after t applications, for a pair of input states.
inline double trace_distance_eta(const DensityMatrix& rho1,
                                 const DensityMatrix& rho2,
                                 const Superoperator& s, int t) {
    if (t < 0) throw ValidationError("trace_distance_eta: t must be >= 0");
    const double d_in = trace_norm_distance(rho1.matrix, rho2.matrix);
    if (d_in <= 1e-14)
        throw ValidationError("trace_distance_eta: identical inputs rejected");
    DensityMatrix out1 = iterate_channel(rho1, s, t);
    DensityMatrix out2 = iterate_channel(rho2, s, t);
    return trace_norm_distance(out1.matrix, out2.matrix) / d_in;
}

inline TransferCurve eta_curves(const DensityMatrix& rho1,
                                const DensityMatrix& rho2,
                                const Superoperator& s, int t_max) {
    if (t_max < 1) throw ValidationError("eta_curves: t_max must be >= 1");
    const double zmax = std::abs(channel_spectrum(s).z_max);
    const double d_in = trace_norm_distance(rho1.matrix, rho2.matrix);
    if (d_in <= 1e-14)
        throw ValidationError("eta_curves: identical inputs rejected");
    RVec c1 = s.basis->real_coordinates(rho1.matrix);
    RVec c2 = s.basis->real_coordinates(rho2.matrix);
    TransferCurve curve;
    curve.kind = "eta_D";
    double bound_t = 1.0;
    curve.steps.push_back(0);
    curve.eta.push_back(1.0);
    curve.bound.push_back(1.0);
    for (int t = 1; t <= t_max; ++t) {
        c1 = s.matrix * c1;
        c2 = s.matrix * c2;
        bound_t *= zmax;
        const double d_out = trace_norm_distance(s.basis->reconstruct(c1),
                                                 s.basis->reconstruct(c2));
        curve.steps.push_back(t);
        curve.eta.push_back(d_out / d_in);
        curve.bound.push_back(bound_t);
    }
    check_curve_monotone(curve);
    return curve;
}

struct EigenbasisDecomposition {
    CVec coefficients;   // one per eigenoperator, trivial one included
    double residual = 0.0;  // reconstruction residual in coordinate norm
};

// Coefficients of rho in the (generally non-orthogonal) eigenoperator frame,
// via the dual basis (solve V f = coords(rho)).
inline EigenbasisDecomposition eigenbasis_coefficients(
    const DensityMatrix& rho, const ChannelSpectrum& spec) {
    if (near_defective(spec))
        throw NumericalError(
            "eigenbasis_coefficients: spectrum near-defective (condition " +
            std::to_string(spec.diag_condition) + "); decomposition unsupported");
    CVec r = spec.basis->coordinates(rho.matrix);
    EigenbasisDecomposition out;
    out.coefficients = spec.coords.partialPivLu().solve(r);
    out.residual = (spec.coords * out.coefficients - r).norm();
    return out;
}

// Full-chain evolution: rho(0) = rho_in ⊗ (I/d)^{(N-M+1)}, N brickwork
// layers (N/2 Floquet periods), then trace out all but the last M sites.
inline DensityMatrix brute_force_reduced_state(const Gate& g, int n, int sites,
                                               const DensityMatrix& rho_in,
                                               LayerOrder order) {
    const int d = g.local_dim;
    check_chain_args(d, n);
    if (sites < 1 || sites > n + 1)
        throw ValidationError("brute_force_reduced_state: M out of range");
    if (rho_in.local_dim != d || rho_in.sites != sites)
        throw ValidationError("brute_force_reduced_state: input state mismatch");
    validate_density_matrix(rho_in);

    long env_dim = 1;
    for (int s = 0; s < n + 1 - sites; ++s) env_dim *= d;
    CMat rho = tensor_product(rho_in.matrix,
                              CMat::Identity(env_dim, env_dim) / double(env_dim));

    const CMat even = brickwork_even_layer(g, n);
    const CMat odd = brickwork_odd_layer(g, n);
    const CMat* first = order == LayerOrder::even_first ? &even : &odd;
    const CMat* second = order == LayerOrder::even_first ? &odd : &even;
    for (int layer = 0; layer < n; ++layer) {
        const CMat& u = (layer % 2 == 0) ? *first : *second;
        rho = u * rho * u.adjoint();
    }
    DensityMatrix out{d, sites, partial_trace_first(rho, env_dim)};
    validate_density_matrix(out);
    return out;
}

inline DensityMatrix brute_force_reduced_state(const Gate& g, int n, int sites,
                                               const DensityMatrix& rho_in) {
    return brute_force_reduced_state(g, n, sites, rho_in,
                                     layer_order_for_window(sites));
}

// The lightcone pipeline rho_out = Lambda_out[Phi_M^{N-M+1}[Lambda_in[rho_in]]].
inline DensityMatrix lightcone_reduced_state(const Gate& g, int n, int sites,
                                             const DensityMatrix& rho_in) {
    if (n % 2 != 0 || n < 2)
        throw ValidationError("lightcone_reduced_state: N must be even and >= 2");
    if (sites > n + 1)
        throw ValidationError("lightcone_reduced_state: M exceeds chain size");
    Superoperator phi = build_phi(g, sites);
    validate_density_matrix(rho_in);
    CMat x = rho_in.matrix;
    if (sites >= 3) {
        const CMat lin = lambda_in_matrix(g, sites);
        x = lin * x * lin.adjoint();
    }
    RVec c = phi.basis->real_coordinates(x);
    for (int k = 0; k < n - sites + 1; ++k) c = phi.matrix * c;
    CMat y = phi.basis->reconstruct(c);
    if (sites >= 3) {
        const CMat lout = lambda_out_matrix(g, sites);
        y = lout * y * lout.adjoint();
    }
    DensityMatrix out{g.local_dim, sites, std::move(y)};
    validate_density_matrix(out);
    return out;
}

}  // namespace lightcone

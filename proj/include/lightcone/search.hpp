#pragma once

// Ensemble sweeps and derivative-free optimization over gate parameters
// targeting peripheral eigenvalues of Phi_M, plus the scan that classifies
// peripheral instances against the kπ/4 coupling pattern.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "lightcone/channel.hpp"
#include "lightcone/gates.hpp"
#include "lightcone/rng.hpp"

namespace lightcone {

// Order-preserving parallel map over [0, count); results land by index so
// the outcome is independent of scheduling.
template <typename F>
inline void parallel_for(long count, int threads, F&& body) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= count) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<long>(threads, count);
    pool.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct SweepResult {
    int local_dim = 2;
    int sites = 1;
    long samples = 0;
    std::uint64_t seed = 0;
    double eps = 1e-6;
    std::vector<double> z_max_moduli;
    long peripheral_count = 0;

    double mean_z_max() const {
        if (z_max_moduli.empty()) return 0.0;
        double acc = 0.0;
        for (double v : z_max_moduli) acc += v;
        return acc / double(z_max_moduli.size());
    }
};

inline SweepResult haar_sweep(int d, int sites, long samples,
                              std::uint64_t seed, double eps = 1e-6,
                              int threads = 1,
                              long size_cap = kMaxSuperopDim) {
    if (samples < 1) throw ValidationError("haar_sweep: samples must be >= 1");
    SweepResult out;
    out.local_dim = d;
    out.sites = sites;
    out.samples = samples;
    out.seed = seed;
    out.eps = eps;
    out.z_max_moduli.assign(static_cast<std::size_t>(samples), 0.0);
    parallel_for(samples, threads, [&](long i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        Gate g = haar_gate(d, rng);
        Superoperator s = build_phi(g, sites, size_cap);
        ChannelSpectrum spec = channel_spectrum(s, eps);
        out.z_max_moduli[static_cast<std::size_t>(i)] = std::abs(spec.z_max);
    });
    for (double v : out.z_max_moduli)
        if (v >= 1.0 - eps) ++out.peripheral_count;
    return out;
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex descent.

struct NelderMeadOptions {
    long max_evals = 2000;
    double initial_step = 0.35;
    double f_tol = 1e-14;
    double x_tol = 1e-12;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    long evals = 0;
};

inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    std::vector<std::vector<double>> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += opt.initial_step;
    for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };
    while (evals < opt.max_evals) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[n],
                          second = order[n - 1];
        if (fs[worst] - fs[best] < opt.f_tol) break;
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::abs(xs[worst][i] - xs[best][i]));
        if (spread < opt.x_tol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += xs[k][i];
        }
        for (auto& c : centroid) c /= double(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = centroid[i] + coef * (xs[worst][i] - centroid[i]);
            return x;
        };
        std::vector<double> xr = blend(-1.0);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            std::vector<double> xe = blend(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = std::move(xc);
                fs[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        xs[k][i] = xs[best][i] + 0.5 * (xs[k][i] - xs[best][i]);
                    fs[k] = eval(xs[k]);
                    if (evals >= opt.max_evals) break;
                }
            }
        }
    }
    sort_simplex();
    return NelderMeadResult{xs[order[0]], fs[order[0]], evals};
}

// ---------------------------------------------------------------------------
// Peripheral-eigenvalue search.

enum class SearchFamily { kak, qutrit24 };

inline std::string search_family_name(SearchFamily f) {
    return f == SearchFamily::kak ? "kak" : "qutrit24";
}

// wrap J into [-pi/2, pi/2] (period pi up to a global phase of the gate)
inline double wrap_coupling(double j) {
    double r = std::remainder(j, M_PI);
    if (r > M_PI / 2) r -= M_PI;
    if (r < -M_PI / 2) r += M_PI;
    return r;
}

// Parameter layouts:
//   kak, M = 1 : [Jx Jy Jz | u(3) | v(3)]                     (9)
//   kak, M >= 2: [Jx Jy Jz | u(3) | v(3) | u'(3) | v'(3)]     (15)
//   qutrit24   : [J(8) | u(8) | v(8)]                          (24)
inline Gate gate_from_search_params(SearchFamily family, int sites,
                                    const std::vector<double>& p) {
    if (family == SearchFamily::kak) {
        auto loc = [&](std::size_t off) {
            return local_unitary_from_params(2, {p[off], p[off + 1], p[off + 2]});
        };
        const double jx = wrap_coupling(p[0]), jy = wrap_coupling(p[1]),
                     jz = wrap_coupling(p[2]);
        if (sites == 1) {
            if (p.size() != 9)
                throw ValidationError("kak search (M=1): expected 9 parameters");
            return kak_gate(jx, jy, jz, loc(3), CMat::Identity(2, 2), loc(6),
                            CMat::Identity(2, 2));
        }
        if (p.size() != 15)
            throw ValidationError("kak search (M>=2): expected 15 parameters");
        return kak_gate(jx, jy, jz, loc(3), loc(9), loc(6), loc(12));
    }
    if (p.size() != 24)
        throw ValidationError("qutrit24 search: expected 24 parameters");
    std::array<double, 8> j{};
    std::vector<double> au(8), av(8);
    for (int i = 0; i < 8; ++i) {
        j[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)];
        au[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(8 + i)];
        av[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(16 + i)];
    }
    return qutrit_gate(j, local_unitary_from_params(3, au),
                       CMat::Identity(3, 3), local_unitary_from_params(3, av),
                       CMat::Identity(3, 3));
}

inline std::size_t search_param_count(SearchFamily family, int sites) {
    if (family == SearchFamily::qutrit24) return 24;
    return sites == 1 ? 9 : 15;
}

inline double one_minus_zmax(const Gate& g, int sites,
                             long size_cap = kMaxSuperopDim) {
    Superoperator s = build_phi(g, sites, size_cap);
    return 1.0 - std::abs(channel_spectrum(s).z_max);
}

struct ConjecturePattern {
    bool has_quarter_pi = false;  // some |J| within tol of pi/4
    bool matched = false;         // and another |J| within tol of k pi/4
    int k = 0;
    double residual = 0.0;        // max deviation of the two pattern couplings
};

// Conjectured necessary pattern for peripheral Phi_2 eigenvalues:
// one |J| = pi/4 and another |J| = k pi/4, k integer (k in {0,1,2} within
// the principal range).
inline ConjecturePattern conjecture_pattern(const std::array<double, 3>& j,
                                            double tol = 1e-3) {
    ConjecturePattern out;
    int quarter_axis = -1;
    double best_dev = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        const double dev = std::abs(std::abs(j[static_cast<std::size_t>(a)]) - M_PI / 4);
        if (dev <= tol && dev < best_dev) {
            best_dev = dev;
            quarter_axis = a;
        }
    }
    if (quarter_axis < 0) return out;
    out.has_quarter_pi = true;
    for (int b = 0; b < 3; ++b) {
        if (b == quarter_axis) continue;
        const double v = std::abs(j[static_cast<std::size_t>(b)]);
        const int k = static_cast<int>(std::lround(v / (M_PI / 4)));
        const double dev = std::abs(v - k * (M_PI / 4));
        if (dev <= tol) {
            out.matched = true;
            out.k = k;
            out.residual = std::max(best_dev, dev);
            return out;
        }
    }
    return out;
}

struct SearchHit {
    SearchFamily family = SearchFamily::kak;
    int sites = 1;
    std::vector<double> params;
    double one_minus_zmax = 0.0;
    double linear_entropy = 0.0;
    bool dual_unitary = false;
    bool low_entropy_flag = false;  // E < 0.5: reported absent, flag not fail
    ConjecturePattern pattern;      // kak family only
};

struct SearchOptions {
    long max_evals = 2000;
    long polish_evals = 2000;
    double hit_threshold = 1e-6;
    double polish_threshold = 1e-9;
    double pattern_tol = 1e-3;
    int threads = 1;
};

inline SearchHit classify_hit(SearchFamily family, int sites,
                              const std::vector<double>& params, double f,
                              double pattern_tol) {
    Gate g = gate_from_search_params(family, sites, params);
    SearchHit hit;
    hit.family = family;
    hit.sites = sites;
    hit.params = params;
    for (std::size_t i = 0; i < 3 && family == SearchFamily::kak && i < hit.params.size(); ++i)
        hit.params[i] = wrap_coupling(hit.params[i]);
    hit.one_minus_zmax = f;
    hit.linear_entropy = operator_schmidt(g).linear_entropy;
    hit.dual_unitary = is_dual_unitary(g);
    hit.low_entropy_flag = hit.linear_entropy < 0.5;
    if (family == SearchFamily::kak)
        hit.pattern = conjecture_pattern(
            {hit.params[0], hit.params[1], hit.params[2]}, pattern_tol);
    return hit;
}

inline std::vector<double> random_search_start(SearchFamily family, int sites,
                                               RngStream& rng) {
    const std::size_t n = search_param_count(family, sites);
    std::vector<double> x(n);
    if (family == SearchFamily::kak) {
        for (std::size_t i = 0; i < 3; ++i) x[i] = rng.uniform(-M_PI / 2, M_PI / 2);
        for (std::size_t i = 3; i < n; ++i) x[i] = rng.uniform(-3.0, 3.0);
    } else {
        for (std::size_t i = 0; i < 8; ++i) x[i] = rng.uniform(-M_PI / 2, M_PI / 2);
        for (std::size_t i = 8; i < n; ++i) x[i] = rng.uniform(-3.0, 3.0);
    }
    return x;
}

// Multi-start simplex descent on 1 - |z_max|; hits below the threshold are
// re-polished before classification.
inline std::vector<SearchHit> optimize_peripheral(SearchFamily family, int sites,
                                                  int restarts,
                                                  std::uint64_t seed,
                                                  const SearchOptions& opt = {}) {
    if (restarts < 1) throw ValidationError("optimize_peripheral: restarts >= 1");
    const int d = family == SearchFamily::kak ? 2 : 3;
    long sd = 1;
    for (int s = 0; s < 2 * sites; ++s) sd *= d;
    if (sd > kMaxSuperopDim)
        throw ValidationError("optimize_peripheral: d^(2M) exceeds size cap");

    std::vector<std::optional<SearchHit>> slots(static_cast<std::size_t>(restarts));
    auto objective = [&](const std::vector<double>& x) {
        return one_minus_zmax(gate_from_search_params(family, sites, x), sites);
    };
    parallel_for(restarts, opt.threads, [&](long r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r));
        std::vector<double> x0 = random_search_start(family, sites, rng);
        NelderMeadOptions nm;
        nm.max_evals = opt.max_evals;
        NelderMeadResult res = nelder_mead(objective, x0, nm);
        if (res.f > opt.hit_threshold) return;
        NelderMeadOptions polish;
        polish.max_evals = opt.polish_evals;
        polish.initial_step = 1e-3;
        NelderMeadResult fine = nelder_mead(objective, res.x, polish);
        if (fine.f > res.f) fine = res;
        if (fine.f <= opt.hit_threshold)
            slots[static_cast<std::size_t>(r)] =
                classify_hit(family, sites, fine.x, fine.f, opt.pattern_tol);
    });
    std::vector<SearchHit> hits;
    for (auto& s : slots)
        if (s) hits.push_back(std::move(*s));
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.one_minus_zmax != b.one_minus_zmax)
            return a.one_minus_zmax < b.one_minus_zmax;
        return a.params < b.params;
    });
    return hits;
}

struct ScanPoint {
    double j_beta = 0.0;
    double j_gamma = 0.0;
    double one_minus_zmax = 1.0;
    double linear_entropy = 0.0;
    bool peripheral = false;
    int conjecture_k = -1;  // -1: no k pi/4 pattern at tolerance
};

struct ScanResult {
    int fixed_axis = 0;  // 0=x: J_x = pi/4; remaining axes carry (beta, gamma)
    std::vector<ScanPoint> points;
};

// Grid scan of Phi_2 peripherality over (J_beta, J_gamma) with one coupling
// fixed at pi/4 and the local unitaries optimized per grid point.
inline ScanResult conjecture_scan(int fixed_axis,
                                  const std::vector<double>& beta_grid,
                                  const std::vector<double>& gamma_grid,
                                  std::uint64_t seed, int restarts = 3,
                                  long max_evals = 600,
                                  double peripheral_threshold = 1e-6,
                                  double pattern_tol = 1e-3, int threads = 1) {
    if (fixed_axis < 0 || fixed_axis > 2)
        throw ValidationError("conjecture_scan: fixed_axis must be 0, 1 or 2");
    for (const auto* grid : {&beta_grid, &gamma_grid})
        for (double v : *grid)
            if (std::abs(v) > M_PI / 2 + 1e-12)
                throw ValidationError("conjecture_scan: grid point outside range");
    ScanResult out;
    out.fixed_axis = fixed_axis;
    const long nb = static_cast<long>(beta_grid.size());
    const long ng = static_cast<long>(gamma_grid.size());
    out.points.resize(static_cast<std::size_t>(nb * ng));
    parallel_for(nb * ng, threads, [&](long idx) {
        const double jb = beta_grid[static_cast<std::size_t>(idx / ng)];
        const double jg = gamma_grid[static_cast<std::size_t>(idx % ng)];
        std::array<double, 3> j{};
        j[static_cast<std::size_t>(fixed_axis)] = M_PI / 4;
        int slot = 0;
        for (int a = 0; a < 3; ++a) {
            if (a == fixed_axis) continue;
            j[static_cast<std::size_t>(a)] = (slot++ == 0) ? jb : jg;
        }
        auto objective = [&](const std::vector<double>& locs) {
            auto loc = [&](std::size_t off) {
                return local_unitary_from_params(
                    2, {locs[off], locs[off + 1], locs[off + 2]});
            };
            Gate g = kak_gate(j[0], j[1], j[2], loc(0), loc(6), loc(3), loc(9));
            return one_minus_zmax(g, 2);
        };
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> best_x;
        for (int r = 0; r < restarts; ++r) {
            RngStream rng(seed, static_cast<std::uint64_t>(idx * restarts + r));
            std::vector<double> x0(12);
            for (auto& v : x0) v = rng.uniform(-3.0, 3.0);
            NelderMeadOptions nm;
            nm.max_evals = max_evals;
            NelderMeadResult res = nelder_mead(objective, x0, nm);
            if (res.f < best) {
                best = res.f;
                best_x = res.x;
            }
        }
        ScanPoint pt;
        pt.j_beta = jb;
        pt.j_gamma = jg;
        pt.one_minus_zmax = best;
        auto loc = [&](std::size_t off) {
            return local_unitary_from_params(
                2, {best_x[off], best_x[off + 1], best_x[off + 2]});
        };
        Gate g = kak_gate(j[0], j[1], j[2], loc(0), loc(6), loc(3), loc(9));
        pt.linear_entropy = operator_schmidt(g).linear_entropy;
        pt.peripheral = best <= peripheral_threshold;
        if (pt.peripheral) {
            ConjecturePattern pat = conjecture_pattern(j, pattern_tol);
            pt.conjecture_k = pat.matched ? pat.k : -1;
        }
        out.points[static_cast<std::size_t>(idx)] = pt;
    });
    return out;
}

}  // namespace lightcone

// Development pilot: computes the sampled ensemble references and scouts
// seeds for the statistical tests. Not part of the test suite; results are
// frozen into tests as named constants.

#include <cstdlib>
#include <iostream>
#include <string>

#include "lightcone/floquet.hpp"
#include "lightcone/lightcone.hpp"
#include "lightcone/runio.hpp"
#include "lightcone/search.hpp"

using namespace lightcone;

static RVec phases_of(const CMat& u) {
    Eigen::ComplexSchur<CMat> schur(u, false);
    RVec p(u.rows());
    for (long k = 0; k < u.rows(); ++k) p(k) = std::arg(schur.matrixT()(k, k));
    std::sort(p.data(), p.data() + p.size());
    return p;
}

static double gap_ratio_of(const CMat& u) {
    return mean_gap_ratio(unfolded_spacings(phases_of(u)));
}

int main(int argc, char** argv) {
    const std::string stage = argc > 1 ? argv[1] : "all";
    std::cout.precision(10);

    if (stage == "cue64" || stage == "all") {
        RngStream rng(777, 0);
        double acc = 0.0, acc2 = 0.0;
        const int draws = 2000;
        for (int k = 0; k < draws; ++k) {
            const double r = gap_ratio_of(sample_cue(64, rng));
            acc += r;
            acc2 += r * r;
        }
        const double m = acc / draws;
        std::cout << "cue64 mean_gap_ratio = " << m
                  << "  sem = " << std::sqrt((acc2 / draws - m * m) / draws)
                  << "\n" << std::flush;
    }
    if (stage == "cue512" || stage == "all") {
        RngStream rng(778, 0);
        double acc = 0.0, acc2 = 0.0;
        const int draws = 100;
        for (int k = 0; k < draws; ++k) {
            const double r = gap_ratio_of(sample_cue(512, rng));
            acc += r;
            acc2 += r * r;
            if ((k + 1) % 10 == 0) std::cout << "  [" << k + 1 << "]" << std::flush;
        }
        const double m = acc / draws;
        std::cout << "\ncue512 mean_gap_ratio = " << m
                  << "  sem = " << std::sqrt((acc2 / draws - m * m) / draws)
                  << "\n" << std::flush;
    }
    if (stage == "floquet" || stage == "all") {
        // scout gate seeds: Floquet gap ratio at N+1=9, expectation stddev
        // decrease 7 -> 9, entropy outliers
        for (std::uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8}) {
            RngStream rng(seed, 0);
            Gate gh = haar_gate(2, rng);
            Gate gl = lossless_example_gate(
                M_PI / 8, rng.uniform(-M_PI, M_PI), rng.uniform(-M_PI, M_PI),
                sample_cue(2, rng), sample_cue(2, rng), sample_cue(2, rng));
            for (const auto* tag : {"haar", "lossless"}) {
                const Gate& g = std::string(tag) == "haar" ? gh : gl;
                FloquetSpectrum f9 = floquet_spectrum(g, 8, LayerOrder::even_first);
                FloquetSpectrum f7 = floquet_spectrum(g, 6, LayerOrder::even_first);
                const double r9 = mean_gap_ratio(unfolded_spacings(f9.eigenphases));
                auto sd = [](const std::vector<std::array<double, 3>>& e, int c) {
                    double acc = 0.0;
                    for (const auto& v : e) acc += v[c] * v[c];
                    return std::sqrt(acc / double(e.size()));
                };
                auto e9 = eigenstate_site_expectations(f9, 8);
                auto e7 = eigenstate_site_expectations(f7, 6);
                auto ent = half_chain_entropy(f9);
                double m = 0, s2 = 0, mn = 1e9;
                for (double v : ent) {
                    m += v;
                    mn = std::min(mn, v);
                }
                m /= double(ent.size());
                for (double v : ent) s2 += (v - m) * (v - m);
                const double sdev = std::sqrt(s2 / double(ent.size() - 1));
                std::cout << "seed " << seed << " " << tag << ": r9 = " << r9
                          << "  sx7 = " << sd(e7, 0) << " sx9 = " << sd(e9, 0)
                          << "  sy7 = " << sd(e7, 1) << " sy9 = " << sd(e9, 1)
                          << "  sz7 = " << sd(e7, 2) << " sz9 = " << sd(e9, 2)
                          << "  ent mean = " << m << " min = " << mn
                          << " (mean-3sd = " << m - 3 * sdev << ")\n"
                          << std::flush;
            }
        }
    }
    if (stage == "curves" || stage == "all") {
        RngStream rng(5, 0);
        const double theta_q = rng.uniform(-M_PI, M_PI);
        const double theta_r = rng.uniform(-M_PI, M_PI);
        CMat w = sample_cue(2, rng);
        Gate g = lossless_example_gate(M_PI / 8, theta_q, theta_r, w,
                                       sample_cue(2, rng), sample_cue(2, rng));
        Superoperator s = build_phi(g, 1);
        StateFamily peripheral = make_peripheral_encoding(w, 0.3);
        TransferCurve c1 = eta_curves(peripheral, s, 200);
        double dev = 0.0;
        for (double e : c1.eta) dev = std::max(dev, std::abs(e - 1.0));
        std::cout << "peripheral max|eta-1| = " << dev << "\n";
        StateFamily lossy = make_lossy_encoding(w, theta_q + theta_r, 0.3);
        TransferCurve c2 = eta_curves(lossy, s, 60);
        std::vector<double> ts, ls;
        for (std::size_t i = 0; i < c2.steps.size(); ++i)
            if (c2.steps[i] >= 5 && c2.steps[i] <= 60) {
                ts.push_back(c2.steps[i]);
                ls.push_back(std::log(c2.eta[i]));
            }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            mx += ts[i];
            my += ls[i];
        }
        mx /= double(ts.size());
        my /= double(ts.size());
        double num = 0, den = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            num += (ts[i] - mx) * (ls[i] - my);
            den += (ts[i] - mx) * (ts[i] - mx);
        }
        std::cout << "lossy slope = " << num / den
                  << "  target = " << std::log(std::sin(M_PI / 4)) << "\n";
        StateFamily plus = make_phase_plus_encoding(1, 0.25);
        TransferCurve c3 = eta_curves(plus, s, 200);
        std::cout << "phase_plus eta(100) = " << c3.eta[100]
                  << " eta(190) = " << c3.eta[190] << " eta(200) = " << c3.eta[200]
                  << "\n" << std::flush;
    }
    if (stage == "search" || stage == "all") {
        SearchOptions opt;
        auto t0 = std::chrono::steady_clock::now();
        auto hits = optimize_peripheral(SearchFamily::kak, 2, 10, 2024, opt);
        auto t1 = std::chrono::steady_clock::now();
        std::cout << "kak M=2, 10 restarts ("
                  << std::chrono::duration_cast<std::chrono::seconds>(t1 - t0).count()
                  << " s): " << hits.size() << " hits\n";
        for (const auto& h : hits)
            std::cout << "  1-|z| = " << h.one_minus_zmax << " E = "
                      << h.linear_entropy << " dual = " << h.dual_unitary
                      << " pattern(k=" << h.pattern.k
                      << ", matched=" << h.pattern.matched << ") J = ("
                      << h.params[0] << ", " << h.params[1] << ", "
                      << h.params[2] << ")\n";
        auto t2 = std::chrono::steady_clock::now();
        auto qhits = optimize_peripheral(SearchFamily::qutrit24, 1, 6, 99, opt);
        auto t3 = std::chrono::steady_clock::now();
        std::cout << "qutrit M=1, 6 restarts ("
                  << std::chrono::duration_cast<std::chrono::seconds>(t3 - t2).count()
                  << " s): " << qhits.size() << " hits\n";
        for (const auto& h : qhits)
            std::cout << "  1-|z| = " << h.one_minus_zmax
                      << " E = " << h.linear_entropy << " dual = " << h.dual_unitary
                      << "\n";
        std::cout << std::flush;
    }
    if (stage == "scan" || stage == "all") {
        auto t0 = std::chrono::steady_clock::now();
        ScanResult sc = conjecture_scan(0, {M_PI / 4, 0.3}, {0.2}, 11, 3, 600);
        auto t1 = std::chrono::steady_clock::now();
        std::cout << "scan ("
                  << std::chrono::duration_cast<std::chrono::seconds>(t1 - t0).count()
                  << " s):\n";
        for (const auto& p : sc.points)
            std::cout << "  (" << p.j_beta << ", " << p.j_gamma
                      << "): 1-|z| = " << p.one_minus_zmax
                      << " E = " << p.linear_entropy << " k = " << p.conjecture_k
                      << "\n";
        std::cout << std::flush;
    }
    return 0;
}

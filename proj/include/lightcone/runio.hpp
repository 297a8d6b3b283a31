#pragma once

// Run configuration, command dispatch and deterministic result persistence.
// A single JSON config file fully determines a run; unknown keys are
// rejected. Records embed the effective config, its hash, the tolerances
// used, and a payload that is bit-for-bit reproducible for a fixed config.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcone/channel.hpp"
#include "lightcone/exchange.hpp"
#include "lightcone/floquet.hpp"
#include "lightcone/gates.hpp"
#include "lightcone/lightcone.hpp"
#include "lightcone/search.hpp"

namespace lightcone {

inline constexpr const char* kArtifactVersion = "0.1.0";

using json = nlohmann::json;

inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(const json& j) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(j.dump());
    return os.str();
}

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& context) {
    if (!obj.is_object())
        throw ValidationError(context + ": expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ValidationError(context + ": unknown key '" + item.key() + "'");
}

inline std::vector<double> param_list(const json& j, std::size_t n,
                                      const std::string& context) {
    if (!j.is_array() || j.size() != n)
        throw ValidationError(context + ": expected array of " +
                              std::to_string(n) + " reals");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

// Gate spec sub-document: {"family": ..., family parameters..., "seed"?}.
// Local unitaries are either 3-parameter (d=2) / 8-parameter (d=3)
// exponential coordinates or omitted for the identity; "random" draws from
// the run's stream. Explicit gates load via the matrix exchange format.
inline Gate gate_from_spec(const json& spec, RngStream& rng) {
    if (!spec.is_object() || !spec.contains("family"))
        throw ValidationError("gate spec: missing 'family'");
    const std::string fam = spec.at("family").get<std::string>();
    auto local2 = [&](const char* key) -> CMat {
        if (!spec.contains(key)) return CMat::Identity(2, 2);
        if (spec.at(key).is_string() && spec.at(key) == "random")
            return sample_cue(2, rng);
        return local_unitary_from_params(2, param_list(spec.at(key), 3,
                                                       std::string("gate.") + key));
    };
    auto local3 = [&](const char* key) -> CMat {
        if (!spec.contains(key)) return CMat::Identity(3, 3);
        if (spec.at(key).is_string() && spec.at(key) == "random")
            return sample_cue(3, rng);
        return local_unitary_from_params(3, param_list(spec.at(key), 8,
                                                       std::string("gate.") + key));
    };
    if (fam == "kak") {
        check_keys(spec, {"family", "Jx", "Jy", "Jz", "u", "u_p", "v", "v_p"},
                   "gate(kak)");
        return kak_gate(spec.at("Jx").get<double>(), spec.at("Jy").get<double>(),
                        spec.at("Jz").get<double>(), local2("u"), local2("u_p"),
                        local2("v"), local2("v_p"));
    }
    if (fam == "swap") {
        check_keys(spec, {"family", "d"}, "gate(swap)");
        return swap_gate(spec.value("d", 2));
    }
    if (fam == "haar") {
        check_keys(spec, {"family", "d"}, "gate(haar)");
        return haar_gate(spec.value("d", 2), rng);
    }
    if (fam == "qutrit24") {
        check_keys(spec, {"family", "J", "u", "u_p", "v", "v_p"}, "gate(qutrit24)");
        auto jv = param_list(spec.at("J"), 8, "gate.J");
        std::array<double, 8> j{};
        std::copy(jv.begin(), jv.end(), j.begin());
        return qutrit_gate(j, local3("u"), local3("u_p"), local3("v"),
                           local3("v_p"));
    }
    if (fam == "lossless7") {
        check_keys(spec, {"family", "Jz", "thetaQ", "thetaR", "w", "u_p", "v_p"},
                   "gate(lossless7)");
        CMat w = spec.contains("w") && !(spec.at("w").is_string())
                     ? local_unitary_from_params(
                           2, param_list(spec.at("w"), 3, "gate.w"))
                     : sample_cue(2, rng);
        CMat u_p = spec.contains("u_p") ? local2("u_p") : sample_cue(2, rng);
        CMat v_p = spec.contains("v_p") ? local2("v_p") : sample_cue(2, rng);
        return lossless_example_gate(spec.at("Jz").get<double>(),
                                     spec.value("thetaQ", 0.0),
                                     spec.value("thetaR", 0.0), w, u_p, v_p);
    }
    if (fam == "explicit") {
        check_keys(spec, {"family", "d", "path"}, "gate(explicit)");
        return make_explicit_gate(spec.at("d").get<int>(),
                                  load_matrix(spec.at("path").get<std::string>()));
    }
    throw ValidationError("gate spec: unknown family '" + fam + "'");
}

struct RunConfig {
    json doc;  // validated effective config (seed override already applied)

    std::string command() const { return doc.at("command").get<std::string>(); }
    std::uint64_t seed() const { return doc.value("seed", 1ULL); }
};

struct RunRecord {
    json record;  // full document, as persisted
    std::string summary;  // one-line human-readable result for stdout
};

inline json spectrum_payload(const Superoperator& s, double eps) {
    ChannelSpectrum spec = channel_spectrum(s, eps);
    json eigs = json::array();
    for (long i = 0; i < spec.eigenvalues.size(); ++i) {
        const Complex z = spec.eigenvalues(i);
        bool peripheral =
            std::find(spec.peripheral_indices.begin(),
                      spec.peripheral_indices.end(),
                      i) != spec.peripheral_indices.end();
        eigs.push_back({{"re", z.real()},
                        {"im", z.imag()},
                        {"modulus", std::abs(z)},
                        {"is_trivial", i == spec.trivial_index},
                        {"is_peripheral", peripheral}});
    }
    ChannelValidationReport rep = validate_channel(s);
    return json{{"eigenvalues", eigs},
                {"one_minus_zmax", 1.0 - std::abs(spec.z_max)},
                {"peripheral_count", spec.peripheral_indices.size()},
                {"diagonalizability_condition", spec.diag_condition},
                {"validation",
                 {{"unitality_residual", rep.unitality_residual},
                  {"trace_residual", rep.trace_residual},
                  {"choi_min_eigenvalue", rep.choi_min_eigenvalue},
                  {"ok", rep.ok()}}}};
}

inline json curve_payload(const TransferCurve& c) {
    return json{{"kind", c.kind},
                {"steps", c.steps},
                {"eta", c.eta},
                {"bound", c.bound}};
}

// Tabular text, header row, fixed column order, 17 significant digits.
inline std::string curve_table(const TransferCurve& c) {
    std::ostringstream os;
    os << "t\teta\tbound\n" << std::setprecision(17);
    for (std::size_t i = 0; i < c.steps.size(); ++i)
        os << c.steps[i] << "\t" << c.eta[i] << "\t" << c.bound[i] << "\n";
    return os.str();
}

inline void emit_curve(const RunRecord& record, const std::string& path) {
    if (!record.record.contains("payload") ||
        !record.record.at("payload").contains("curve"))
        throw ValidationError("emit_curve: record payload has no curve");
    const auto& c = record.record.at("payload").at("curve");
    TransferCurve curve;
    curve.kind = c.at("kind").get<std::string>();
    curve.steps = c.at("steps").get<std::vector<int>>();
    curve.eta = c.at("eta").get<std::vector<double>>();
    curve.bound = c.at("bound").get<std::vector<double>>();
    if (curve.steps.empty()) throw ValidationError("emit_curve: empty curve");
    atomic_write_text(path, curve_table(curve));
}

inline std::string scan_table(const ScanResult& scan) {
    std::ostringstream os;
    os << "J_beta\tJ_gamma\tone_minus_zmax\tentropy\tconjecture_k\n"
       << std::setprecision(17);
    for (const auto& p : scan.points)
        os << p.j_beta << "\t" << p.j_gamma << "\t" << p.one_minus_zmax << "\t"
           << p.linear_entropy << "\t" << p.conjecture_k << "\n";
    return os.str();
}

inline json hit_to_json(const SearchHit& h) {
    json pattern = {{"has_quarter_pi", h.pattern.has_quarter_pi},
                    {"matched", h.pattern.matched},
                    {"k", h.pattern.k},
                    {"residual", h.pattern.residual}};
    return json{{"family", search_family_name(h.family)},
                {"M", h.sites},
                {"params", h.params},
                {"one_minus_zmax", h.one_minus_zmax},
                {"linear_entropy", h.linear_entropy},
                {"dual_unitary", h.dual_unitary},
                {"low_entropy_flag", h.low_entropy_flag},
                {"conjecture_pattern", pattern}};
}

// Replayable gate spec for a search hit, in the config's gate format.
inline json hit_gate_spec(const SearchHit& h) {
    if (h.family == SearchFamily::kak) {
        json spec = {{"family", "kak"},
                     {"Jx", h.params[0]},
                     {"Jy", h.params[1]},
                     {"Jz", h.params[2]},
                     {"u", {h.params[3], h.params[4], h.params[5]}},
                     {"v", {h.params[6], h.params[7], h.params[8]}}};
        if (h.params.size() == 15) {
            spec["u_p"] = {h.params[9], h.params[10], h.params[11]};
            spec["v_p"] = {h.params[12], h.params[13], h.params[14]};
        }
        return spec;
    }
    json j = json::array(), u = json::array(), v = json::array();
    for (int i = 0; i < 8; ++i) {
        j.push_back(h.params[static_cast<std::size_t>(i)]);
        u.push_back(h.params[static_cast<std::size_t>(8 + i)]);
        v.push_back(h.params[static_cast<std::size_t>(16 + i)]);
    }
    return json{{"family", "qutrit24"}, {"J", j}, {"u", u}, {"v", v}};
}

struct RunContext {
    std::string out_dir;
    int threads = 1;
};

inline StateFamily encoding_from_spec(const json& enc) {
    check_keys(enc, {"kind", "lambda0", "sites"}, "encoding");
    const std::string kind = enc.at("kind").get<std::string>();
    const double lambda0 = enc.value("lambda0", 0.3);
    if (kind == "phase_plus")
        return make_phase_plus_encoding(enc.value("sites", 1), lambda0);
    if (kind == "peripheral7" || kind == "lossy7")
        throw ValidationError("encoding '" + kind +
                              "' is built from a lossless7 gate spec");
    throw ValidationError("encoding: unknown kind '" + kind + "'");
}

inline json run_lightcone_command(const json& cfg, RngStream& rng,
                                  const RunContext& ctx) {
    check_keys(cfg, {"command", "seed", "gate", "t_max", "encoding"},
               "config(lightcone)");
    const json& enc = cfg.at("encoding");
    check_keys(enc, {"kind", "lambda0", "sites"}, "encoding");
    const std::string kind = enc.at("kind").get<std::string>();
    const double lambda0 = enc.value("lambda0", 0.3);
    const int t_max = cfg.value("t_max", 100);

    StateFamily fam;
    Gate g{2, CMat::Identity(4, 4), GateFamily::explicit_matrix, {}};
    if (kind == "peripheral7" || kind == "lossy7") {
        const json& gs = cfg.at("gate");
        check_keys(gs, {"family", "Jz", "thetaQ", "thetaR", "w", "u_p", "v_p"},
                   "gate(lossless7)");
        if (gs.at("family").get<std::string>() != "lossless7")
            throw ValidationError("encoding '" + kind +
                                  "' requires a lossless7 gate");
        CMat w = gs.contains("w")
                     ? local_unitary_from_params(
                           2, param_list(gs.at("w"), 3, "gate.w"))
                     : sample_cue(2, rng);
        const double theta_q = gs.value("thetaQ", 0.0);
        const double theta_r = gs.value("thetaR", 0.0);
        CMat u_p = sample_cue(2, rng);
        CMat v_p = sample_cue(2, rng);
        g = lossless_example_gate(gs.at("Jz").get<double>(), theta_q, theta_r,
                                  w, u_p, v_p);
        fam = kind == "peripheral7"
                  ? make_peripheral_encoding(w, lambda0)
                  : make_lossy_encoding(w, theta_q + theta_r, lambda0);
    } else {
        g = gate_from_spec(cfg.at("gate"), rng);
        fam = encoding_from_spec(enc);
    }
    const int sites = fam.at(fam.lambda0).sites;
    Superoperator s = build_phi(g, sites);
    TransferCurve curve = eta_curves(fam, s, t_max);
    atomic_write_text(ctx.out_dir + "/curve.tsv", curve_table(curve));
    return json{{"curve", curve_payload(curve)},
                {"encoding", {{"kind", kind}, {"lambda0", lambda0}}},
                {"M", sites}};
}

inline json run_verify_command(const json& cfg, RngStream& rng) {
    check_keys(cfg, {"command", "seed", "gate", "N", "M"}, "config(verify)");
    const int n = cfg.at("N").get<int>();
    const int m = cfg.at("M").get<int>();
    Gate g = gate_from_spec(cfg.at("gate"), rng);
    // a fixed but nontrivial pure-ish probe state, built from the stream
    long dim = 1;
    for (int s = 0; s < m; ++s) dim *= g.local_dim;
    CMat h(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) h(i, j) = rng.complex_gaussian();
    CMat herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(herm);
    RVec w = es.eigenvalues().array().exp();
    w /= w.sum();
    DensityMatrix rho{g.local_dim, m,
                      es.eigenvectors() * w.asDiagonal() *
                          es.eigenvectors().adjoint()};
    DensityMatrix brute = brute_force_reduced_state(g, n, m, rho);
    DensityMatrix cone = lightcone_reduced_state(g, n, m, rho);
    const double residual = max_abs(brute.matrix - cone.matrix);
    return json{{"N", n},
                {"M", m},
                {"residual", residual},
                {"pass", residual <= 1e-10}};
}

inline json run_floquet_command(const json& cfg, RngStream& rng,
                                const RunContext& ctx) {
    check_keys(cfg, {"command", "seed", "gate", "N", "parity", "site", "bins"},
               "config(floquet)");
    const int n = cfg.at("N").get<int>();
    Gate g = gate_from_spec(cfg.at("gate"), rng);
    const std::string parity = cfg.value("parity", "even_first");
    LayerOrder order;
    if (parity == "even_first")
        order = LayerOrder::even_first;
    else if (parity == "odd_first")
        order = LayerOrder::odd_first;
    else
        throw ValidationError("floquet: parity must be even_first or odd_first");
    FloquetSpectrum spec = floquet_spectrum(g, n, order);
    EigenphaseStatistics stats =
        eigenphase_statistics(spec, cfg.value("bins", 40));

    std::ostringstream hist;
    hist << "bin_lo\tbin_hi\tcount\n" << std::setprecision(17);
    for (std::size_t b = 0; b < stats.hist_counts.size(); ++b)
        hist << stats.hist_edges[b] << "\t" << stats.hist_edges[b + 1] << "\t"
             << stats.hist_counts[b] << "\n";
    atomic_write_text(ctx.out_dir + "/spacing_histogram.tsv", hist.str());

    json payload{{"N", n},
                 {"mean_gap_ratio", stats.mean_gap_ratio},
                 {"num_eigenphases", spec.eigenphases.size()}};

    std::vector<double> entropies = half_chain_entropy(spec);
    std::ostringstream ent;
    ent << "index\tphase\tentropy\n" << std::setprecision(17);
    for (std::size_t k = 0; k < entropies.size(); ++k)
        ent << k << "\t" << spec.eigenphases(static_cast<long>(k)) << "\t"
            << entropies[k] << "\n";
    atomic_write_text(ctx.out_dir + "/half_chain_entropy.tsv", ent.str());
    double mean_ent = 0.0;
    for (double e : entropies) mean_ent += e;
    mean_ent /= entropies.empty() ? 1.0 : double(entropies.size());
    payload["mean_half_chain_entropy"] = mean_ent;

    if (g.local_dim == 2) {
        const int site = cfg.value("site", n);
        auto expect = eigenstate_site_expectations(spec, site);
        std::ostringstream tab;
        tab << "index\tphase\tsx\tsy\tsz\n" << std::setprecision(17);
        for (std::size_t k = 0; k < expect.size(); ++k)
            tab << k << "\t" << spec.eigenphases(static_cast<long>(k)) << "\t"
                << expect[k][0] << "\t" << expect[k][1] << "\t" << expect[k][2]
                << "\n";
        atomic_write_text(ctx.out_dir + "/site_expectations.tsv", tab.str());
        double sx2 = 0, sy2 = 0, sz2 = 0;
        for (const auto& e : expect) {
            sx2 += e[0] * e[0];
            sy2 += e[1] * e[1];
            sz2 += e[2] * e[2];
        }
        const double norm = expect.empty() ? 1.0 : double(expect.size());
        payload["expectation_std"] = {{"sx", std::sqrt(sx2 / norm)},
                                      {"sy", std::sqrt(sy2 / norm)},
                                      {"sz", std::sqrt(sz2 / norm)},
                                      {"site", site}};
    }
    return payload;
}

inline RunRecord run(const RunConfig& config, const RunContext& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    const json& cfg = config.doc;
    if (!cfg.contains("command"))
        throw ValidationError("config: missing 'command'");
    const std::string cmd = config.command();
    RngStream rng(config.seed(), 0);

    json payload;
    json tolerances;
    std::string summary;

    if (cmd == "spectrum") {
        check_keys(cfg, {"command", "seed", "gate", "M", "eps"},
                   "config(spectrum)");
        const int m = cfg.value("M", 1);
        const double eps = cfg.value("eps", 1e-9);
        Gate g = gate_from_spec(cfg.at("gate"), rng);
        Superoperator s = build_phi(g, m);
        payload = spectrum_payload(s, eps);
        tolerances = {{"peripheral_eps", eps},
                      {"unitality_tol", 1e-10},
                      {"cp_floor", -1e-9}};
        summary = "spectrum: 1-|z_max| = " +
                  std::to_string(payload.at("one_minus_zmax").get<double>()) +
                  ", peripheral count = " +
                  std::to_string(payload.at("peripheral_count").get<std::size_t>());
    } else if (cmd == "lightcone") {
        payload = run_lightcone_command(cfg, rng, ctx);
        tolerances = {{"qfi_delta", kQfiDefaultStep},
                      {"qfi_p_floor", kQfiFloor},
                      {"richardson_tol", 0.01}};
        summary = "lightcone: eta(t_max) = " +
                  std::to_string(payload.at("curve").at("eta").back().get<double>());
    } else if (cmd == "verify") {
        payload = run_verify_command(cfg, rng);
        tolerances = {{"equivalence_tol", 1e-10}};
        summary = std::string("oracle-equivalence ") +
                  (payload.at("pass").get<bool>() ? "PASS" : "FAIL") +
                  ", residual = " +
                  std::to_string(payload.at("residual").get<double>());
    } else if (cmd == "haar-sweep") {
        check_keys(cfg, {"command", "seed", "d", "M", "samples", "eps"},
                   "config(haar-sweep)");
        const double eps = cfg.value("eps", 1e-6);
        SweepResult sweep =
            haar_sweep(cfg.value("d", 2), cfg.value("M", 1),
                       cfg.at("samples").get<long>(), config.seed(), eps,
                       ctx.threads);
        payload = {{"d", sweep.local_dim},
                   {"M", sweep.sites},
                   {"samples", sweep.samples},
                   {"z_max_moduli", sweep.z_max_moduli},
                   {"peripheral_count", sweep.peripheral_count},
                   {"mean_z_max", sweep.mean_z_max()}};
        tolerances = {{"peripheral_eps", eps}};
        summary = "haar-sweep: mean |z_max| = " +
                  std::to_string(sweep.mean_z_max()) + ", peripheral = " +
                  std::to_string(sweep.peripheral_count);
    } else if (cmd == "search") {
        check_keys(cfg,
                   {"command", "seed", "family", "M", "restarts", "max_evals",
                    "hit_threshold"},
                   "config(search)");
        SearchOptions opt;
        opt.max_evals = cfg.value("max_evals", 2000L);
        opt.hit_threshold = cfg.value("hit_threshold", 1e-6);
        opt.threads = ctx.threads;
        const std::string fam = cfg.at("family").get<std::string>();
        SearchFamily family;
        if (fam == "kak")
            family = SearchFamily::kak;
        else if (fam == "qutrit24")
            family = SearchFamily::qutrit24;
        else
            throw ValidationError("search: family must be kak or qutrit24");
        auto hits = optimize_peripheral(family, cfg.value("M", 2),
                                        cfg.value("restarts", 50), config.seed(),
                                        opt);
        json jhits = json::array();
        for (std::size_t i = 0; i < hits.size(); ++i) {
            jhits.push_back(hit_to_json(hits[i]));
            json replay = {{"command", "spectrum"},
                           {"M", hits[i].sites},
                           {"gate", hit_gate_spec(hits[i])}};
            atomic_write_text(ctx.out_dir + "/hit_" + std::to_string(i) + ".json",
                              replay.dump(2) + "\n");
        }
        payload = {{"hits", jhits}, {"restarts", cfg.value("restarts", 50)}};
        tolerances = {{"hit_threshold", opt.hit_threshold},
                      {"polish_threshold", opt.polish_threshold},
                      {"pattern_tol", opt.pattern_tol}};
        summary = "search: " + std::to_string(hits.size()) + " hit(s)";
    } else if (cmd == "scan") {
        check_keys(cfg,
                   {"command", "seed", "fixed_axis", "grid_points", "restarts",
                    "max_evals"},
                   "config(scan)");
        const std::string axis = cfg.value("fixed_axis", "x");
        int ax = axis == "x" ? 0 : axis == "y" ? 1 : axis == "z" ? 2 : -1;
        if (ax < 0) throw ValidationError("scan: fixed_axis must be x, y or z");
        const int gp = cfg.value("grid_points", 9);
        if (gp < 2) throw ValidationError("scan: grid_points must be >= 2");
        std::vector<double> grid;
        for (int i = 0; i < gp; ++i)
            grid.push_back(-M_PI / 2 + M_PI * i / double(gp - 1));
        ScanResult scan = conjecture_scan(ax, grid, grid, config.seed(),
                                          cfg.value("restarts", 3),
                                          cfg.value("max_evals", 600L), 1e-6,
                                          1e-3, ctx.threads);
        atomic_write_text(ctx.out_dir + "/scan.tsv", scan_table(scan));
        long peripheral = 0;
        for (const auto& p : scan.points)
            if (p.peripheral) ++peripheral;
        json pts = json::array();
        for (const auto& p : scan.points)
            pts.push_back({{"J_beta", p.j_beta},
                           {"J_gamma", p.j_gamma},
                           {"one_minus_zmax", p.one_minus_zmax},
                           {"entropy", p.linear_entropy},
                           {"conjecture_k", p.conjecture_k}});
        payload = {{"fixed_axis", axis}, {"points", pts}};
        tolerances = {{"peripheral_threshold", 1e-6}, {"pattern_tol", 1e-3}};
        summary = "scan: " + std::to_string(peripheral) + " peripheral point(s)";
    } else if (cmd == "floquet") {
        payload = run_floquet_command(cfg, rng, ctx);
        tolerances = {{"normality_tol", 1e-6}};
        summary = "floquet: mean gap ratio = " +
                  std::to_string(payload.at("mean_gap_ratio").get<double>());
    } else {
        throw ValidationError("config: unknown command '" + cmd + "'");
    }

    const auto t1 = std::chrono::steady_clock::now();
    RunRecord out;
    out.record = {
        {"artifact_version", kArtifactVersion},
        {"config", cfg},
        {"config_hash", hash_hex(cfg)},
        {"wall_time_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
        {"tolerances", tolerances},
        {"payload", payload}};
    out.summary = summary;
    return out;
}

inline void write_record(const RunRecord& record, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    atomic_write_text(out_dir + "/record.json", record.record.dump(2) + "\n");
}

}  // namespace lightcone

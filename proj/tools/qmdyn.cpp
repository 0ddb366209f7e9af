// qmdyn — experiment runner for exact quasimorphism dynamics, random walks,
// and cut-and-project point sets. Every command is deterministic given its
// configuration: identical config bytes produce identical output bytes.
//
// Exit status: 0 all checks passed, 1 a check failed (witnesses in report),
// 2 invalid configuration or arguments.

#include "qmdyn/aperiodic.hpp"
#include "qmdyn/config.hpp"
#include "qmdyn/hull_lab.hpp"
#include "qmdyn/qm.hpp"
#include "qmdyn/quadext.hpp"
#include "qmdyn/walk.hpp"
#include "qmdyn/words.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace qmdyn;

namespace {

void write_file(const OutputSpec& out, const std::string& name, const std::string& content) {
    fs::create_directories(out.dir);
    std::ofstream os(fs::path(out.dir) / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + name + " in " + out.dir);
    os << content;
}

void write_json(const OutputSpec& out, const std::string& name, const Json& j) {
    write_file(out, name, j.dump(2) + "\n");
}

void write_manifest(const ExperimentConfig& cfg) {
    // The echo omits the output location: determinism is about experiment
    // identity, not where the files land.
    Json echo = to_json(cfg);
    echo.erase("out");
    write_json(cfg.out, "manifest.json", Json{{"tool", "qmdyn"}, {"config", std::move(echo)}});
}

double approx(const Rational& x) {
    return numerator(x).convert_to<double>() / denominator(x).convert_to<double>();
}

Json check_report(const std::string& check, Json params, bool ok, Json witnesses) {
    return Json{{"check", check}, {"params", std::move(params)}, {"ok", ok},
                {"witnesses", std::move(witnesses)}};
}

// ---------------------------------------------------------------- defect

int run_defect(const ExperimentConfig& cfg) {
    const GroupSpec spec{cfg.rank};
    const auto phi = build_qm(spec, cfg.qm);
    std::ostringstream csv;
    csv << "L,defect,argmax_g,argmax_h\n";
    Json rows = Json::array();
    for (int L = 1; L <= cfg.params.L; ++L) {
        const auto d = defect(phi, spec, L);
        csv << L << ',' << rat_str(d.value) << ',' << format_word(d.g) << ','
            << format_word(d.h) << '\n';
        rows.push_back(Json{{"L", L},
                            {"defect", rat_str(d.value)},
                            {"argmax_g", format_word(d.g)},
                            {"argmax_h", format_word(d.h)}});
    }
    if (cfg.out.format == "json")
        write_json(cfg.out, "defect.json", rows);
    else
        write_file(cfg.out, "defect.csv", csv.str());
    write_manifest(cfg);
    return 0;
}

// ----------------------------------------------------------------- drift

int run_drift(const ExperimentConfig& cfg) {
    const GroupSpec spec{cfg.rank};
    const auto phi = build_qm(spec, cfg.qm);
    const auto p = uniform_generator_step(spec);
    std::ostringstream csv;
    csv << "n,drift\n";
    Json rows = Json::array();
    for (int n = 1; n <= cfg.walk.n; ++n) {
        const Rational d = drift(phi, p, n);
        csv << n << ',' << rat_str(d) << '\n';
        rows.push_back(Json{{"n", n}, {"drift", rat_str(d)}});
    }
    if (cfg.out.format == "json")
        write_json(cfg.out, "drift.json", rows);
    else
        write_file(cfg.out, "drift.csv", csv.str());
    write_manifest(cfg);
    return 0;
}

// ------------------------------------------------------------- harmonize

int run_harmonize(const ExperimentConfig& cfg) {
    const GroupSpec spec{cfg.rank};
    const auto phi = build_qm(spec, cfg.qm);
    const auto p = uniform_generator_step(spec);
    const int L = cfg.params.L;
    std::ostringstream csv;
    csv << "N,residual\n";
    Json rows = Json::array();
    for (int N : cfg.walk.cesaro_grid) {
        const auto psi = cesaro_harmonize(phi, p, N, L + 1);
        const Rational r = harmonic_residual(psi, p, L);
        csv << N << ',' << rat_str(r) << '\n';
        rows.push_back(Json{{"N", N}, {"residual", rat_str(r)}});
        if (cfg.out.format != "json") {
            std::ostringstream fp;
            psi.to_csv(fp);
            write_file(cfg.out, "harmonize_psi_" + std::to_string(N) + ".csv", fp.str());
        }
    }
    if (cfg.out.format == "json")
        write_json(cfg.out, "residuals.json", rows);
    else
        write_file(cfg.out, "residuals.csv", csv.str());
    write_manifest(cfg);
    return 0;
}

// ------------------------------------------------------------- hull-walk

int run_hull_walk(const ExperimentConfig& cfg) {
    const GroupSpec spec{cfg.rank};
    const auto phi = build_qm(spec, cfg.qm);
    const auto p = uniform_generator_step(spec);
    const auto hist = hull_walk(spec, phi, p, cfg.walk.steps, cfg.params.L, cfg.walk.seed);
    if (cfg.out.format == "json") {
        Json h = Json::object();
        for (const auto& [key, count] : hist.counts()) h[key] = count;
        write_json(cfg.out, "histogram.json",
                   Json{{"keys", hist.counts().size()}, {"total", hist.total()}, {"histogram", h}});
    } else {
        std::ostringstream csv;
        hist.to_csv(csv);
        write_file(cfg.out, "histogram.csv", csv.str());
    }
    write_manifest(cfg);
    return 0;
}

// ------------------------------------------------------------ generic-set

int run_generic_set(const ExperimentConfig& cfg) {
    const int K = cfg.params.K;
    const auto A = generic_set(K);
    // Coverage: every binary word of length <= K occurs in x (rolling-window scan).
    bool ok = true;
    const long long len = A.bit_length();
    for (int l = 1; l <= K && ok; ++l) {
        std::vector<bool> seen(static_cast<std::size_t>(1) << l, false);
        std::uint64_t window = 0;
        const std::uint64_t mask = (l == 64) ? ~0ULL : ((1ULL << l) - 1);
        std::size_t distinct = 0;
        for (long long i = 0; i < len; ++i) {
            window = ((window << 1) | (A.contains(i) ? 1 : 0)) & mask;
            if (i >= l - 1 && !seen[window]) {
                seen[window] = true;
                ++distinct;
            }
        }
        if (distinct != seen.size()) ok = false;
    }
    if (cfg.out.format == "json") {
        Json bits = Json::array();
        for (long long i = 0; i < len; ++i) bits.push_back(A.contains(i) ? 1 : 0);
        write_json(cfg.out, "set.json", Json{{"K", K}, {"bits", bits}});
    } else {
        std::ostringstream csv;
        csv << "index,bit\n";
        for (long long i = 0; i < len; ++i) csv << i << ',' << (A.contains(i) ? 1 : 0) << '\n';
        write_file(cfg.out, "set.csv", csv.str());
    }
    write_json(cfg.out, "report.json",
               check_report("generic-set", Json{{"K", K}, {"length", len}}, ok, Json::array()));
    write_manifest(cfg);
    return ok ? 0 : 1;
}

// --------------------------------------------------------- orbit-closure

int run_orbit_closure(const ExperimentConfig& cfg) {
    const int W = cfg.params.W;
    const int K = std::max(cfg.params.K, 2 * W + 1);
    const auto A = generic_set(K);
    const auto B = build_set(cfg.params.B);
    const long long k = so_orbit_limit(A, B, W);

    // Window fingerprints on F_1: k.xi(A) against eta(B).
    const GroupSpec Z1{1};
    const auto shifted = act(int_to_word(k), xi_qm(A));
    const auto target = eta_qm(B);
    const auto fp_shifted = fingerprint(shifted, Z1, W);
    const auto fp_target = fingerprint(target, Z1, W);
    const bool ok = fp_shifted.values() == fp_target.values();

    if (cfg.out.format == "json") {
        Json rows = Json::array();
        for (std::size_t i = 0; i < fp_target.words().size(); ++i)
            rows.push_back(Json{{"word", format_word(fp_target.words()[i])},
                                {"target", rat_str(fp_target.values()[i])},
                                {"achieved", rat_str(fp_shifted.values()[i])}});
        write_json(cfg.out, "orbit.json", rows);
    } else {
        std::ostringstream csv;
        csv << "word,target,achieved\n";
        for (std::size_t i = 0; i < fp_target.words().size(); ++i)
            csv << format_word(fp_target.words()[i]) << ',' << rat_str(fp_target.values()[i])
                << ',' << rat_str(fp_shifted.values()[i]) << '\n';
        write_file(cfg.out, "orbit.csv", csv.str());
    }
    write_json(cfg.out, "report.json",
               check_report("orbit-closure",
                            Json{{"B", to_json(cfg.params.B)}, {"W", W}, {"K", K}, {"k", k}}, ok,
                            Json::array()));
    write_manifest(cfg);
    return ok ? 0 : 1;
}

// ------------------------------------------------------------- model-set

ModelSet model_from(const ModelSpec& m) {
    return ModelSet(m.d, parse_rational(m.window_lo), parse_rational(m.window_hi));
}

int run_model_set(const ExperimentConfig& cfg) {
    const ModelSet P = model_from(cfg.model);
    const Rational R = parse_rational(cfg.model.R);
    const auto pts = enumerate_points(P, R);
    const auto stats = delone_stats(pts, R, P.d);
    if (cfg.out.format == "json") {
        Json rows = Json::array();
        for (const auto& p : pts)
            rows.push_back(Json{{"m", rat_str(p.a())}, {"n", rat_str(p.b())}, {"value", p.str()}});
        write_json(cfg.out, "points.json", rows);
    } else {
        std::ostringstream csv;
        csv << "m,n,value\n";
        for (const auto& p : pts)
            csv << rat_str(p.a()) << ',' << rat_str(p.b()) << ',' << p.str() << '\n';
        write_file(cfg.out, "points.csv", csv.str());
    }
    Json rep = check_report("model-set", Json{{"d", P.d}, {"R", rat_str(R)}}, true, Json::array());
    rep["count"] = pts.size();
    rep["min_gap"] = stats.min_gap.str();
    rep["max_gap"] = stats.max_gap.str();
    write_json(cfg.out, "report.json", rep);
    write_manifest(cfg);
    return 0;
}

// ----------------------------------------------------------- approx-check

int run_approx_check(const ExperimentConfig& cfg) {
    const ModelSet P = model_from(cfg.model);
    const Rational R = parse_rational(cfg.model.R);
    const Rational C = parse_rational(cfg.model.C);
    const auto rep = approx_subgroup_check(P, R, C);
    Json witnesses = Json::array();
    for (const auto& w : rep.witnesses)
        witnesses.push_back(Json{{"p", w.p.str()}, {"q", w.q.str()}});
    Json j = check_report("approx-subgroup",
                          Json{{"d", P.d}, {"R", rat_str(R)}, {"C", rat_str(C)}}, rep.ok,
                          std::move(witnesses));
    j["pairs"] = rep.pair_count;
    j["cover_size"] = rep.cover.size();
    write_json(cfg.out, "report.json", j);
    write_manifest(cfg);
    return rep.ok ? 0 : 1;
}

// ------------------------------------------------------------ twist-check

int run_twist_check(const ExperimentConfig& cfg) {
    const GroupSpec spec{cfg.rank};
    const auto phi = build_qm(spec, cfg.qm);
    const TwistedSet T{phi, model_from(cfg.model)};
    const Rational R = parse_rational(cfg.model.R);
    const Rational C = parse_rational(cfg.model.C);
    const auto rep = twist_approx_check(T, spec, cfg.params.L, R, C);
    const auto del = twist_delone_check(T, spec, cfg.params.Lw, parse_rational(cfg.params.Rt));

    Json witnesses = Json::array();
    for (const auto& w : rep.witnesses)
        witnesses.push_back(Json{{"g1", format_word(w.g1)},
                                 {"g2", format_word(w.g2)},
                                 {"t1", w.t1.str()},
                                 {"t2", w.t2.str()}});
    const bool ok = rep.ok && del.identical;
    Json j = check_report("twist-approx-delone",
                          Json{{"L", cfg.params.L},
                               {"R", rat_str(R)},
                               {"C", rat_str(C)},
                               {"delone_L", cfg.params.Lw},
                               {"delone_R", cfg.params.Rt}},
                          ok, std::move(witnesses));
    j["products"] = rep.product_count;
    Json defs = Json::array();
    for (const auto& d : rep.defects) defs.push_back(rat_str(d));
    j["defect_set"] = defs;
    j["fibers_identical"] = del.identical;
    j["fiber_min_gap"] = del.fibers.front().stats.min_gap.str();
    j["fiber_max_gap"] = del.fibers.front().stats.max_gap.str();
    write_json(cfg.out, "report.json", j);
    write_manifest(cfg);
    return ok ? 0 : 1;
}

// ------------------------------------------------------------- skew-check

int run_skew_check(const ExperimentConfig& cfg) {
    const GroupSpec spec{cfg.rank};
    const auto phi = build_qm(spec, cfg.qm);
    const ModelSet P = model_from(cfg.model);
    const int Lw = cfg.params.Lw;
    const Rational Rt = parse_rational(cfg.params.Rt);
    const Rational R0 = 10;  // physical radius for sampled translation coordinates

    const auto fp = fingerprint(phi, spec, Lw);
    const auto moves = ball(spec, 2);
    const auto coords = enumerate_points(P, R0);
    SplitMix64 rng(cfg.walk.seed);

    bool ok = true;
    Json witnesses = Json::array();
    for (std::uint64_t i = 0; i < cfg.params.samples; ++i) {
        const ReducedWord& g0 = moves[rng.next() % moves.size()];
        const QuadExt& t0 = coords[rng.next() % coords.size()];
        const int Lw2 = Lw - g0.length();
        const Rational Rt2 = Rt - R0;

        // Left side: patch of (g0, t0).(phi, P).
        const auto fpB = fingerprint(act(g0, phi), spec, Lw2);
        const QuadExt shift = QuadExt::rational(phi.eval(g0), P.d) + t0;
        const auto patchB = skew_pi(fpB, P, shift, Lw2, Rt2);

        // Right side: the (g0, t0)-translate of the base patch, restricted to
        // the smaller window.
        std::vector<PatchEntry> expected;
        for (const auto& g : ball(spec, Lw2)) {
            const QuadExt offset = QuadExt::rational(fp.value_at(mul(g, g0)), P.d);
            auto pts = enumerate_points(P, QuadExt::rational(-Rt2, P.d) + offset + t0,
                                        QuadExt::rational(Rt2, P.d) + offset + t0);
            for (const auto& pp : pts) expected.push_back({g, pp - offset - t0});
        }

        bool same = patchB.size() == expected.size();
        for (std::size_t k = 0; same && k < patchB.size(); ++k)
            same = patchB[k].g == expected[k].g && patchB[k].t == expected[k].t;
        if (!same) {
            ok = false;
            if (witnesses.size() < 8)
                witnesses.push_back(Json{{"sample", i}, {"g0", format_word(g0)}, {"t0", t0.str()}});
        }
    }
    Json j = check_report("skew-equivariance",
                          Json{{"samples", cfg.params.samples},
                               {"seed", cfg.walk.seed},
                               {"Lw", Lw},
                               {"Rt", rat_str(Rt)}},
                          ok, std::move(witnesses));
    write_json(cfg.out, "report.json", j);
    // base patch at the starting hull point
    const auto patch = skew_pi(fp, P, QuadExt::rational(Rational(0), P.d), Lw, Rt);
    if (cfg.out.format == "json") {
        Json rows = Json::array();
        for (const auto& e : patch)
            rows.push_back(Json{{"word", format_word(e.g)}, {"t", e.t.str()}});
        write_json(cfg.out, "patch.json", rows);
    } else {
        std::ostringstream csv;
        csv << "word,t\n";
        for (const auto& e : patch) csv << format_word(e.g) << ',' << e.t.str() << '\n';
        write_file(cfg.out, "patch.csv", csv.str());
    }
    write_manifest(cfg);
    return ok ? 0 : 1;
}

// ---------------------------------------------------------- example-final

int run_example_final(const ExperimentConfig& cfg) {
    const GroupSpec F{2};
    const auto p = uniform_generator_step(F);
    const auto phi0 = counting_qm(F, parse_word(F, "ab"));
    const std::string variant = cfg.params.variant;
    Json j;
    bool ok = false;

    if (variant == "Q1") {
        // Twist of the model set by the counting function: approximate
        // subgroup and Delone fiber checks at finite window.
        const TwistedSet T{antisymmetrize(phi0), ModelSet{}};
        const auto rep = twist_approx_check(T, F, 4, Rational(30));
        const auto del = twist_delone_check(T, F, 3, Rational(60));
        ok = rep.ok && del.identical;
        j = check_report("example-final-Q1", Json{{"L", 4}, {"R", "30"}}, ok, Json::array());
        j["products"] = rep.product_count;
        j["fibers_identical"] = del.identical;
        j["fiber_min_gap"] = del.fibers.front().stats.min_gap.str();
        j["fiber_max_gap"] = del.fibers.front().stats.max_gap.str();
    } else if (variant == "Q2") {
        // Harmonization trend for the averaged representative.
        std::vector<std::pair<int, Rational>> rows;
        for (int N : cfg.walk.cesaro_grid) {
            const auto psi = cesaro_harmonize(phi0, p, N, 3);
            rows.emplace_back(N, harmonic_residual(psi, p, 2));
        }
        bool monotone = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].second > rows[i - 1].second) monotone = false;
        ok = monotone && rows.back().second < rows.front().second;
        j = check_report("example-final-Q2", Json{{"grid", cfg.walk.cesaro_grid}}, ok,
                         Json::array());
        Json table = Json::array();
        for (const auto& [N, r] : rows)
            table.push_back(Json{{"N", N}, {"residual", rat_str(r)}});
        j["residuals"] = table;
    } else if (variant == "Q3") {
        // Distinct empirical stationary measures from distinct bounded
        // perturbations of the rescaled counting function.
        const auto base = rescale3(phi0);
        const auto phi_a = perturbation_qm(
            base, eta_function(BinarySetZ::bernoulli(Rational(1, 5), cfg.walk.seed)), 1, F);
        const auto phi_b = perturbation_qm(
            base, eta_function(BinarySetZ::bernoulli(Rational(4, 5), cfg.walk.seed + 1)), 1, F);
        const auto h1 = hull_walk(F, phi_a, p, cfg.walk.steps, 2, cfg.walk.seed);
        const auto h2 = hull_walk(F, phi_b, p, cfg.walk.steps, 2, cfg.walk.seed + 1);
        const Rational tv = tv_distance(h1, h2);
        ok = tv >= Rational(1, 5);
        j = check_report("example-final-Q3",
                         Json{{"steps", cfg.walk.steps}, {"seed", cfg.walk.seed}, {"L", 2}}, ok,
                         Json::array());
        j["tv_distance"] = rat_str(tv);
        j["tv_distance_approx"] = approx(tv);
        j["keys"] = Json{{"first", h1.counts().size()}, {"second", h2.counts().size()}};
        if (cfg.out.format != "json") {
            std::ostringstream c1, c2;
            h1.to_csv(c1);
            h2.to_csv(c2);
            write_file(cfg.out, "histogram_q1.csv", c1.str());
            write_file(cfg.out, "histogram_q2.csv", c2.str());
        }
    } else {
        throw std::invalid_argument("example-final: variant must be Q1, Q2 or Q3");
    }
    write_json(cfg.out, "report.json", j);
    write_manifest(cfg);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmdyn: exact experiments with quasimorphism dynamics and twisted point sets"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path;
    std::string qm_text, modifier_text, set_text;

    // Pre-scan for --config so that subcommand flags override file values.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "qmdyn: cannot read config " << config_path << "\n";
            return 2;
        }
        try {
            cfg = config_from_json(Json::parse(is));
        } catch (const std::exception& e) {
            std::cerr << "qmdyn: invalid config: " << e.what() << "\n";
            return 2;
        }
    }

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override)");
        sub->add_option("--out", cfg.out.dir, "output directory");
        sub->add_option("--format", cfg.out.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--rank", cfg.rank, "free group rank");
        sub->add_option("--qm", qm_text, "qm spec, e.g. counting:ab, hom:1,0, eta:bernoulli:1/5:7");
        sub->add_option("--modifiers", modifier_text,
                        "comma list: antisymmetrize,rescale3,scale:<k>");
        sub->add_option("--seed", cfg.walk.seed, "top-level seed");
    };

    auto* c_defect = app.add_subcommand("defect", "window defect D_L with argmax pair");
    add_common(c_defect);
    c_defect->add_option("--L", cfg.params.L, "ball radius");

    auto* c_drift = app.add_subcommand("drift", "drift table d_n under the uniform step");
    add_common(c_drift);
    c_drift->add_option("--n", cfg.walk.n, "max convolution power");

    auto* c_harm = app.add_subcommand("harmonize", "Cesaro harmonization residual table");
    add_common(c_harm);
    c_harm->add_option("--L", cfg.params.L, "residual window radius");
    c_harm->add_option("--Ns", cfg.walk.cesaro_grid, "averaging depths");

    auto* c_walk = app.add_subcommand("hull-walk", "empirical measure of a hull walk");
    add_common(c_walk);
    c_walk->add_option("--steps", cfg.walk.steps, "chain length");
    c_walk->add_option("--L", cfg.params.L, "fingerprint radius");

    auto* c_gen = app.add_subcommand("generic-set", "deterministic dense-orbit set");
    add_common(c_gen);
    c_gen->add_option("--K", cfg.params.K, "max block length");

    auto* c_orbit = app.add_subcommand("orbit-closure", "shift witness reproducing eta(B)");
    add_common(c_orbit);
    c_orbit->add_option("--B", set_text, "target set spec (empty|evens|list:..|periodic:..)");
    c_orbit->add_option("--W", cfg.params.W, "window radius");
    c_orbit->add_option("--K", cfg.params.K, "generic set block length");

    auto* c_model = app.add_subcommand("model-set", "cut-and-project point set and gap stats");
    add_common(c_model);
    c_model->add_option("--d", cfg.model.d, "sqrt(d) irrationality");
    c_model->add_option("--R", cfg.model.R, "physical radius");

    auto* c_approx = app.add_subcommand("approx-check", "P+P coverage by P+F");
    add_common(c_approx);
    c_approx->add_option("--d", cfg.model.d, "sqrt(d) irrationality");
    c_approx->add_option("--R", cfg.model.R, "pair radius (pairs from [-R/2,R/2])");
    c_approx->add_option("--C", cfg.model.C, "physical cutoff for the covering set");

    auto* c_twist = app.add_subcommand("twist-check", "twisted-set approximate subgroup + Delone");
    add_common(c_twist);
    c_twist->add_option("--L", cfg.params.L, "word radius (pairs from B_{L/2})");
    c_twist->add_option("--R", cfg.model.R, "fiber radius");
    c_twist->add_option("--C", cfg.model.C, "covering cutoff");
    c_twist->add_option("--dl", cfg.params.Lw, "Delone word radius");
    c_twist->add_option("--dR", cfg.params.Rt, "Delone fiber radius");

    auto* c_skew = app.add_subcommand("skew-check", "equivariance of realization patches");
    add_common(c_skew);
    c_skew->add_option("--samples", cfg.params.samples, "sample count");
    c_skew->add_option("--Lw", cfg.params.Lw, "patch word radius");
    c_skew->add_option("--Rt", cfg.params.Rt, "patch fiber radius");

    auto* c_final = app.add_subcommand("example-final", "scripted Q1/Q2/Q3 experiments");
    add_common(c_final);
    c_final->add_option("--variant", cfg.params.variant, "Q1|Q2|Q3")
        ->check(CLI::IsMember({"Q1", "Q2", "Q3"}));
    c_final->add_option("--steps", cfg.walk.steps, "chain length (Q3)");

    // Defaults that differ from the config struct's generic ones.
    if (config_path.empty()) {
        c_defect->preparse_callback([&](std::size_t) { cfg.params.L = 4; });
        c_drift->preparse_callback([&](std::size_t) { cfg.walk.n = 6; });
        c_twist->preparse_callback([&](std::size_t) {
            cfg.params.L = 4;
            cfg.model.R = "30";
            cfg.params.Lw = 3;
            cfg.params.Rt = "60";
            cfg.qm.modifiers = parse_modifiers("antisymmetrize");
        });
        c_skew->preparse_callback([&](std::size_t) {
            cfg.params.Lw = 4;
            cfg.params.Rt = "20";
        });
        c_walk->preparse_callback([&](std::size_t) { cfg.walk.steps = 10000; });
        c_final->preparse_callback([&](std::size_t) {
            cfg.walk.steps = 100000;
            cfg.walk.seed = 7;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (!qm_text.empty()) cfg.qm = parse_qm_spec(qm_text);
        if (!modifier_text.empty()) cfg.qm.modifiers = parse_modifiers(modifier_text);
        if (!set_text.empty()) cfg.params.B = parse_set_spec(set_text);

        if (c_defect->parsed()) { cfg.experiment = "defect"; return run_defect(cfg); }
        if (c_drift->parsed()) { cfg.experiment = "drift"; return run_drift(cfg); }
        if (c_harm->parsed()) { cfg.experiment = "harmonize"; return run_harmonize(cfg); }
        if (c_walk->parsed()) { cfg.experiment = "hull-walk"; return run_hull_walk(cfg); }
        if (c_gen->parsed()) { cfg.experiment = "generic-set"; return run_generic_set(cfg); }
        if (c_orbit->parsed()) { cfg.experiment = "orbit-closure"; return run_orbit_closure(cfg); }
        if (c_model->parsed()) { cfg.experiment = "model-set"; return run_model_set(cfg); }
        if (c_approx->parsed()) { cfg.experiment = "approx-check"; return run_approx_check(cfg); }
        if (c_twist->parsed()) { cfg.experiment = "twist-check"; return run_twist_check(cfg); }
        if (c_skew->parsed()) { cfg.experiment = "skew-check"; return run_skew_check(cfg); }
        if (c_final->parsed()) { cfg.experiment = "example-final"; return run_example_final(cfg); }
        std::cerr << "qmdyn: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qmdyn: " << e.what() << "\n";
        return 2;
    }
}

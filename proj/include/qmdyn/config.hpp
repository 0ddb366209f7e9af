// Experiment configuration: a strict JSON schema (unknown fields rejected)
// that round-trips losslessly, plus builders that assemble library objects
// from the parsed form and from CLI shorthand strings.
#pragma once

#include "qmdyn/hull_lab.hpp"
#include "qmdyn/qm.hpp"
#include "qmdyn/rational.hpp"
#include "qmdyn/words.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qmdyn {

using Json = nlohmann::ordered_json;

struct SetSpec {
    std::string kind = "empty";  // empty | evens | periodic | list | generic | bernoulli
    long long modulus = 2;
    std::vector<long long> residues;
    std::vector<long long> elements;
    long long window = 64;
    int K = 6;
    std::string q = "1/2";
    std::uint64_t seed = 0;

    friend bool operator==(const SetSpec&, const SetSpec&) = default;
};

struct QmModifier {
    std::string op;  // antisymmetrize | rescale3 | scale | perturb | act
    long long factor = 3;
    SetSpec set;             // perturb
    std::string via = "xi";  // perturb: eta | xi
    int gen = 1;             // perturb
    std::string word;        // act

    friend bool operator==(const QmModifier&, const QmModifier&) = default;
};

struct QmSpec {
    std::string kind = "counting";  // counting | hom | eta | xi
    std::string pattern = "ab";
    std::vector<std::string> weights;  // rationals, one per generator
    SetSpec set;                       // eta | xi
    int gen = 1;
    std::vector<QmModifier> modifiers;

    friend bool operator==(const QmSpec&, const QmSpec&) = default;
};

struct WalkSpec {
    std::string measure = "uniform";
    int n = 4;
    std::uint64_t steps = 1000;
    std::uint64_t seed = 1;
    std::vector<int> cesaro_grid = {1, 2, 4, 8};

    friend bool operator==(const WalkSpec&, const WalkSpec&) = default;
};

struct ModelSpec {
    int d = 2;
    std::string window_lo = "-1";
    std::string window_hi = "1";
    std::string R = "60";
    std::string C = "4";

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct HullSpec {
    int L = 2;
    int W = 8;
    int K = 12;
    SetSpec B;
    std::uint64_t samples = 100;
    std::string variant = "Q1";
    int Lw = 2;
    std::string Rt = "20";

    friend bool operator==(const HullSpec&, const HullSpec&) = default;
};

struct OutputSpec {
    std::string dir = ".";
    std::string format = "csv";  // csv | json

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
    std::string experiment;
    int rank = 2;
    QmSpec qm;
    WalkSpec walk;
    ModelSpec model;
    HullSpec params;
    OutputSpec out;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline void expect_keys(const Json& j, std::initializer_list<const char*> keys, const char* ctx) {
    if (!j.is_object()) throw std::invalid_argument(std::string("config: expected object for ") + ctx);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("config: unknown field '" + it.key() + "' in " + ctx);
    }
}

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace detail

inline Json to_json(const SetSpec& s) {
    return Json{{"kind", s.kind},       {"modulus", s.modulus}, {"residues", s.residues},
                {"elements", s.elements}, {"window", s.window},   {"K", s.K},
                {"q", s.q},             {"seed", s.seed}};
}

inline SetSpec set_from_json(const Json& j) {
    detail::expect_keys(j, {"kind", "modulus", "residues", "elements", "window", "K", "q", "seed"},
                        "set");
    SetSpec s;
    detail::read_field(j, "kind", s.kind);
    detail::read_field(j, "modulus", s.modulus);
    detail::read_field(j, "residues", s.residues);
    detail::read_field(j, "elements", s.elements);
    detail::read_field(j, "window", s.window);
    detail::read_field(j, "K", s.K);
    detail::read_field(j, "q", s.q);
    detail::read_field(j, "seed", s.seed);
    return s;
}

inline Json to_json(const QmModifier& m) {
    return Json{{"op", m.op},   {"factor", m.factor}, {"set", to_json(m.set)},
                {"via", m.via}, {"gen", m.gen},       {"word", m.word}};
}

inline QmModifier modifier_from_json(const Json& j) {
    detail::expect_keys(j, {"op", "factor", "set", "via", "gen", "word"}, "modifier");
    QmModifier m;
    detail::read_field(j, "op", m.op);
    detail::read_field(j, "factor", m.factor);
    if (j.contains("set")) m.set = set_from_json(j.at("set"));
    detail::read_field(j, "via", m.via);
    detail::read_field(j, "gen", m.gen);
    detail::read_field(j, "word", m.word);
    return m;
}

inline Json to_json(const QmSpec& q) {
    Json mods = Json::array();
    for (const auto& m : q.modifiers) mods.push_back(to_json(m));
    return Json{{"kind", q.kind}, {"pattern", q.pattern}, {"weights", q.weights},
                {"set", to_json(q.set)}, {"gen", q.gen}, {"modifiers", mods}};
}

inline QmSpec qm_from_json(const Json& j) {
    detail::expect_keys(j, {"kind", "pattern", "weights", "set", "gen", "modifiers"}, "qm");
    QmSpec q;
    detail::read_field(j, "kind", q.kind);
    detail::read_field(j, "pattern", q.pattern);
    detail::read_field(j, "weights", q.weights);
    if (j.contains("set")) q.set = set_from_json(j.at("set"));
    detail::read_field(j, "gen", q.gen);
    if (j.contains("modifiers"))
        for (const auto& m : j.at("modifiers")) q.modifiers.push_back(modifier_from_json(m));
    return q;
}

inline Json to_json(const ExperimentConfig& c) {
    return Json{
        {"experiment", c.experiment},
        {"group", Json{{"rank", c.rank}}},
        {"qm", to_json(c.qm)},
        {"walk", Json{{"measure", c.walk.measure},
                      {"n", c.walk.n},
                      {"steps", c.walk.steps},
                      {"seed", c.walk.seed},
                      {"cesaro_grid", c.walk.cesaro_grid}}},
        {"model", Json{{"d", c.model.d},
                       {"window_lo", c.model.window_lo},
                       {"window_hi", c.model.window_hi},
                       {"R", c.model.R},
                       {"C", c.model.C}}},
        {"params", Json{{"L", c.params.L},
                        {"W", c.params.W},
                        {"K", c.params.K},
                        {"B", to_json(c.params.B)},
                        {"samples", c.params.samples},
                        {"variant", c.params.variant},
                        {"Lw", c.params.Lw},
                        {"Rt", c.params.Rt}}},
        {"out", Json{{"dir", c.out.dir}, {"format", c.out.format}}},
    };
}

inline ExperimentConfig config_from_json(const Json& j) {
    detail::expect_keys(j, {"experiment", "group", "qm", "walk", "model", "params", "out"},
                        "config");
    ExperimentConfig c;
    detail::read_field(j, "experiment", c.experiment);
    if (j.contains("group")) {
        detail::expect_keys(j.at("group"), {"rank"}, "group");
        detail::read_field(j.at("group"), "rank", c.rank);
    }
    if (j.contains("qm")) c.qm = qm_from_json(j.at("qm"));
    if (j.contains("walk")) {
        const Json& w = j.at("walk");
        detail::expect_keys(w, {"measure", "n", "steps", "seed", "cesaro_grid"}, "walk");
        detail::read_field(w, "measure", c.walk.measure);
        detail::read_field(w, "n", c.walk.n);
        detail::read_field(w, "steps", c.walk.steps);
        detail::read_field(w, "seed", c.walk.seed);
        detail::read_field(w, "cesaro_grid", c.walk.cesaro_grid);
    }
    if (j.contains("model")) {
        const Json& m = j.at("model");
        detail::expect_keys(m, {"d", "window_lo", "window_hi", "R", "C"}, "model");
        detail::read_field(m, "d", c.model.d);
        detail::read_field(m, "window_lo", c.model.window_lo);
        detail::read_field(m, "window_hi", c.model.window_hi);
        detail::read_field(m, "R", c.model.R);
        detail::read_field(m, "C", c.model.C);
    }
    if (j.contains("params")) {
        const Json& p = j.at("params");
        detail::expect_keys(p, {"L", "W", "K", "B", "samples", "variant", "Lw", "Rt"}, "params");
        detail::read_field(p, "L", c.params.L);
        detail::read_field(p, "W", c.params.W);
        detail::read_field(p, "K", c.params.K);
        if (p.contains("B")) c.params.B = set_from_json(p.at("B"));
        detail::read_field(p, "samples", c.params.samples);
        detail::read_field(p, "variant", c.params.variant);
        detail::read_field(p, "Lw", c.params.Lw);
        detail::read_field(p, "Rt", c.params.Rt);
    }
    if (j.contains("out")) {
        const Json& o = j.at("out");
        detail::expect_keys(o, {"dir", "format"}, "out");
        detail::read_field(o, "dir", c.out.dir);
        detail::read_field(o, "format", c.out.format);
    }
    return c;
}

// ----- shorthand parsing (CLI flags) -----

namespace detail {
inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}
}  // namespace detail

/// "empty" | "evens" | "generic:K" | "bernoulli:q:seed" | "list:1;5;9[:window]"
/// | "periodic:m:r1;r2"
inline SetSpec parse_set_spec(const std::string& text) {
    auto parts = detail::split(text, ':');
    SetSpec s;
    s.kind = parts[0];
    if (s.kind == "empty" || s.kind == "evens") {
        if (parts.size() != 1) throw std::invalid_argument("set spec: unexpected arguments");
    } else if (s.kind == "generic") {
        if (parts.size() != 2) throw std::invalid_argument("set spec: generic:K");
        s.K = std::stoi(parts[1]);
    } else if (s.kind == "bernoulli") {
        if (parts.size() != 3) throw std::invalid_argument("set spec: bernoulli:q:seed");
        s.q = parts[1];
        s.seed = std::stoull(parts[2]);
    } else if (s.kind == "list") {
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("set spec: list:n1;n2[:window]");
        if (!parts[1].empty())
            for (const auto& e : detail::split(parts[1], ';')) s.elements.push_back(std::stoll(e));
        if (parts.size() == 3) s.window = std::stoll(parts[2]);
    } else if (s.kind == "periodic") {
        if (parts.size() != 3) throw std::invalid_argument("set spec: periodic:m:r1;r2");
        s.modulus = std::stoll(parts[1]);
        for (const auto& r : detail::split(parts[2], ';')) s.residues.push_back(std::stoll(r));
    } else {
        throw std::invalid_argument("set spec: unknown kind '" + s.kind + "'");
    }
    return s;
}

/// "counting:ab" | "hom:1,0" | "eta:<set spec>" | "xi:<set spec>"
inline QmSpec parse_qm_spec(const std::string& text) {
    QmSpec q;
    auto sep = text.find(':');
    q.kind = text.substr(0, sep);
    const std::string rest = sep == std::string::npos ? "" : text.substr(sep + 1);
    if (q.kind == "counting") {
        if (rest.empty()) throw std::invalid_argument("qm spec: counting:<pattern>");
        q.pattern = rest;
    } else if (q.kind == "hom") {
        if (rest.empty()) throw std::invalid_argument("qm spec: hom:<w1,w2,...>");
        q.weights = detail::split(rest, ',');
    } else if (q.kind == "eta" || q.kind == "xi") {
        q.set = parse_set_spec(rest);
    } else {
        throw std::invalid_argument("qm spec: unknown kind '" + q.kind + "'");
    }
    return q;
}

/// Comma-separated modifier shorthand: "antisymmetrize,rescale3,scale:5".
inline std::vector<QmModifier> parse_modifiers(const std::string& text) {
    std::vector<QmModifier> out;
    if (text.empty()) return out;
    for (const auto& item : detail::split(text, ',')) {
        QmModifier m;
        auto parts = detail::split(item, ':');
        m.op = parts[0];
        if (m.op == "scale") {
            if (parts.size() != 2) throw std::invalid_argument("modifier: scale:<factor>");
            m.factor = std::stoll(parts[1]);
        } else if (m.op != "antisymmetrize" && m.op != "rescale3") {
            throw std::invalid_argument("modifier shorthand: unknown op '" + m.op + "'");
        }
        out.push_back(m);
    }
    return out;
}

// ----- builders -----

inline BinarySetZ build_set(const SetSpec& s) {
    if (s.kind == "empty") return BinarySetZ::empty_set();
    if (s.kind == "evens") return BinarySetZ::evens();
    if (s.kind == "periodic") return BinarySetZ::periodic(s.modulus, s.residues);
    if (s.kind == "list") return BinarySetZ::explicit_set(s.elements, s.window);
    if (s.kind == "generic") return BinarySetZ::generic_concat(s.K);
    if (s.kind == "bernoulli") return BinarySetZ::bernoulli(parse_rational(s.q), s.seed);
    throw std::invalid_argument("build_set: unknown kind '" + s.kind + "'");
}

inline Quasimorphism build_qm(const GroupSpec& spec, const QmSpec& q) {
    Quasimorphism phi = [&]() {
        if (q.kind == "counting") return counting_qm(spec, parse_word(spec, q.pattern));
        if (q.kind == "hom") {
            std::vector<Rational> w;
            for (const auto& s : q.weights) w.push_back(parse_rational(s));
            return homomorphism_qm(spec, std::move(w));
        }
        if (q.kind == "eta") return eta_qm(build_set(q.set), q.gen);
        if (q.kind == "xi") return xi_qm(build_set(q.set), q.gen);
        throw std::invalid_argument("build_qm: unknown kind '" + q.kind + "'");
    }();
    for (const auto& m : q.modifiers) {
        if (m.op == "antisymmetrize") {
            phi = antisymmetrize(phi);
        } else if (m.op == "rescale3") {
            phi = rescale3(phi);
        } else if (m.op == "scale") {
            phi = scaled(phi, m.factor);
        } else if (m.op == "perturb") {
            const auto s = m.via == "eta" ? eta_function(build_set(m.set))
                                          : xi_function(build_set(m.set));
            phi = perturbation_qm(phi, s, m.gen, spec);
        } else if (m.op == "act") {
            phi = act(parse_word(spec, m.word), phi);
        } else {
            throw std::invalid_argument("build_qm: unknown modifier '" + m.op + "'");
        }
    }
    return phi;
}

}  // namespace qmdyn

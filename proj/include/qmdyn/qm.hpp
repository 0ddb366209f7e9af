// The quasimorphism zoo: counting functions, homomorphisms, antisymmetrized
// and rescaled variants, bounded integer-line perturbations, and translates
// under the hull action (g.phi)(g') = phi(g'g) - phi(g).
//
// Evaluator trees are immutable and shareable; evaluation is a pure function.
// Every constructible tree is normalized (value 0 at the identity).
#pragma once

#include "qmdyn/rational.hpp"
#include "qmdyn/words.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmdyn {

/// View of the chain state gamma_n kept by a hull walk: enough of the word
/// to run local evaluation rules without materializing all of gamma_n.
struct WalkPrefix {
    std::span<const int> letters;         // first K letters of gamma_n
    std::uint64_t total_length = 0;       // |gamma_n|
    std::span<const long long> exp_sums;  // exponent sums of gamma_n, per generator
};

/// A bounded function on the integer line, used as a perturbation s composed
/// with an exponent-sum surjection delta: phi(g) + s(delta(g)).
struct ZFunction {
    std::function<long long(long long)> fn;
    bool antisymmetric = false;
    std::string label;
};

namespace detail {

inline long long count_occurrences(std::span<const int> word, std::span<const int> pat) {
    if (pat.empty() || word.size() < pat.size()) return 0;
    long long n = 0;
    for (std::size_t i = 0; i + pat.size() <= word.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < pat.size(); ++j) {
            if (word[i + j] != pat[j]) {
                hit = false;
                break;
            }
        }
        if (hit) ++n;
    }
    return n;
}

// Occurrences (pattern minus inverse pattern) that start strictly within the
// first `limit` positions of `word`.
inline long long signed_occurrences_before(std::span<const int> word, std::size_t limit,
                                           std::span<const int> pat,
                                           std::span<const int> pat_inv) {
    long long n = 0;
    const std::size_t last = std::min(limit, word.size());
    for (std::size_t i = 0; i < last && i + pat.size() <= word.size(); ++i) {
        bool hit = true, hit_inv = true;
        for (std::size_t j = 0; j < pat.size(); ++j) {
            int c = word[i + j];
            if (c != pat[j]) hit = false;
            if (c != pat_inv[j]) hit_inv = false;
            if (!hit && !hit_inv) break;
        }
        if (hit) ++n;
        if (hit_inv) --n;
    }
    return n;
}

struct QmNode {
    virtual ~QmNode() = default;
    virtual Rational eval(const ReducedWord& g) const = 0;
    virtual bool integer_valued() const = 0;
    /// Letters of gamma_n required to evaluate shift_diff with |g'| <= max_arg_len,
    /// or -1 when no local rule exists.
    virtual int prefix_need(int /*max_arg_len*/) const { return -1; }
    /// phi(g' gamma) - phi(gamma) from a bounded prefix of gamma.
    virtual Rational shift_diff(const WalkPrefix&, const ReducedWord&) const {
        throw std::logic_error("shift_diff: no local rule for this node");
    }
};

using NodePtr = std::shared_ptr<const QmNode>;

}  // namespace detail

class Quasimorphism {
public:
    Rational eval(const ReducedWord& g) const { return node_->eval(g); }
    Rational operator()(const ReducedWord& g) const { return node_->eval(g); }
    bool integer_valued() const { return node_->integer_valued(); }

    int prefix_need(int max_arg_len) const { return node_->prefix_need(max_arg_len); }
    Rational shift_diff(const WalkPrefix& state, const ReducedWord& g) const {
        return node_->shift_diff(state, g);
    }

    const detail::NodePtr& node() const { return node_; }
    static Quasimorphism from_node(detail::NodePtr node) { return Quasimorphism(std::move(node)); }

private:
    explicit Quasimorphism(detail::NodePtr node) : node_(std::move(node)) {}
    detail::NodePtr node_;
};

namespace detail {

// Brooks-type counting function: occurrences of the pattern as a contiguous
// subword of the reduced word, overlaps allowed, minus occurrences of the
// inverse pattern. Antisymmetric by construction.
struct CountingNode final : QmNode {
    ReducedWord pattern;
    ReducedWord pattern_inv;

    CountingNode(ReducedWord p) : pattern(std::move(p)), pattern_inv(inv(pattern)) {}

    Rational eval(const ReducedWord& g) const override {
        return Rational(count_occurrences(g.letters(), pattern.letters()) -
                        count_occurrences(g.letters(), pattern_inv.letters()));
    }
    bool integer_valued() const override { return true; }

    int prefix_need(int max_arg_len) const override {
        return max_arg_len + pattern.length();
    }

    Rational shift_diff(const WalkPrefix& st, const ReducedWord& g) const override {
        const std::size_t lp = static_cast<std::size_t>(pattern.length());
        const auto& gl = g.letters();
        const std::size_t ell = gl.size();
        const auto t = st.letters;

        if (st.total_length <= t.size()) {
            // Whole word is visible; reconstruct directly.
            std::vector<int> full(t.begin(), t.end());
            ReducedWord gamma = ReducedWord::from_reduced(std::move(full));
            return eval(mul(g, gamma)) - eval(gamma);
        }
        if (t.size() < ell + lp)
            throw std::logic_error("shift_diff: prefix shorter than required");

        // Cancellation depth at the junction of g and gamma.
        std::size_t c = 0;
        while (c < ell && gl[ell - 1 - c] == -t[c]) ++c;

        // Head of g*gamma: surviving g-letters then the next lp-1 gamma letters.
        std::vector<int> head;
        head.reserve(ell - c + lp - 1);
        head.insert(head.end(), gl.begin(), gl.begin() + (ell - c));
        const std::size_t tail_take = std::min(t.size() - c, lp - 1);
        head.insert(head.end(), t.begin() + c, t.begin() + c + tail_take);

        const auto pat = std::span<const int>(pattern.letters());
        const auto pin = std::span<const int>(pattern_inv.letters());
        long long gained = signed_occurrences_before(head, ell - c, pat, pin);
        long long lost = signed_occurrences_before(t, c, pat, pin);
        return Rational(gained - lost);
    }
};

struct HomomorphismNode final : QmNode {
    std::vector<Rational> weights;  // one per generator

    explicit HomomorphismNode(std::vector<Rational> w) : weights(std::move(w)) {}

    Rational eval(const ReducedWord& g) const override {
        Rational s = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] != 0) s += weights[i] * Rational(exp_sum(g, static_cast<int>(i) + 1));
        }
        return s;
    }
    bool integer_valued() const override {
        for (const auto& w : weights)
            if (!is_integer(w)) return false;
        return true;
    }
    int prefix_need(int) const override { return 0; }
    Rational shift_diff(const WalkPrefix&, const ReducedWord& g) const override { return eval(g); }
};

// phi(g) = floor(inner(g)/2) - floor(inner(g^-1)/2); integer-valued and
// antisymmetric, at bounded distance from inner.
struct AntisymmetrizedNode final : QmNode {
    NodePtr inner;

    explicit AntisymmetrizedNode(NodePtr i) : inner(std::move(i)) {}

    Rational eval(const ReducedWord& g) const override {
        BigInt a = rational_floor(inner->eval(g) / 2);
        BigInt b = rational_floor(inner->eval(inv(g)) / 2);
        return Rational(a - b);
    }
    bool integer_valued() const override { return true; }
};

struct ScaledNode final : QmNode {
    NodePtr inner;
    long long factor;

    ScaledNode(NodePtr i, long long f) : inner(std::move(i)), factor(f) {}

    Rational eval(const ReducedWord& g) const override { return Rational(factor) * inner->eval(g); }
    bool integer_valued() const override { return inner->integer_valued(); }
    int prefix_need(int n) const override { return inner->prefix_need(n); }
    Rational shift_diff(const WalkPrefix& st, const ReducedWord& g) const override {
        return Rational(factor) * inner->shift_diff(st, g);
    }
};

struct SumNode final : QmNode {
    std::vector<NodePtr> terms;

    explicit SumNode(std::vector<NodePtr> ts) : terms(std::move(ts)) {}

    Rational eval(const ReducedWord& g) const override {
        Rational s = 0;
        for (const auto& t : terms) s += t->eval(g);
        return s;
    }
    bool integer_valued() const override {
        for (const auto& t : terms)
            if (!t->integer_valued()) return false;
        return true;
    }
    int prefix_need(int n) const override {
        int need = 0;
        for (const auto& t : terms) {
            int k = t->prefix_need(n);
            if (k < 0) return -1;
            need = std::max(need, k);
        }
        return need;
    }
    Rational shift_diff(const WalkPrefix& st, const ReducedWord& g) const override {
        Rational s = 0;
        for (const auto& t : terms) s += t->shift_diff(st, g);
        return s;
    }
};

// The hull action: (gamma.phi)(g) = phi(g gamma) - phi(gamma).
struct ActedNode final : QmNode {
    NodePtr inner;
    ReducedWord gamma;
    Rational base;  // inner(gamma), cached

    ActedNode(NodePtr i, ReducedWord g) : inner(std::move(i)), gamma(std::move(g)) {
        base = inner->eval(gamma);
    }

    Rational eval(const ReducedWord& g) const override {
        return inner->eval(mul(g, gamma)) - base;
    }
    bool integer_valued() const override { return inner->integer_valued(); }
};

// s composed with the exponent-sum homomorphism of one generator.
struct ZComposeNode final : QmNode {
    ZFunction s;
    int gen;

    ZComposeNode(ZFunction f, int g) : s(std::move(f)), gen(g) {}

    Rational eval(const ReducedWord& g) const override { return Rational(s.fn(exp_sum(g, gen))); }
    bool integer_valued() const override { return true; }
    int prefix_need(int) const override { return 0; }
    Rational shift_diff(const WalkPrefix& st, const ReducedWord& g) const override {
        if (static_cast<std::size_t>(gen) > st.exp_sums.size())
            throw std::logic_error("shift_diff: exponent sums missing for generator");
        const long long e = st.exp_sums[gen - 1];
        return Rational(s.fn(e + exp_sum(g, gen)) - s.fn(e));
    }
};

}  // namespace detail

inline Quasimorphism counting_qm(const GroupSpec& spec, const ReducedWord& pattern) {
    validate_spec(spec);
    if (pattern.is_identity()) throw std::invalid_argument("counting_qm: empty pattern");
    for (int l : pattern.letters())
        if (std::abs(l) > spec.rank) throw std::out_of_range("counting_qm: pattern letter out of range");
    return Quasimorphism::from_node(std::make_shared<detail::CountingNode>(pattern));
}

inline Quasimorphism homomorphism_qm(const GroupSpec& spec, std::vector<Rational> weights) {
    validate_spec(spec);
    if (weights.size() != static_cast<std::size_t>(spec.rank))
        throw std::invalid_argument("homomorphism_qm: need one weight per generator");
    return Quasimorphism::from_node(std::make_shared<detail::HomomorphismNode>(std::move(weights)));
}

inline Quasimorphism antisymmetrize(const Quasimorphism& phi) {
    return Quasimorphism::from_node(std::make_shared<detail::AntisymmetrizedNode>(phi.node()));
}

inline Quasimorphism scaled(const Quasimorphism& phi, long long factor) {
    return Quasimorphism::from_node(std::make_shared<detail::ScaledNode>(phi.node(), factor));
}

/// Pointwise 3*phi; lands in 3Z when phi is Z-valued.
inline Quasimorphism rescale3(const Quasimorphism& phi) { return scaled(phi, 3); }

inline Quasimorphism qm_sum(std::vector<Quasimorphism> terms) {
    std::vector<detail::NodePtr> nodes;
    nodes.reserve(terms.size());
    for (auto& t : terms) nodes.push_back(t.node());
    return Quasimorphism::from_node(std::make_shared<detail::SumNode>(std::move(nodes)));
}

/// The translate gamma.phi with (gamma.phi)(g) = phi(g gamma) - phi(gamma).
inline Quasimorphism act(const ReducedWord& gamma, const Quasimorphism& phi) {
    return Quasimorphism::from_node(std::make_shared<detail::ActedNode>(phi.node(), gamma));
}

/// s o delta_gen as a normalized function on the group; requires s(0) = 0.
inline Quasimorphism compose_z(const ZFunction& s, int gen) {
    if (gen < 1) throw std::out_of_range("compose_z: generator index out of range");
    if (!s.fn) throw std::invalid_argument("compose_z: empty function");
    if (s.fn(0) != 0) throw std::invalid_argument("compose_z: s(0) must be 0");
    return Quasimorphism::from_node(std::make_shared<detail::ZComposeNode>(s, gen));
}

struct DefectResult {
    Rational value;
    ReducedWord g, h;  // first maximizing pair in canonical order
};

/// D_L = max over (g,h) in B_L x B_L of |phi(gh) - phi(g) - phi(h)|, exact.
inline DefectResult defect(const Quasimorphism& phi, const GroupSpec& spec, int L,
                           std::uint64_t cap = kDefaultBallCap) {
    if (L < 1) throw std::invalid_argument("defect: radius must be >= 1");
    const auto B = ball(spec, L, cap);
    std::vector<Rational> vals;
    vals.reserve(B.size());
    for (const auto& w : B) vals.push_back(phi.eval(w));

    DefectResult best{Rational(-1), B[0], B[0]};
    for (std::size_t i = 0; i < B.size(); ++i) {
        for (std::size_t j = 0; j < B.size(); ++j) {
            Rational d = abs(phi.eval(mul(B[i], B[j])) - vals[i] - vals[j]);
            if (d > best.value) {
                best.value = std::move(d);
                best.g = B[i];
                best.h = B[j];
            }
        }
    }
    return best;
}

/// The finite defect set {phi(gh)-phi(g)-phi(h) : g,h in B_L}, sorted.
inline std::vector<Rational> defect_set(const Quasimorphism& phi, const GroupSpec& spec, int L,
                                        std::uint64_t cap = kDefaultBallCap) {
    const auto B = ball(spec, L, cap);
    std::vector<Rational> vals;
    vals.reserve(B.size());
    for (const auto& w : B) vals.push_back(phi.eval(w));
    std::set<Rational> out;
    for (std::size_t i = 0; i < B.size(); ++i)
        for (std::size_t j = 0; j < B.size(); ++j)
            out.insert(phi.eval(mul(B[i], B[j])) - vals[i] - vals[j]);
    return {out.begin(), out.end()};
}

/// The restriction of a normalized function to a word ball, in canonical
/// order; the finite-window surrogate for a hull point.
class Fingerprint {
public:
    Fingerprint(GroupSpec spec, int radius, std::vector<ReducedWord> words,
                std::vector<Rational> values)
        : spec_(spec), radius_(radius), words_(std::move(words)), values_(std::move(values)) {
        if (words_.size() != values_.size())
            throw std::invalid_argument("Fingerprint: table length mismatch");
        if (values_.empty() || values_[0] != 0)
            throw std::invalid_argument("Fingerprint: value at identity must be 0");
    }

    const GroupSpec& spec() const { return spec_; }
    int radius() const { return radius_; }
    const std::vector<ReducedWord>& words() const { return words_; }
    const std::vector<Rational>& values() const { return values_; }

    /// Exact value at a ball word; throws when outside the window.
    const Rational& value_at(const ReducedWord& w) const {
        auto it = std::lower_bound(words_.begin(), words_.end(), w, WordLess{});
        if (it == words_.end() || !(*it == w))
            throw std::out_of_range("Fingerprint: word outside window");
        return values_[static_cast<std::size_t>(it - words_.begin())];
    }

    bool integer_valued() const {
        for (const auto& v : values_)
            if (!is_integer(v)) return false;
        return true;
    }

    void to_csv(std::ostream& os) const {
        os << "word,value\n";
        for (std::size_t i = 0; i < words_.size(); ++i)
            os << format_word(words_[i]) << ',' << rat_str(values_[i]) << '\n';
    }

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

private:
    GroupSpec spec_;
    int radius_;
    std::vector<ReducedWord> words_;
    std::vector<Rational> values_;
};

inline Fingerprint fingerprint(const Quasimorphism& phi, const GroupSpec& spec, int L,
                               std::uint64_t cap = kDefaultBallCap) {
    auto words = ball(spec, L, cap);
    std::vector<Rational> values;
    values.reserve(words.size());
    for (const auto& w : words) values.push_back(phi.eval(w));
    return Fingerprint(spec, L, std::move(words), std::move(values));
}

}  // namespace qmdyn

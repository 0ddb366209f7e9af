// Hull-walk Markov chains over finite-window fingerprints, empirical
// stationary measures, and the integer-line set constructions that feed
// bounded perturbations: eta(A) = chi_A - chi_A(0), its antisymmetrization
// xi(A) = chi_A - chi_{-A}, deterministic dense-orbit concatenation sets,
// seeded Bernoulli sets, and the mod-3 splitting of perturbed values.
#pragma once

#include "qmdyn/qm.hpp"
#include "qmdyn/rational.hpp"
#include "qmdyn/rng.hpp"
#include "qmdyn/walk.hpp"
#include "qmdyn/words.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmdyn {

/// A subset of Z, either windowed-explicit or backed by a closed form
/// (generic concatenation, Bernoulli(q, seed), periodic, empty).
class BinarySetZ {
public:
    static BinarySetZ empty_set() {
        BinarySetZ s;
        s.kind_ = Kind::Empty;
        s.label_ = "empty";
        return s;
    }

    /// Membership outside [-window_radius, window_radius] is an error.
    static BinarySetZ explicit_set(std::vector<long long> elements, long long window_radius) {
        BinarySetZ s;
        s.kind_ = Kind::Explicit;
        std::sort(elements.begin(), elements.end());
        elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
        for (long long e : elements)
            if (e < -window_radius || e > window_radius)
                throw std::invalid_argument("BinarySetZ: element outside window");
        s.elements_ = std::move(elements);
        s.window_ = window_radius;
        std::ostringstream os;
        os << "list:";
        for (std::size_t i = 0; i < s.elements_.size(); ++i)
            os << (i ? ";" : "") << s.elements_[i];
        s.label_ = os.str();
        return s;
    }

    static BinarySetZ periodic(long long modulus, std::vector<long long> residues) {
        if (modulus < 1) throw std::invalid_argument("BinarySetZ: modulus must be positive");
        BinarySetZ s;
        s.kind_ = Kind::Periodic;
        s.modulus_ = modulus;
        for (long long& r : residues) r = ((r % modulus) + modulus) % modulus;
        std::sort(residues.begin(), residues.end());
        residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
        s.residues_ = std::move(residues);
        std::ostringstream os;
        os << "periodic:" << modulus << ':';
        for (std::size_t i = 0; i < s.residues_.size(); ++i)
            os << (i ? ";" : "") << s.residues_[i];
        s.label_ = os.str();
        return s;
    }

    static BinarySetZ evens() {
        BinarySetZ s = periodic(2, {0});
        s.label_ = "evens";
        return s;
    }

    /// A(x) for the deterministic dense-orbit point x: the concatenation of
    /// all binary words of lengths 1..K in lexicographic order. A(x) is a
    /// subset of N, so backward shifts vanish by construction.
    static BinarySetZ generic_concat(int K) {
        if (K < 1) throw std::invalid_argument("BinarySetZ: K must be >= 1");
        auto bits = std::make_shared<std::vector<std::uint8_t>>();
        std::size_t total = 0;
        for (int len = 1; len <= K; ++len) total += static_cast<std::size_t>(len) << len;
        bits->reserve(total);
        for (int len = 1; len <= K; ++len) {
            for (std::uint64_t v = 0; v < (1ULL << len); ++v)
                for (int b = len - 1; b >= 0; --b)
                    bits->push_back(static_cast<std::uint8_t>((v >> b) & 1ULL));
        }
        BinarySetZ s;
        s.kind_ = Kind::GenericConcat;
        s.bits_ = std::move(bits);
        s.concat_K_ = K;
        s.label_ = "generic:" + std::to_string(K);
        return s;
    }

    /// Independent bit per integer: n is a member iff the splitmix64 draw at
    /// state seed XOR zigzag(n) falls below q. Exact rational comparison.
    static BinarySetZ bernoulli(const Rational& q, std::uint64_t seed) {
        if (q < 0 || q > 1) throw std::invalid_argument("BinarySetZ: q must be in [0,1]");
        BinarySetZ s;
        s.kind_ = Kind::Bernoulli;
        s.q_ = q;
        s.seed_ = seed;
        s.q_num_shift_ = numerator(q) << 64;
        s.label_ = "bernoulli:" + rat_str(q) + ":" + std::to_string(seed);
        return s;
    }

    bool contains(long long n) const {
        switch (kind_) {
            case Kind::Empty:
                return false;
            case Kind::Explicit:
                if (n < -window_ || n > window_)
                    throw std::out_of_range("BinarySetZ: query outside window and no closed form");
                return std::binary_search(elements_.begin(), elements_.end(), n);
            case Kind::Periodic:
                return std::binary_search(residues_.begin(), residues_.end(),
                                          ((n % modulus_) + modulus_) % modulus_);
            case Kind::GenericConcat: {
                if (n < 0 || n >= static_cast<long long>(bits_->size())) return false;
                return (*bits_)[static_cast<std::size_t>(n)] != 0;
            }
            case Kind::Bernoulli: {
                SplitMix64 g(seed_ ^ zigzag64(n));
                return BigInt(g.next()) * denominator(q_) < q_num_shift_;
            }
        }
        return false;
    }

    bool has_closed_form() const { return kind_ != Kind::Explicit; }
    long long window_radius() const { return window_; }
    bool is_generic_concat() const { return kind_ == Kind::GenericConcat; }
    int concat_K() const { return concat_K_; }
    long long bit_length() const {
        return bits_ ? static_cast<long long>(bits_->size()) : 0;
    }
    const std::string& label() const { return label_; }

private:
    enum class Kind { Empty, Explicit, Periodic, GenericConcat, Bernoulli };

    BinarySetZ() = default;

    Kind kind_ = Kind::Empty;
    std::vector<long long> elements_;
    long long window_ = 0;
    long long modulus_ = 1;
    std::vector<long long> residues_;
    std::shared_ptr<const std::vector<std::uint8_t>> bits_;
    int concat_K_ = 0;
    Rational q_;
    std::uint64_t seed_ = 0;
    BigInt q_num_shift_;
    std::string label_;
};

/// Deterministic dense-orbit set A(x), x the concatenation of all binary
/// words of lengths 1..K.
inline BinarySetZ generic_set(int K) { return BinarySetZ::generic_concat(K); }

/// eta(A)(n) = chi_A(n) - chi_A(0); always 0 at n = 0.
inline int eta_value(const BinarySetZ& A, long long n) {
    return (A.contains(n) ? 1 : 0) - (A.contains(0) ? 1 : 0);
}

/// xi(A)(n) = chi_A(n) - chi_A(-n); antisymmetric.
inline int xi_value(const BinarySetZ& A, long long n) {
    return (A.contains(n) ? 1 : 0) - (A.contains(-n) ? 1 : 0);
}

inline ZFunction eta_function(const BinarySetZ& A) {
    return ZFunction{[A](long long n) { return static_cast<long long>(eta_value(A, n)); },
                     /*antisymmetric=*/false, "eta(" + A.label() + ")"};
}

inline ZFunction xi_function(const BinarySetZ& A) {
    return ZFunction{[A](long long n) { return static_cast<long long>(xi_value(A, n)); },
                     /*antisymmetric=*/true, "xi(" + A.label() + ")"};
}

/// eta(A) pulled back through the exponent sum of one generator.
inline Quasimorphism eta_qm(const BinarySetZ& A, int gen = 1) {
    return compose_z(eta_function(A), gen);
}

inline Quasimorphism xi_qm(const BinarySetZ& A, int gen = 1) {
    return compose_z(xi_function(A), gen);
}

/// phi_1 = base + s o delta_gen. The base must take values in 3Z (checked on
/// a small ball) so that the perturbation is recoverable mod 3.
inline Quasimorphism perturbation_qm(const Quasimorphism& base, const ZFunction& s, int gen,
                                     const GroupSpec& spec, int check_radius = 2) {
    for (const auto& w : ball(spec, check_radius)) {
        Rational v = base.eval(w);
        if (!is_integer(v) || numerator(v) % 3 != 0)
            throw std::invalid_argument("perturbation_qm: base is not 3Z-valued on test ball");
    }
    return qm_sum({base, compose_z(s, gen)});
}

struct Mod3 {
    long long base3;  // in 3Z
    int s;            // in {-1, 0, 1}
};

/// Unique splitting v = base3 + s with base3 in 3Z and s in {-1,0,1}.
inline Mod3 decompose_mod3(long long v) {
    const long long m = (((v + 1) % 3) + 3) % 3;
    const int s = static_cast<int>(m - 1);
    return Mod3{v - s, s};
}

/// Smallest k >= 0 with (A - k) agreeing with `target` on the finite window F.
/// A must be a generic-concatenation set; failure means K was too small.
inline long long find_shift_witness(const BinarySetZ& A, const BinarySetZ& target,
                                    const std::vector<long long>& F) {
    if (!A.is_generic_concat())
        throw std::invalid_argument("find_shift_witness: A must be a generic-concatenation set");
    if (F.empty()) return 0;
    const long long len = A.bit_length();
    for (long long k = 0; k < len; ++k) {
        bool match = true;
        for (long long f : F) {
            if (A.contains(f + k) != target.contains(f)) {
                match = false;
                break;
            }
        }
        if (match) return k;
    }
    throw std::runtime_error("find_shift_witness: no witness found; increase K");
}

/// Smallest k > W whose shift aligns A with B on [-W, W]: the window-W
/// fingerprint of k.xi(A) then equals eta(B) exactly, the backward term
/// having left the window.
inline long long so_orbit_limit(const BinarySetZ& A, const BinarySetZ& B, int W) {
    if (W < 1) throw std::invalid_argument("so_orbit_limit: window must be >= 1");
    if (!A.is_generic_concat())
        throw std::invalid_argument("so_orbit_limit: A must be a generic-concatenation set");
    const long long len = A.bit_length();
    for (long long k = W + 1; k + W < len; ++k) {
        bool match = true;
        for (long long n = -W; n <= W; ++n) {
            if (A.contains(k + n) != B.contains(n)) {
                match = false;
                break;
            }
        }
        if (match) return k;
    }
    throw std::runtime_error("so_orbit_limit: no witness found; increase K");
}

/// Histogram of finite-window fingerprints observed along a hull walk.
class EmpiricalMeasure {
public:
    EmpiricalMeasure(GroupSpec spec, int radius) : spec_(spec), radius_(radius) {}

    void add(const std::string& key) {
        ++counts_[key];
        ++total_;
    }

    const std::map<std::string, std::uint64_t>& counts() const { return counts_; }
    std::uint64_t total() const { return total_; }
    int radius() const { return radius_; }
    const GroupSpec& spec() const { return spec_; }

    void to_csv(std::ostream& os) const {
        os << "key,count\n";
        for (const auto& [key, count] : counts_) os << '"' << key << "\"," << count << '\n';
    }

private:
    GroupSpec spec_;
    int radius_;
    std::map<std::string, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// Total variation distance between the normalized histograms, exact.
inline Rational tv_distance(const EmpiricalMeasure& h1, const EmpiricalMeasure& h2) {
    if (h1.radius() != h2.radius() || !(h1.spec() == h2.spec()))
        throw std::invalid_argument("tv_distance: mismatched window radius");
    if (h1.total() == 0 || h2.total() == 0)
        throw std::invalid_argument("tv_distance: empty histogram");
    const Rational t1(static_cast<long long>(h1.total()));
    const Rational t2(static_cast<long long>(h2.total()));
    Rational sum = 0;
    auto it1 = h1.counts().begin();
    auto it2 = h2.counts().begin();
    while (it1 != h1.counts().end() || it2 != h2.counts().end()) {
        if (it2 == h2.counts().end() || (it1 != h1.counts().end() && it1->first < it2->first)) {
            sum += Rational(static_cast<long long>(it1->second)) / t1;
            ++it1;
        } else if (it1 == h1.counts().end() || it2->first < it1->first) {
            sum += Rational(static_cast<long long>(it2->second)) / t2;
            ++it2;
        } else {
            sum += abs(Rational(static_cast<long long>(it1->second)) / t1 -
                       Rational(static_cast<long long>(it2->second)) / t2);
            ++it1;
            ++it2;
        }
    }
    return sum / 2;
}

namespace detail {

// Fingerprint keys: exact integers for integer-valued functions; otherwise
// values are snapped to the 2^-20 grid before hashing so that keys are stable.
inline void append_key_value(std::string& key, const Rational& v, bool integer_vals) {
    if (!key.empty()) key += ',';
    if (integer_vals) {
        key += numerator(v).str();
    } else {
        key += 'q';
        key += rational_round(v * Rational(1 << 20)).str();
    }
}

}  // namespace detail

/// Left-increment chain x_{n+1} = omega.x_n started at x_0 = phi, tracked as
/// gamma_n = omega_n ... omega_1 with the window-L fingerprint of gamma_n.phi
/// recorded at each of steps 1..steps. Deterministic given the seed.
inline EmpiricalMeasure hull_walk(const GroupSpec& spec, const Quasimorphism& phi,
                                  const StepDistribution& p, std::uint64_t steps, int L,
                                  std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("hull_walk: need at least one step");
    if (!(p.spec() == spec)) throw std::invalid_argument("hull_walk: group mismatch");
    const auto window = ball(spec, L);
    const int need = phi.prefix_need(L);
    const bool integer_vals = phi.integer_valued();

    std::deque<int> word;  // gamma_n, leftmost letter at the front
    std::vector<long long> esums(static_cast<std::size_t>(spec.rank), 0);
    std::vector<int> prefix;
    SplitMix64 rng(seed);
    EmpiricalMeasure hist(spec, L);

    for (std::uint64_t step = 0; step < steps; ++step) {
        const ReducedWord& w = p.sample(rng);
        for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
            const int l = *it;
            if (!word.empty() && word.front() == -l) {
                esums[static_cast<std::size_t>(std::abs(word.front())) - 1] -=
                    (word.front() > 0) ? 1 : -1;
                word.pop_front();
            } else {
                word.push_front(l);
                esums[static_cast<std::size_t>(std::abs(l)) - 1] += (l > 0) ? 1 : -1;
            }
        }

        std::string key;
        if (need >= 0) {
            const std::size_t take = std::min<std::size_t>(word.size(),
                                                           static_cast<std::size_t>(need));
            prefix.assign(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(take));
            WalkPrefix st{prefix, word.size(), esums};
            for (const auto& g : window)
                detail::append_key_value(key, phi.shift_diff(st, g), integer_vals);
        } else {
            ReducedWord gamma = ReducedWord::from_reduced({word.begin(), word.end()});
            const Rational base = phi.eval(gamma);
            for (const auto& g : window)
                detail::append_key_value(key, phi.eval(mul(g, gamma)) - base, integer_vals);
        }
        hist.add(key);
    }
    return hist;
}

}  // namespace qmdyn

// Symmetric measured group (Gamma, p): exact rational convolution powers,
// seeded path sampling, drift diagnostics, the averaging operators pi_n,
// and constructive Cesaro harmonization with exact residuals.
#pragma once

#include "qmdyn/qm.hpp"
#include "qmdyn/rational.hpp"
#include "qmdyn/rng.hpp"
#include "qmdyn/words.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace qmdyn {

inline constexpr std::size_t kDefaultConvCap = 1'000'000;

/// Exact finitely supported probability measure on the group,
/// symmetric (p(g) = p(g^-1)) with positive masses summing to 1.
class StepDistribution {
public:
    StepDistribution(GroupSpec spec, std::vector<std::pair<ReducedWord, Rational>> atoms)
        : spec_(spec), atoms_(std::move(atoms)) {
        validate_spec(spec_);
        if (atoms_.empty()) throw std::invalid_argument("StepDistribution: empty support");
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const auto& a, const auto& b) { return word_less(a.first, b.first); });
        Rational total = 0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_[i].second <= 0)
                throw std::invalid_argument("StepDistribution: probabilities must be positive");
            if (i && atoms_[i].first == atoms_[i - 1].first)
                throw std::invalid_argument("StepDistribution: duplicate atom");
            total += atoms_[i].second;
        }
        if (total != 1) throw std::invalid_argument("StepDistribution: mass must be exactly 1");
        for (const auto& [w, mass] : atoms_) {
            if (probability(inv(w)) != mass)
                throw std::invalid_argument("StepDistribution: measure must be symmetric");
        }
        // Cumulative thresholds for exact inversion sampling: pick the first
        // atom k with z < C_k * 2^64, z a raw 64-bit draw.
        Rational cum = 0;
        const BigInt two64 = BigInt(1) << 64;
        for (const auto& [w, mass] : atoms_) {
            cum += mass;
            thresholds_.emplace_back(numerator(cum) * two64, denominator(cum));
        }
    }

    const GroupSpec& spec() const { return spec_; }
    const std::vector<std::pair<ReducedWord, Rational>>& atoms() const { return atoms_; }

    Rational probability(const ReducedWord& w) const {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), w,
                                   [](const auto& a, const ReducedWord& b) {
                                       return word_less(a.first, b);
                                   });
        if (it == atoms_.end() || !(it->first == w)) return Rational(0);
        return it->second;
    }

    /// One increment, by cumulative-probability inversion over the support
    /// in canonical word order. Exact; consumes one 64-bit draw.
    const ReducedWord& sample(SplitMix64& rng) const {
        const BigInt z(rng.next());
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            if (z * thresholds_[k].second < thresholds_[k].first) return atoms_[k].first;
        }
        return atoms_.back().first;  // z < 2^64 = C_last * 2^64 always holds
    }

private:
    GroupSpec spec_;
    std::vector<std::pair<ReducedWord, Rational>> atoms_;
    std::vector<std::pair<BigInt, BigInt>> thresholds_;  // (num * 2^64, den)
};

/// Uniform measure on the 2r generators and inverses.
inline StepDistribution uniform_generator_step(const GroupSpec& spec) {
    validate_spec(spec);
    std::vector<std::pair<ReducedWord, Rational>> atoms;
    const Rational mass(1, 2 * spec.rank);
    for (int i = 1; i <= spec.rank; ++i) {
        atoms.emplace_back(reduce(spec, std::vector<int>{i}), mass);
        atoms.emplace_back(reduce(spec, std::vector<int>{-i}), mass);
    }
    return StepDistribution(spec, std::move(atoms));
}

using Measure = std::map<ReducedWord, Rational, WordLess>;

inline Measure convolve(const Measure& p, const Measure& q,
                        std::size_t cap = kDefaultConvCap) {
    Measure out;
    for (const auto& [a, pa] : p) {
        for (const auto& [b, qb] : q) {
            out[mul(a, b)] += pa * qb;
            if (out.size() > cap)
                throw std::length_error(
                    "convolve: support exceeds cap; use Monte Carlo mode instead");
        }
    }
    return out;
}

/// Exact n-fold convolution power; n = 0 gives the Dirac mass at e.
inline Measure conv_power(const StepDistribution& p, int n,
                          std::size_t cap = kDefaultConvCap) {
    if (n < 0) throw std::invalid_argument("conv_power: negative power");
    Measure step;
    for (const auto& [w, mass] : p.atoms()) step[w] = mass;
    Measure acc;
    acc[ReducedWord()] = 1;
    for (int i = 0; i < n; ++i) acc = convolve(acc, step, cap);
    return acc;
}

/// A seeded sample path: i.i.d. increments and their partial products.
struct PathSample {
    std::uint64_t seed = 0;
    std::vector<ReducedWord> increments;  // omega_1..omega_n
    ReducedWord endpoint;                 // Z_n = omega_1 ... omega_n

    /// Z_0..Z_n; materialized on demand.
    std::vector<ReducedWord> partial_products() const {
        std::vector<ReducedWord> zs;
        zs.reserve(increments.size() + 1);
        zs.emplace_back();
        for (const auto& w : increments) zs.push_back(mul(zs.back(), w));
        return zs;
    }
};

inline PathSample sample_path(const StepDistribution& p, int n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample_path: negative length");
    PathSample out;
    out.seed = seed;
    out.increments.reserve(static_cast<std::size_t>(n));
    SplitMix64 rng(seed);
    for (int i = 0; i < n; ++i) {
        const ReducedWord& w = p.sample(rng);
        out.increments.push_back(w);
        out.endpoint = mul(out.endpoint, w);
    }
    return out;
}

/// d_n = sum_g p^{*n}(g) phi(g), exact.
inline Rational drift(const Quasimorphism& phi, const StepDistribution& p, int n,
                      std::size_t cap = kDefaultConvCap) {
    Rational s = 0;
    for (const auto& [g, mass] : conv_power(p, n, cap)) s += mass * phi.eval(g);
    return s;
}

inline Rational pi_n_exact(const Quasimorphism& phi, const Measure& pn,
                           const ReducedWord& gamma) {
    Rational s = 0;
    for (const auto& [g, mass] : pn) s += mass * (phi.eval(mul(g, gamma)) - phi.eval(g));
    return s;
}

/// pi_n(phi)(gamma) = sum_g p^{*n}(g) (phi(g gamma) - phi(g)), exact.
inline Rational avg_pi_exact(const Quasimorphism& phi, const StepDistribution& p, int n,
                             const ReducedWord& gamma, std::size_t cap = kDefaultConvCap) {
    return pi_n_exact(phi, conv_power(p, n, cap), gamma);
}

struct McEstimate {
    Rational estimate;  // exact mean of the sampled values
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Unbiased Monte Carlo estimate of pi_n(phi)(gamma). Sample i runs on the
/// sub-seed splitmix64(seed XOR i), so the result is independent of any
/// parallel execution order.
inline McEstimate avg_pi_mc(const Quasimorphism& phi, const StepDistribution& p, int n,
                            const ReducedWord& gamma, std::size_t samples,
                            std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("avg_pi_mc: need at least one sample");
    Rational sum = 0;
    double sq = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        SplitMix64 rng(subseed(seed, i));
        ReducedWord z;
        for (int k = 0; k < n; ++k) z = mul(z, p.sample(rng));
        Rational v = phi.eval(mul(z, gamma)) - phi.eval(z);
        sum += v;
        // Welford accumulation for the standard error.
        const double x = static_cast<double>(numerator(v).convert_to<double>()) /
                         static_cast<double>(denominator(v).convert_to<double>());
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        sq += delta * (x - mean);
    }
    McEstimate out;
    out.estimate = sum / Rational(static_cast<long long>(samples));
    out.samples = samples;
    if (samples > 1)
        out.std_error = std::sqrt(sq / static_cast<double>(samples - 1) /
                                  static_cast<double>(samples));
    return out;
}

/// Fingerprint of psi_N = (1/N) sum_{n=1..N} pi_n(phi) on B_L. The
/// constructive stand-in for an invariant mean over n.
inline Fingerprint cesaro_harmonize(const Quasimorphism& phi, const StepDistribution& p,
                                    int N, int L, std::size_t cap = kDefaultConvCap) {
    if (N < 1) throw std::invalid_argument("cesaro_harmonize: N must be >= 1");
    const auto window = ball(p.spec(), L);
    std::vector<Rational> totals(window.size(), Rational(0));
    Measure step;
    for (const auto& [w, mass] : p.atoms()) step[w] = mass;
    Measure pn;
    pn[ReducedWord()] = 1;
    for (int n = 1; n <= N; ++n) {
        pn = convolve(pn, step, cap);
        for (std::size_t i = 0; i < window.size(); ++i)
            totals[i] += pi_n_exact(phi, pn, window[i]);
    }
    for (auto& v : totals) v /= N;
    return Fingerprint(p.spec(), L, window, std::move(totals));
}

namespace detail {
template <typename Eval>
Rational harmonic_residual_impl(Eval&& psi, const StepDistribution& p, int L) {
    Rational worst = 0;
    for (const auto& g : ball(p.spec(), L)) {
        Rational s = 0;
        for (const auto& [a, mass] : p.atoms()) s += mass * psi(mul(inv(a), g));
        Rational r = abs(s - psi(g));
        if (r > worst) worst = r;
    }
    return worst;
}
}  // namespace detail

/// max over B_L of |(p * psi)(g) - psi(g)| with (p*psi)(g) = sum_s p(s) psi(s^-1 g).
/// Zero exactly when psi is left-p-harmonic on the window. The fingerprint
/// must cover B_{L+1}.
inline Rational harmonic_residual(const Fingerprint& psi, const StepDistribution& p, int L) {
    int max_atom = 1;
    for (const auto& [w, mass] : p.atoms()) max_atom = std::max(max_atom, w.length());
    if (psi.radius() < L + max_atom)
        throw std::invalid_argument("harmonic_residual: fingerprint radius must cover B_{L+1}");
    return detail::harmonic_residual_impl(
        [&psi](const ReducedWord& w) { return psi.value_at(w); }, p, L);
}

inline Rational harmonic_residual(const Quasimorphism& psi, const StepDistribution& p, int L) {
    return detail::harmonic_residual_impl(
        [&psi](const ReducedWord& w) { return psi.eval(w); }, p, L);
}

}  // namespace qmdyn

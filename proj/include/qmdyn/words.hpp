// Exact free-group word arithmetic: freely reduced words in F_r, ball
// enumeration in a canonical order, and the abelianization exponent sums.
// F_1 doubles as Z via the integer view at the bottom.
#pragma once

#include "qmdyn/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmdyn {

inline constexpr std::uint64_t kDefaultBallCap = 5'000'000;

/// Fixes the ambient group F_r (r = 1 encodes Z).
struct GroupSpec {
    int rank = 2;
    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

inline void validate_spec(const GroupSpec& spec) {
    if (spec.rank < 1) throw std::invalid_argument("GroupSpec: rank must be >= 1");
}

/// A freely reduced word. Letters are signed generator indices (i or -i,
/// 1 <= i <= r); the empty word is the identity. The no-adjacent-cancellation
/// invariant is maintained by every constructor path.
class ReducedWord {
public:
    ReducedWord() = default;

    const std::vector<int>& letters() const { return letters_; }
    int length() const { return static_cast<int>(letters_.size()); }
    bool is_identity() const { return letters_.empty(); }

    /// Validating factory for letters already believed reduced.
    static ReducedWord from_reduced(std::vector<int> ls) {
        for (std::size_t i = 0; i < ls.size(); ++i) {
            if (ls[i] == 0) throw std::invalid_argument("ReducedWord: letter 0");
            if (i + 1 < ls.size() && ls[i] == -ls[i + 1])
                throw std::invalid_argument("ReducedWord: adjacent cancelling pair");
        }
        return ReducedWord(unchecked_t{}, std::move(ls));
    }

    friend bool operator==(const ReducedWord&, const ReducedWord&) = default;

private:
    struct unchecked_t {};
    ReducedWord(unchecked_t, std::vector<int>&& ls) : letters_(std::move(ls)) {}

    std::vector<int> letters_;

    friend ReducedWord reduce(const GroupSpec&, std::span<const int>);
    friend ReducedWord mul(const ReducedWord&, const ReducedWord&);
    friend ReducedWord inv(const ReducedWord&);
    friend ReducedWord int_to_word(long long);
    friend std::vector<ReducedWord> ball(const GroupSpec&, int, std::uint64_t);
};

/// Free reduction of a raw letter sequence.
inline ReducedWord reduce(const GroupSpec& spec, std::span<const int> raw) {
    validate_spec(spec);
    std::vector<int> out;
    out.reserve(raw.size());
    for (int l : raw) {
        if (l == 0 || l > spec.rank || l < -spec.rank)
            throw std::out_of_range("reduce: generator index out of range");
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return ReducedWord(ReducedWord::unchecked_t{}, std::move(out));
}

inline ReducedWord reduce(const GroupSpec& spec, const std::vector<int>& raw) {
    return reduce(spec, std::span<const int>(raw));
}

inline ReducedWord mul(const ReducedWord& w1, const ReducedWord& w2) {
    std::vector<int> out = w1.letters_;
    std::size_t i = 0;
    while (!out.empty() && i < w2.letters_.size() && out.back() == -w2.letters_[i]) {
        out.pop_back();
        ++i;
    }
    out.insert(out.end(), w2.letters_.begin() + i, w2.letters_.end());
    return ReducedWord(ReducedWord::unchecked_t{}, std::move(out));
}

inline ReducedWord inv(const ReducedWord& w) {
    std::vector<int> out(w.letters_.rbegin(), w.letters_.rend());
    for (int& l : out) l = -l;
    return ReducedWord(ReducedWord::unchecked_t{}, std::move(out));
}

/// Signed count of occurrences of letter +-i.
inline long long exp_sum(const ReducedWord& w, int gen) {
    if (gen < 1) throw std::out_of_range("exp_sum: generator index out of range");
    long long s = 0;
    for (int l : w.letters()) {
        if (l == gen) ++s;
        else if (l == -gen) --s;
    }
    return s;
}

inline long long exp_sum(const GroupSpec& spec, const ReducedWord& w, int gen) {
    if (gen < 1 || gen > spec.rank)
        throw std::out_of_range("exp_sum: generator index out of range");
    return exp_sum(w, gen);
}

// Canonical generator order 1 < -1 < 2 < -2 < ...
inline int letter_key(int l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }

/// Length-then-lexicographic order; the enumeration order of ball().
inline bool word_less(const ReducedWord& a, const ReducedWord& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    const auto& la = a.letters();
    const auto& lb = b.letters();
    for (std::size_t i = 0; i < la.size(); ++i) {
        if (la[i] != lb[i]) return letter_key(la[i]) < letter_key(lb[i]);
    }
    return false;
}

struct WordLess {
    bool operator()(const ReducedWord& a, const ReducedWord& b) const { return word_less(a, b); }
};

/// Number of reduced words of length <= L in F_r.
inline BigInt ball_size(const GroupSpec& spec, int L) {
    validate_spec(spec);
    if (L < 0) throw std::invalid_argument("ball_size: negative radius");
    const int r = spec.rank;
    if (r == 1) return BigInt(2 * static_cast<long long>(L) + 1);
    BigInt q = 2 * r - 1;
    BigInt qL = 1;
    for (int i = 0; i < L; ++i) qL *= q;
    return 1 + BigInt(2 * r) * (qL - 1) / (2 * r - 2);
}

/// All reduced words of length <= L, in length-then-lex order. Deterministic.
inline std::vector<ReducedWord> ball(const GroupSpec& spec, int L,
                                     std::uint64_t cap = kDefaultBallCap) {
    validate_spec(spec);
    if (L < 0) throw std::invalid_argument("ball: negative radius");
    if (ball_size(spec, L) > cap)
        throw std::length_error("ball: enumeration exceeds configured cap");

    std::vector<int> alphabet;
    for (int i = 1; i <= spec.rank; ++i) {
        alphabet.push_back(i);
        alphabet.push_back(-i);
    }
    std::vector<ReducedWord> words;
    words.emplace_back();
    std::size_t level_begin = 0;
    for (int len = 1; len <= L; ++len) {
        const std::size_t level_end = words.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            for (int l : alphabet) {
                const auto& parent = words[i].letters_;
                if (!parent.empty() && parent.back() == -l) continue;
                std::vector<int> next = parent;
                next.push_back(l);
                words.push_back(ReducedWord(ReducedWord::unchecked_t{}, std::move(next)));
            }
        }
        level_begin = level_end;
    }
    return words;
}

/// Dash-separated signed indices, e.g. [1,2,-1] -> "1-2--1"; identity -> "e".
inline std::string format_word(const ReducedWord& w) {
    if (w.is_identity()) return "e";
    std::string s;
    for (std::size_t i = 0; i < w.letters().size(); ++i) {
        if (i) s += '-';
        s += std::to_string(w.letters()[i]);
    }
    return s;
}

/// Accepts "e", the dash form ("1-2--1"), or letters (a..z, uppercase = inverse).
inline ReducedWord parse_word(const GroupSpec& spec, std::string_view s) {
    if (s.empty() || s == "e") return ReducedWord();
    std::vector<int> raw;
    const bool has_digit = s.find_first_of("0123456789") != std::string_view::npos;
    if (has_digit) {
        std::size_t i = 0;
        while (i < s.size()) {
            int sign = 1;
            if (s[i] == '-') {
                sign = -1;
                ++i;
            }
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j == i) throw std::invalid_argument("parse_word: expected index in '" + std::string(s) + "'");
            raw.push_back(sign * std::stoi(std::string(s.substr(i, j - i))));
            i = j;
            if (i < s.size()) {
                if (s[i] != '-') throw std::invalid_argument("parse_word: expected '-' separator");
                ++i;
            }
        }
    } else {
        for (char c : s) {
            if (c >= 'a' && c <= 'z') raw.push_back(c - 'a' + 1);
            else if (c >= 'A' && c <= 'Z') raw.push_back(-(c - 'A' + 1));
            else throw std::invalid_argument("parse_word: bad character");
        }
    }
    return reduce(spec, raw);
}

/// Integer view of F_1 = Z.
inline ReducedWord int_to_word(long long n) {
    std::vector<int> ls(static_cast<std::size_t>(n >= 0 ? n : -n), n >= 0 ? 1 : -1);
    return ReducedWord(ReducedWord::unchecked_t{}, std::move(ls));
}

inline long long word_to_int(const ReducedWord& w) {
    for (int l : w.letters())
        if (l != 1 && l != -1) throw std::domain_error("word_to_int: word not in F_1");
    return exp_sum(w, 1);
}

}  // namespace qmdyn

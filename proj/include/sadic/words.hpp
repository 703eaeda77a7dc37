#pragma once

// Finite alphabets and words. Alphabets may carry a glued pair structure
// (pairs A_i = {a_i, b_i}, optionally primed copies) used by the gluing
// operator and the level decompositions. Words hold a reference to their
// alphabet; mixing alphabets is an error, not a coercion.

#include "sadic/rational.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sadic {

struct PairInfo {
    int pair = -1;       // index i of the pair A_i
    char role = 0;       // 'a' or 'b'
    bool primed = false;

    bool operator==(const PairInfo&) const = default;
};

class Alphabet {
  public:
    static std::shared_ptr<const Alphabet> simple(std::vector<std::string> symbols) {
        return std::shared_ptr<const Alphabet>(new Alphabet(std::move(symbols), {}, 0));
    }

    /// Lambda_d = {a_0, b_0, ..., a_{d-1}, b_{d-1}}; with_primes adds the
    /// primed copies a_i', b_i' after the unprimed block.
    static std::shared_ptr<const Alphabet> glued(int d, bool with_primes = false) {
        if (d < 1) throw std::invalid_argument("glued alphabet needs d >= 1");
        std::vector<std::string> names;
        std::vector<PairInfo> info;
        for (int rep = 0; rep < (with_primes ? 2 : 1); ++rep) {
            for (int i = 0; i < d; ++i) {
                for (char r : {'a', 'b'}) {
                    std::string nm(1, r);
                    nm += "_" + std::to_string(i);
                    if (rep == 1) nm += "'";
                    names.push_back(nm);
                    info.push_back({i, r, rep == 1});
                }
            }
        }
        return std::shared_ptr<const Alphabet>(new Alphabet(std::move(names), std::move(info), d));
    }

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int s) const { return names_.at(s); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<int> find(const std::string& nm) const {
        auto it = std::find(names_.begin(), names_.end(), nm);
        if (it == names_.end()) return std::nullopt;
        return static_cast<int>(it - names_.begin());
    }

    bool has_pairs() const { return !pair_info_.empty(); }
    int pair_count() const { return d_; }
    const PairInfo& pair_info(int s) const {
        if (!has_pairs()) throw std::invalid_argument("alphabet has no glued structure");
        return pair_info_.at(s);
    }

    int symbol(int pair, char role, bool primed = false) const {
        for (int s = 0; s < size(); ++s)
            if (pair_info_.at(s) == PairInfo{pair, role, primed}) return s;
        throw std::invalid_argument("no such symbol in glued alphabet");
    }

    /// Two-letter alphabets have a letterwise complement a <-> b.
    int complement(int s) const {
        if (size() != 2) throw std::invalid_argument("complement needs a two-letter alphabet");
        return 1 - s;
    }

    bool operator==(const Alphabet& o) const {
        return names_ == o.names_ && pair_info_ == o.pair_info_ && d_ == o.d_;
    }

  private:
    Alphabet(std::vector<std::string> names, std::vector<PairInfo> info, int d)
        : names_(std::move(names)), pair_info_(std::move(info)), d_(d) {
        std::set<std::string> uniq(names_.begin(), names_.end());
        if (uniq.size() != names_.size())
            throw std::invalid_argument("alphabet symbols must be distinct");
        if (!pair_info_.empty() && pair_info_.size() != names_.size())
            throw std::invalid_argument("pair structure must cover every symbol");
    }

    std::vector<std::string> names_;
    std::vector<PairInfo> pair_info_;
    int d_ = 0;
};

using AlphabetRef = std::shared_ptr<const Alphabet>;

inline bool same_alphabet(const AlphabetRef& x, const AlphabetRef& y) {
    return x == y || (x && y && *x == *y);
}

class Word {
  public:
    Word() = default;
    Word(AlphabetRef alpha, std::vector<int> syms) : alpha_(std::move(alpha)), syms_(std::move(syms)) {
        for (int s : syms_)
            if (s < 0 || s >= alpha_->size()) throw std::invalid_argument("symbol outside alphabet");
    }

    static Word empty(AlphabetRef alpha) { return Word(std::move(alpha), {}); }
    static Word letter(AlphabetRef alpha, int s) { return Word(std::move(alpha), {s}); }

    /// Parses "abba" (single-char symbols) or "a_0.b_0.a_1" (dot-separated).
    static Word parse(const AlphabetRef& alpha, const std::string& text) {
        std::vector<int> syms;
        if (text.find('.') != std::string::npos) {
            std::size_t pos = 0;
            while (pos <= text.size()) {
                std::size_t dot = text.find('.', pos);
                std::string tok = text.substr(pos, dot == std::string::npos ? dot : dot - pos);
                if (!tok.empty()) syms.push_back(require(alpha, tok));
                if (dot == std::string::npos) break;
                pos = dot + 1;
            }
        } else {
            for (char c : text) syms.push_back(require(alpha, std::string(1, c)));
        }
        return Word(alpha, std::move(syms));
    }

    const AlphabetRef& alphabet() const { return alpha_; }
    std::size_t size() const { return syms_.size(); }
    bool empty() const { return syms_.empty(); }
    int operator[](std::size_t i) const { return syms_[i]; }
    const std::vector<int>& symbols() const { return syms_; }
    int front() const { return syms_.front(); }
    int back() const { return syms_.back(); }

    /// w_{[i, i+len)}, 0-based.
    Word sub(std::size_t i, std::size_t len) const {
        return Word(alpha_, std::vector<int>(syms_.begin() + i, syms_.begin() + i + len));
    }
    Word prefix(std::size_t len) const { return sub(0, std::min(len, size())); }
    Word suffix(std::size_t len) const {
        len = std::min(len, size());
        return sub(size() - len, len);
    }

    Word operator+(const Word& o) const {
        check_same(o);
        std::vector<int> s = syms_;
        s.insert(s.end(), o.syms_.begin(), o.syms_.end());
        return Word(alpha_, std::move(s));
    }

    std::string str() const {
        bool dotted = false;
        for (int s : syms_)
            if (alpha_->name(s).size() > 1) dotted = true;
        std::string out;
        for (std::size_t i = 0; i < syms_.size(); ++i) {
            if (dotted && i) out += ".";
            out += alpha_->name(syms_[i]);
        }
        return out.empty() ? "ε" : out;
    }

    bool operator==(const Word& o) const { return same_alphabet(alpha_, o.alpha_) && syms_ == o.syms_; }
    bool operator!=(const Word& o) const { return !(*this == o); }

    // length-then-lexicographic; this is also the serialization order
    bool operator<(const Word& o) const {
        if (syms_.size() != o.syms_.size()) return syms_.size() < o.syms_.size();
        return syms_ < o.syms_;
    }

    void check_same(const Word& o) const {
        if (!same_alphabet(alpha_, o.alpha_))
            throw std::invalid_argument("words over different alphabets");
    }

  private:
    static int require(const AlphabetRef& alpha, const std::string& tok) {
        auto s = alpha->find(tok);
        if (!s) throw std::invalid_argument("unknown symbol '" + tok + "'");
        return *s;
    }

    AlphabetRef alpha_;
    std::vector<int> syms_;
};

/// |w|_u: occurrences of u in w, overlaps allowed.
inline Int count_occurrences(const Word& w, const Word& u) {
    if (u.empty()) throw std::invalid_argument("count_occurrences: empty pattern");
    w.check_same(u);
    if (u.size() > w.size()) return 0;
    Int n = 0;
    for (std::size_t i = 0; i + u.size() <= w.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < u.size(); ++j)
            if (w[i + j] != u[j]) { hit = false; break; }
        if (hit) ++n;
    }
    return n;
}

/// freq(u, w) = |w|_u / |w| as an exact rational.
inline Rational frequency(const Word& u, const Word& w) {
    if (w.empty()) throw std::invalid_argument("frequency: empty reference word");
    return Rational(count_occurrences(w, u), Int(w.size()));
}

/// All length-k words over alpha, in canonical order.
inline std::vector<Word> all_words(const AlphabetRef& alpha, int k) {
    std::vector<Word> out;
    std::vector<int> cur(k, 0);
    if (k == 0) return {Word::empty(alpha)};
    while (true) {
        out.emplace_back(alpha, cur);
        int pos = k - 1;
        while (pos >= 0 && ++cur[pos] == alpha->size()) cur[pos--] = 0;
        if (pos < 0) break;
    }
    return out;
}

/// C A^k: length-k words with first letter = last letter.
inline std::set<Word> complete_words(const AlphabetRef& alpha, int k) {
    if (k < 2) throw std::invalid_argument("complete_words needs k >= 2");
    std::set<Word> out;
    for (auto& w : all_words(alpha, k))
        if (w.front() == w.back()) out.insert(w);
    return out;
}

/// Complement over a two-letter alphabet; an involution.
inline Word complement(const Word& w) {
    const auto& alpha = w.alphabet();
    std::vector<int> s;
    s.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) s.push_back(alpha->complement(w[i]));
    return Word(alpha, std::move(s));
}

/// Mirror image over a glued (possibly primed) alphabet: swap roles a <-> b
/// letterwise, keeping pair indices. Reduces to complement when |A| = 2.
inline Word pair_complement(const Word& w) {
    const auto& alpha = w.alphabet();
    if (!alpha->has_pairs()) return complement(w);
    std::vector<int> s;
    s.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& pi = alpha->pair_info(w[i]);
        s.push_back(alpha->symbol(pi.pair, pi.role == 'a' ? 'b' : 'a', pi.primed));
    }
    return Word(alpha, std::move(s));
}

/// \bar{C} A^k over a two-letter alphabet: w_1 = complement of w_k.
inline std::set<Word> cross_complete_words(const AlphabetRef& alpha, int k) {
    if (alpha->size() != 2)
        throw std::invalid_argument("cross_complete_words needs a two-letter alphabet");
    if (k < 2) throw std::invalid_argument("cross_complete_words needs k >= 2");
    std::set<Word> out;
    for (auto& w : all_words(alpha, k))
        if (w.front() == alpha->complement(w.back())) out.insert(w);
    return out;
}

}  // namespace sadic

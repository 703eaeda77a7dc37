#pragma once

// Morphisms of free monoids, composition matrices, structural predicates,
// essential occurrences, the pair-rotation kappa and the gluing operator.

#include "sadic/words.hpp"

#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

namespace sadic {

/// Dense nonnegative integer matrix, rows indexed by target letters and
/// columns by source letters when used as a composition matrix.
class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), v_(std::size_t(rows) * cols, 0) {}

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Int& operator()(int r, int c) { return v_[std::size_t(r) * cols_ + c]; }
    const Int& operator()(int r, int c) const { return v_[std::size_t(r) * cols_ + c]; }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix dimension mismatch");
        IntMatrix out(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Int& a = (*this)(i, k);
                if (a == 0) continue;
                for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
            }
        return out;
    }

    IntMatrix pow(unsigned long e) const {
        if (rows_ != cols_) throw std::invalid_argument("matrix power needs a square matrix");
        IntMatrix acc = identity(rows_), base = *this;
        while (e) {
            if (e & 1) acc = acc * base;
            if (e >>= 1) base = base * base;
        }
        return acc;
    }

    bool positive() const {
        return std::all_of(v_.begin(), v_.end(), [](const Int& x) { return x > 0; });
    }

    Int column_sum(int c) const {
        Int s = 0;
        for (int r = 0; r < rows_; ++r) s += (*this)(r, c);
        return s;
    }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<Int> v_;
};

/// M primitive <=> some power of its boolean pattern is all-ones; the
/// exponent never needs to exceed the Wielandt bound (n-1)^2 + 1.
inline bool primitive_matrix(const IntMatrix& m) {
    int n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("primitivity needs a square matrix");
    std::vector<std::vector<bool>> b(n, std::vector<bool>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b[i][j] = m(i, j) > 0;
    auto mul = [&](const auto& x, const auto& y) {
        std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (x[i][k])
                    for (int j = 0; j < n; ++j)
                        if (y[k][j]) out[i][j] = true;
        return out;
    };
    auto all = [&](const auto& x) {
        for (auto& row : x)
            for (bool e : row)
                if (!e) return false;
        return true;
    };
    long bound = long(n - 1) * (n - 1) + 1;
    auto cur = b;
    for (long p = 1; p <= bound; ++p) {
        if (all(cur)) return true;
        cur = mul(cur, b);
    }
    return false;
}

class Morphism {
  public:
    Morphism(AlphabetRef source, AlphabetRef target, std::vector<Word> images)
        : src_(std::move(source)), tgt_(std::move(target)), images_(std::move(images)) {
        if (static_cast<int>(images_.size()) != src_->size())
            throw std::invalid_argument("morphism needs one image per source letter");
        for (const auto& w : images_) {
            if (w.empty()) throw std::invalid_argument("morphism must be non-erasing");
            if (!same_alphabet(w.alphabet(), tgt_))
                throw std::invalid_argument("image over wrong alphabet");
        }
    }

    static Morphism identity(const AlphabetRef& alpha) {
        std::vector<Word> imgs;
        for (int s = 0; s < alpha->size(); ++s) imgs.push_back(Word::letter(alpha, s));
        return Morphism(alpha, alpha, std::move(imgs));
    }

    /// One line per letter, `letter -> image`; see Word::parse for tokens.
    static Morphism parse(const std::string& text, const AlphabetRef& source,
                          const AlphabetRef& target) {
        std::vector<Word> imgs(source->size(), Word::empty(target));
        std::vector<bool> seen(source->size(), false);
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            auto arrow = line.find("->");
            if (arrow == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw std::invalid_argument("bad morphism line: " + line);
                continue;
            }
            auto strip = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            std::string lhs = strip(line.substr(0, arrow));
            std::string rhs = strip(line.substr(arrow + 2));
            auto s = source->find(lhs);
            if (!s) throw std::invalid_argument("unknown source letter '" + lhs + "'");
            imgs[*s] = Word::parse(target, rhs);
            seen[*s] = true;
        }
        for (int s = 0; s < source->size(); ++s)
            if (!seen[s])
                throw std::invalid_argument("missing image for '" + source->name(s) + "'");
        return Morphism(source, target, std::move(imgs));
    }

    const AlphabetRef& source() const { return src_; }
    const AlphabetRef& target() const { return tgt_; }
    const Word& image(int s) const { return images_.at(s); }
    bool endomorphism() const { return same_alphabet(src_, tgt_); }

    std::optional<std::size_t> constant_length() const {
        std::size_t l = images_[0].size();
        for (const auto& w : images_)
            if (w.size() != l) return std::nullopt;
        return l;
    }

    Word apply(const Word& w) const {
        if (!same_alphabet(w.alphabet(), src_))
            throw std::invalid_argument("word not over the source alphabet");
        std::vector<int> out;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const auto& img = images_[w[i]].symbols();
            out.insert(out.end(), img.begin(), img.end());
        }
        return Word(tgt_, std::move(out));
    }

    Word apply_letter_power(int s, unsigned long e) const {
        Word w = Word::letter(src_, s);
        for (unsigned long i = 0; i < e; ++i) w = apply(w);
        return w;
    }

    /// this ∘ inner (apply inner first).
    Morphism compose(const Morphism& inner) const {
        if (!same_alphabet(inner.tgt_, src_))
            throw std::invalid_argument("compose: alphabet mismatch");
        std::vector<Word> imgs;
        for (int s = 0; s < inner.src_->size(); ++s) imgs.push_back(apply(inner.image(s)));
        return Morphism(inner.src_, tgt_, std::move(imgs));
    }

    Morphism power(unsigned long e) const {
        if (!endomorphism()) throw std::invalid_argument("power needs an endomorphism");
        if (e == 0) return identity(src_);
        Morphism acc = *this;
        for (unsigned long i = 1; i < e; ++i) acc = acc.compose(*this);
        return acc;
    }

    std::string format() const {
        std::string out;
        for (int s = 0; s < src_->size(); ++s)
            out += src_->name(s) + " -> " + images_[s].str() + "\n";
        return out;
    }

    bool operator==(const Morphism& o) const {
        return same_alphabet(src_, o.src_) && same_alphabet(tgt_, o.tgt_) && images_ == o.images_;
    }

  private:
    AlphabetRef src_, tgt_;
    std::vector<Word> images_;
};

/// M(sigma)_{b,a} = |sigma(a)|_b.
inline IntMatrix composition_matrix(const Morphism& m) {
    IntMatrix out(m.target()->size(), m.source()->size());
    for (int a = 0; a < m.source()->size(); ++a)
        for (int s : m.image(a).symbols()) out(s, a) += 1;
    return out;
}

inline bool is_constant_length(const Morphism& m) { return m.constant_length().has_value(); }

inline bool is_left_permutative(const Morphism& m) {
    std::set<int> firsts;
    for (int s = 0; s < m.source()->size(); ++s) firsts.insert(m.image(s).front());
    return static_cast<int>(firsts.size()) == m.source()->size();
}

inline bool is_positive(const Morphism& m) { return composition_matrix(m).positive(); }

inline bool is_primitive(const Morphism& m) {
    if (!m.endomorphism()) throw std::invalid_argument("primitivity needs an endomorphism");
    return primitive_matrix(composition_matrix(m));
}

/// Every letter's image starts and ends with that letter.
inline bool is_prolongable(const Morphism& m) {
    if (!m.endomorphism()) throw std::invalid_argument("prolongable needs an endomorphism");
    for (int s = 0; s < m.source()->size(); ++s)
        if (m.image(s).front() != s || m.image(s).back() != s) return false;
    return true;
}

/// tau(complement(w)) = complement(tau(w)); defined for two-letter alphabets.
inline bool is_mirror(const Morphism& m) {
    if (m.source()->size() != 2 || m.target()->size() != 2) return false;
    for (int s = 0; s < 2; ++s)
        if (m.apply(complement(Word::letter(m.source(), s))) != complement(m.image(s)))
            return false;
    return true;
}

/// sigma is a substitution when every letter eventually grows under
/// iteration; with non-erasing images it suffices that every letter reaches
/// a letter with image length >= 2 within |A| steps.
inline bool is_substitution(const Morphism& m) {
    if (!m.endomorphism()) return false;
    int n = m.source()->size();
    std::vector<bool> grows(n);
    for (int s = 0; s < n; ++s) grows[s] = m.image(s).size() >= 2;
    for (int round = 0; round < n; ++round)
        for (int s = 0; s < n; ++s)
            if (!grows[s])
                for (int t : m.image(s).symbols())
                    if (grows[t]) grows[s] = true;
    return std::all_of(grows.begin(), grows.end(), [](bool b) { return b; });
}

struct Predicates {
    bool constant_length = false;
    bool left_permutative = false;
    bool positive = false;
    bool primitive = false;
    bool prolongable = false;
    bool mirror = false;
};

inline Predicates predicates(const Morphism& m) {
    Predicates p;
    p.constant_length = is_constant_length(m);
    p.left_permutative = is_left_permutative(m);
    p.positive = is_positive(m);
    if (m.endomorphism()) {
        p.primitive = is_primitive(m);
        p.prolongable = is_prolongable(m);
    }
    p.mirror = is_mirror(m);
    return p;
}

/// Essential occurrences of u in sigma(w): occurrences whose first letter
/// falls in sigma(w_1) and last letter in sigma(w_{|w|}).
inline Int essential_occurrences(const Morphism& sigma, const Word& w, const Word& u) {
    if (w.empty() || u.empty())
        throw std::invalid_argument("essential_occurrences: empty input");
    if (w.size() == 1) return count_occurrences(sigma.apply(w), u);
    Word img = sigma.apply(w);
    std::size_t first_len = sigma.image(w[0]).size();
    std::size_t last_len = sigma.image(w.back()).size();
    std::size_t last_start = img.size() - last_len;  // first index inside the last image
    Int n = 0;
    for (std::size_t i = 0; i + u.size() <= img.size(); ++i) {
        std::size_t end = i + u.size() - 1;
        if (i >= first_len || end < last_start) continue;
        bool hit = true;
        for (std::size_t j = 0; j < u.size(); ++j)
            if (img[i + j] != u[j]) { hit = false; break; }
        if (hit) ++n;
    }
    return n;
}

/// kappa: increment the pair index of the last letter (mod d), keeping the
/// a/b role. Defined on nonempty words over a glued alphabet whose last
/// letter is unprimed.
inline Word kappa(const Word& w) {
    if (w.empty()) throw std::invalid_argument("kappa: empty word");
    const auto& alpha = w.alphabet();
    if (!alpha->has_pairs()) throw std::invalid_argument("kappa: needs a glued alphabet");
    const auto& pi = alpha->pair_info(w.back());
    if (pi.primed) throw std::invalid_argument("kappa: last letter must be unprimed");
    int d = alpha->pair_count();
    std::vector<int> syms = w.symbols();
    syms.back() = alpha->symbol((pi.pair + 1) % d, pi.role, false);
    return Word(alpha, std::move(syms));
}

/// Embed a two-letter endomorphism as acting on the pair A_i inside a glued
/// alphabet (a -> a_i, b -> b_i).
inline Morphism embed_pair(const Morphism& tau, const AlphabetRef& glued, int i) {
    if (tau.source()->size() != 2 || !tau.endomorphism())
        throw std::invalid_argument("embed_pair: needs a two-letter endomorphism");
    auto lift = [&](const Word& w) {
        std::vector<int> syms;
        for (std::size_t p = 0; p < w.size(); ++p)
            syms.push_back(glued->symbol(i, w[p] == 0 ? 'a' : 'b', false));
        return Word(glued, std::move(syms));
    };
    std::vector<Word> imgs = {lift(tau.image(0)), lift(tau.image(1))};
    return Morphism(tau.source(), glued, std::move(imgs));
}

/// Glued substitution: sigma(a_i) = kappa(tau_i(a_i)), sigma(b_i) = kappa(tau_i(b_i)).
/// Each tau_i is an endomorphism of a two-letter alphabet, interpreted as A_i.
inline Morphism glue(const std::vector<Morphism>& taus) {
    int d = static_cast<int>(taus.size());
    if (d < 1) throw std::invalid_argument("glue: needs at least one substitution");
    auto glued = Alphabet::glued(d);
    std::vector<Word> images(glued->size(), Word::empty(glued));
    for (int i = 0; i < d; ++i) {
        const Morphism& tau = taus[i];
        if (tau.source()->size() != 2 || !tau.endomorphism())
            throw std::invalid_argument("glue: each component must be a two-letter endomorphism");
        Morphism lifted = embed_pair(tau, glued, i);
        for (int r = 0; r < 2; ++r) {
            int s = glued->symbol(i, r == 0 ? 'a' : 'b');
            images[s] = kappa(lifted.image(r));
        }
    }
    return Morphism(glued, glued, std::move(images));
}

/// zeta_L on a two-letter alphabet: a -> a^{L-1} b, b -> b^{L-1} a
/// (constant length L). The modified variant a -> a^L b of length L+1 is
/// available behind the flag.
inline Morphism zeta(int L, const AlphabetRef& alpha, bool length_plus_one = false) {
    if (alpha->size() != 2) throw std::invalid_argument("zeta: needs a two-letter alphabet");
    if (L < 2) throw std::invalid_argument("zeta: needs L >= 2");
    int reps = length_plus_one ? L : L - 1;
    std::vector<int> ia(reps, 0), ib(reps, 1);
    ia.push_back(1);
    ib.push_back(0);
    return Morphism(alpha, alpha, {Word(alpha, ia), Word(alpha, ib)});
}

inline AlphabetRef ab() { return Alphabet::simple({"a", "b"}); }

}  // namespace sadic

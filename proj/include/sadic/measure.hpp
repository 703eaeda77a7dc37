#pragma once

// Invariant measures on cylinder sets, stored as sparse maps from words of
// length <= k to exact rational masses. The level-to-level transfer
//     mu'(u) = 1/|sigma| sum_w essential(sigma(w), u) mu(w)
// is evaluated from per-letter block statistics, so it works unchanged when
// the level images are astronomically long. Masses stay exact rationals;
// when a configured bit budget is exceeded they are rounded to dyadic
// rationals with a tracked error bound.

#include "sadic/directive.hpp"

#include <mutex>
#include <sstream>

namespace sadic {

class LevelMeasure {
  public:
    LevelMeasure(std::string level, AlphabetRef alpha, int order)
        : level_(std::move(level)), alpha_(std::move(alpha)), order_(order) {
        if (order < 1) throw std::invalid_argument("measure order must be >= 1");
    }

    const std::string& level() const { return level_; }
    const AlphabetRef& alphabet() const { return alpha_; }
    int order() const { return order_; }
    const std::map<Word, Rational>& masses() const { return masses_; }
    const Rational& error_bound() const { return error_bound_; }
    bool exact() const { return error_bound_ == 0; }

    Rational mass(const Word& w) const {
        auto it = masses_.find(w);
        return it == masses_.end() ? Rational(0) : it->second;
    }

    void set_mass(const Word& w, Rational m) {
        if (m < 0) throw std::invalid_argument("negative mass");
        if (static_cast<int>(w.size()) > order_)
            throw std::invalid_argument("word longer than measure order");
        if (m == 0)
            masses_.erase(w);
        else
            masses_[w] = std::move(m);
    }

    void set_error_bound(Rational e) { error_bound_ = std::move(e); }
    void set_level(std::string l) { level_ = std::move(l); }

    Rational length_class_total(int j) const {
        Rational t = 0;
        for (const auto& [w, m] : masses_)
            if (static_cast<int>(w.size()) == j) t += m;
        return t;
    }

    /// Probability + Kolmogorov consistency, within tol (0 for exact data).
    bool consistent(const Rational& tol = 0) const {
        if (abs(length_class_total(1) - 1) > tol) return false;
        for (const auto& [w, m] : masses_) {
            if (m < 0) return false;
            if (static_cast<int>(w.size()) >= order_) continue;
            Rational right = 0, left = 0;
            for (int c = 0; c < alpha_->size(); ++c) {
                right += mass(w + Word::letter(alpha_, c));
                left += mass(Word::letter(alpha_, c) + w);
            }
            if (abs(right - m) > tol || abs(left - m) > tol) return false;
        }
        return true;
    }

    /// Max-norm distance over words of length <= min(order, o.order).
    Rational max_distance(const LevelMeasure& o) const {
        Rational d = 0;
        int k = std::min(order_, o.order_);
        auto upd = [&](const Word& w) {
            if (static_cast<int>(w.size()) > k) return;
            Rational diff = abs(mass(w) - o.mass(w));
            if (diff > d) d = diff;
        };
        for (const auto& [w, m] : masses_) upd(w);
        for (const auto& [w, m] : o.masses_) upd(w);
        return d;
    }

    /// CSV per the documented schema: exact rows are
    /// `level,word,numerator,denominator`, numeric rows
    /// `level,word,value,error_bound`; rows sorted by length then lex order.
    std::string to_csv() const {
        std::ostringstream out;
        if (exact()) {
            out << "level,word,numerator,denominator\n";
            for (const auto& [w, m] : masses_)
                out << level_ << "," << w.str() << "," << numerator(m) << ","
                    << denominator(m) << "\n";
        } else {
            out << "level,word,value,error_bound\n";
            for (const auto& [w, m] : masses_)
                out << level_ << "," << w.str() << "," << to_double(m) << ","
                    << to_double(error_bound_) << "\n";
        }
        return out.str();
    }

  private:
    std::string level_;
    AlphabetRef alpha_;
    int order_;
    std::map<Word, Rational> masses_;
    Rational error_bound_ = 0;
};

struct TransferOptions {
    unsigned bit_budget = 1u << 16;  // denominator bits before dyadic rounding
    unsigned mantissa_bits = 113;
};

/// Required upper-measure order for producing words of length k through a
/// constant-length-ell level: max |w| over w in W(u), |u| <= k.
inline int transfer_required_order(int k, const Int& ell) {
    if (k <= 1) return 1;
    Int w = Int(k - 2) / ell + 2;
    return w.convert_to<int>();
}

/// One transfer step down through a level. The sum over W(u) is organized
/// per upper word: essential occurrences of every u with |u| <= order are
/// read off the boundary windows (suffix . middles . prefix), and vanish
/// automatically for upper words longer than the W(u) cap.
inline LevelMeasure transfer_down(const LevelMeasure& upper, const LevelView& view, int order,
                                  const TransferOptions& opt = {}) {
    if (!same_alphabet(upper.alphabet(), view.upper))
        throw std::invalid_argument("transfer_down: measure not over the level's upper alphabet");
    if (view.order < order)
        throw std::invalid_argument("transfer_down: level view order too small");
    int need = transfer_required_order(order, view.length);
    if (upper.order() < need)
        throw std::invalid_argument("transfer_down: upper order " + std::to_string(upper.order()) +
                                    " insufficient, need " + std::to_string(need));
    if (abs(upper.length_class_total(1) - Rational(1)) > upper.error_bound() * upper.alphabet()->size())
        throw std::invalid_argument("transfer_down: upper masses do not sum to 1");

    std::map<Word, Rational> acc;       // sum over w of essential counts * mu(w)
    std::map<Word, Int> coeff_totals;   // for the error amplification factor
    for (const auto& [w, m] : upper.masses()) {
        int len = static_cast<int>(w.size());
        if (len > need) continue;
        if (len == 1) {
            for (const auto& [u, c] : view.letter_stats.at(w[0]).counts()) {
                if (static_cast<int>(u.size()) > order) continue;
                acc[u] += Rational(c) * m;
                coeff_totals[u] += c;
            }
            continue;
        }
        const BlockStats& first = view.letter_stats.at(w.front());
        const BlockStats& last = view.letter_stats.at(w.back());
        Word win = first.suffix();
        if (len > 2) {
            if (!view.letter_images)
                throw MaterializationError("transfer_down: middle images needed but not materialized");
            for (int p = 1; p + 1 < len; ++p) win = win + view.letter_images->at(w[p]);
        }
        std::size_t endzone = win.size();
        win = win + last.prefix();
        std::size_t cut = first.suffix().size();
        for (std::size_t s = 0; s < cut; ++s)
            for (std::size_t ul = 2; ul <= std::size_t(order); ++ul) {
                std::size_t e = s + ul - 1;
                if (e < endzone || e >= win.size()) continue;
                Word u = win.sub(s, ul);
                acc[u] += m;
                coeff_totals[u] += 1;
            }
    }
    LevelMeasure out("?", view.lower, order);
    Rational amplification = 0;
    for (auto& [u, total] : coeff_totals) {
        Rational a(total, view.length);
        if (a > amplification) amplification = a;
    }
    Rational err = upper.error_bound() * std::max(amplification, Rational(1));
    bool rounding = false;
    for (auto& [u, v] : acc) {
        Rational m = v / Rational(view.length);
        if (bit_size(denominator(m)) > opt.bit_budget) {
            m = round_to_bits(m, opt.mantissa_bits);
            rounding = true;
        }
        if (m != 0) out.set_mass(u, m);
    }
    if (rounding) err += pow2_neg(opt.mantissa_bits + 1) * 2;
    out.set_error_bound(err);
    return out;
}

/// Letter-to-letter pushforward: mu'(w) = sum over preimages of w.
inline LevelMeasure pushforward_letter_to_letter(const Morphism& phi, const LevelMeasure& mu) {
    for (int s = 0; s < phi.source()->size(); ++s)
        if (phi.image(s).size() != 1)
            throw std::invalid_argument("pushforward: morphism is not letter-to-letter");
    if (!same_alphabet(mu.alphabet(), phi.source()))
        throw std::invalid_argument("pushforward: measure not over the source alphabet");
    LevelMeasure out(mu.level(), phi.target(), mu.order());
    std::map<Word, Rational> acc;
    for (const auto& [w, m] : mu.masses()) acc[phi.apply(w)] += m;
    for (auto& [w, m] : acc) out.set_mass(w, m);
    out.set_error_bound(mu.error_bound());
    return out;
}

namespace detail {

inline std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> A,
                                          std::vector<Rational> b) {
    std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) throw std::runtime_error("singular linear system");
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        Rational pv = A[col][col];
        for (auto& x : A[col]) x /= pv;
        b[col] /= pv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            Rational f = A[r][col];
            for (std::size_t c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    return b;
}

}  // namespace detail

/// Exact letter frequencies of a primitive constant-length substitution:
/// the Perron eigenvector of M(tau) for the eigenvalue |tau|, normalized.
inline std::vector<Rational> letter_frequencies(const Morphism& tau) {
    if (!is_primitive(tau)) throw std::invalid_argument("letter_frequencies: not primitive");
    auto lenopt = tau.constant_length();
    if (!lenopt) throw std::invalid_argument("letter_frequencies: not constant length");
    int n = tau.source()->size();
    IntMatrix M = composition_matrix(tau);
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n));
    std::vector<Rational> b(n, 0);
    for (int r = 0; r + 1 < n; ++r)
        for (int c = 0; c < n; ++c)
            A[r][c] = Rational(M(r, c)) - (r == c ? Rational(*lenopt) : Rational(0));
    for (int c = 0; c < n; ++c) A[n - 1][c] = 1;  // normalization row
    b[n - 1] = 1;
    return detail::solve_linear(std::move(A), std::move(b));
}

/// Exact invariant measure of a primitive constant-length substitution on
/// words of length <= k. Letter masses come from the Perron eigenvector;
/// length-2 masses solve the transfer fixed point (the operator restricted
/// to length-2 unknowns contracts by 1/ell, so the system is regular);
/// longer masses extend through a power tau^e with ell^e + 2 > k.
inline LevelMeasure substitution_measure(const Morphism& tau, int k) {
    auto lenopt = tau.constant_length();
    if (!lenopt) throw std::invalid_argument("substitution_measure: not constant length");
    if (!is_primitive(tau)) throw std::invalid_argument("substitution_measure: not primitive");
    std::size_t ell = *lenopt;
    const auto& alpha = tau.source();
    int nl = alpha->size();
    LevelMeasure base("fixed", alpha, 2);
    auto letters = letter_frequencies(tau);
    for (int s = 0; s < nl; ++s) base.set_mass(Word::letter(alpha, s), letters[s]);

    auto pairs = all_words(alpha, 2);
    std::map<Word, int> pidx;
    for (std::size_t i = 0; i < pairs.size(); ++i) pidx[pairs[i]] = static_cast<int>(i);
    std::size_t np = pairs.size();
    std::vector<std::vector<Rational>> A(np, std::vector<Rational>(np, 0));
    std::vector<Rational> b(np, 0);
    for (std::size_t r = 0; r < np; ++r) {
        const Word& u = pairs[r];
        A[r][r] += Rational(Int(ell));
        for (int c = 0; c < nl; ++c)
            b[r] += Rational(count_occurrences(tau.image(c), u)) * letters[c];
        for (std::size_t wc = 0; wc < np; ++wc) {
            const Word& w = pairs[wc];
            Word joint = tau.image(w[0]).suffix(1) + tau.image(w[1]).prefix(1);
            if (joint == u) A[r][wc] -= 1;
        }
    }
    auto sol = detail::solve_linear(std::move(A), std::move(b));
    for (std::size_t i = 0; i < np; ++i)
        if (sol[i] != 0) base.set_mass(pairs[i], sol[i]);

    if (k <= 2) {
        base.set_level("invariant");
        return base;
    }
    unsigned long e = 1;
    Int elle = Int(ell);
    while (elle + 2 <= k) {
        ++e;
        elle *= Int(ell);
    }
    LevelView view;
    view.lower = alpha;
    view.upper = alpha;
    view.length = elle;
    view.order = k;
    view.letter_stats = power_letter_stats(tau, e, k);
    LevelMeasure out = transfer_down(base, view, k);
    out.set_level("invariant");
    // the invariant measure is the transfer fixed point; short masses must return unchanged
    for (const auto& [w, m] : base.masses())
        if (out.mass(w) != m) throw std::runtime_error("substitution_measure: fixed point violated");
    return out;
}

/// Process-wide memo for substitution measures (keyed by images + order).
inline const LevelMeasure& substitution_measure_cached(const Morphism& tau, int k) {
    static std::mutex mu;
    static std::map<std::string, LevelMeasure> cache;
    std::string key = tau.format() + "#" + std::to_string(k);
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, substitution_measure(tau, k)).first;
    return it->second;
}

struct GluedMeasureOptions {
    Rational tolerance = Rational(1, 1000000);
    long depth_cap = 24;
    long initial_depth = 2;
    TransferOptions transfer;
};

struct GluedMeasureResult {
    LevelMeasure measure;
    Rational certificate;   // max-norm distance between the last two depths
    bool converged = false;
    long depth = 0;
};

/// mu_i^{(n)} on words of length <= k: seed level n + depth with nu_i
/// extended by zero off A_i^*, transfer down, and certify by comparing
/// against depth + 1. Depth doubles until the certificate clears the
/// tolerance or the cap is reached (a flagged, not failed, result).
inline GluedMeasureResult glued_ergodic_measure(const GluedPowersSequence& seq, int i, long n,
                                                int k, const GluedMeasureOptions& opt = {}) {
    if (i < 0 || i >= seq.components())
        throw std::invalid_argument("glued_ergodic_measure: bad component");
    auto glued = seq.alphabet(0);

    auto run = [&](long depth) {
        long N = n + depth;
        // need[j] = order required at level n + j
        std::vector<int> need(static_cast<std::size_t>(depth) + 1);
        need[0] = k;
        for (long j = 0; j < depth; ++j)
            need[j + 1] = transfer_required_order(need[j], seq.length_at(n + j));
        int seed_order = std::max(need[depth], 2);
        const LevelMeasure& nu = substitution_measure_cached(seq.component(i), seed_order);
        // zero-extension of nu_i into Lambda_d
        LevelMeasure mu(std::to_string(N), glued, seed_order);
        for (const auto& [w, m] : nu.masses()) {
            std::vector<int> syms;
            for (std::size_t p = 0; p < w.size(); ++p)
                syms.push_back(glued->symbol(i, w[p] == 0 ? 'a' : 'b'));
            mu.set_mass(Word(glued, std::move(syms)), m);
        }
        for (long lev = N - 1; lev >= n; --lev) {
            int ord = need[lev - n];
            const LevelView& v = seq.view(lev, std::max(ord, 2));
            mu = transfer_down(mu, v, ord, opt.transfer);
            mu.set_level(std::to_string(lev));
        }
        return mu;
    };

    long depth = std::max<long>(1, opt.initial_depth);
    while (true) {
        LevelMeasure a = run(depth);
        LevelMeasure b = run(depth + 1);
        Rational cert = a.max_distance(b);
        if (cert <= opt.tolerance) return {std::move(b), std::move(cert), true, depth + 1};
        if (depth >= opt.depth_cap) return {std::move(b), std::move(cert), false, depth + 1};
        depth = std::min(opt.depth_cap, 2 * depth);
    }
}

/// Empirical measure of a finite prefix: per-length-class normalized factor
/// frequencies, masses[u] = |prefix|_u / (|prefix| - |u| + 1).
inline LevelMeasure empirical_measure(const Word& prefix, int k) {
    if (static_cast<int>(prefix.size()) < k)
        throw std::invalid_argument("empirical_measure: prefix shorter than order");
    BlockStats st = BlockStats::scan(prefix, k);
    LevelMeasure out("empirical", prefix.alphabet(), k);
    Int n(prefix.size());
    for (const auto& [u, c] : st.counts())
        out.set_mass(u, Rational(c, n - Int(u.size()) + 1));
    return out;
}

/// Measures of the decomposed sequence at every Q-level between n0 and N
/// (integers), seeded at level N with nu_i extended by zero. Orders are the
/// minimum needed to honor `orders` at the requested levels.
inline std::map<QIndex, LevelMeasure> decomposed_measures(const DecomposedSequence& dec, int i,
                                                          long n0, long N,
                                                          const std::map<QIndex, int>& orders) {
    if (n0 < 1 || N <= n0) throw std::invalid_argument("decomposed_measures: need 1 <= n0 < N");
    std::vector<QIndex> levels;
    for (QIndex q(n0, 0); !(q == QIndex(N, 0)); q = q.successor()) levels.push_back(q);
    levels.push_back(QIndex(N, 0));
    std::vector<int> need(levels.size(), 2);
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        auto it = orders.find(levels[idx]);
        if (it != orders.end()) need[idx] = std::max(need[idx], it->second);
    }
    for (std::size_t idx = 0; idx + 1 < levels.size(); ++idx) {
        const Morphism& m = dec.morphism_at(levels[idx]);
        int up = transfer_required_order(need[idx], Int(*m.constant_length()));
        need[idx + 1] = std::max(need[idx + 1], up);
    }
    const LevelMeasure& nu = substitution_measure_cached(dec.base().component(i), need.back());
    auto lambda = dec.alphabet(QIndex(N, 0));
    LevelMeasure mu(QIndex(N, 0).str(), lambda, need.back());
    for (const auto& [w, m] : nu.masses()) {
        std::vector<int> syms;
        for (std::size_t p = 0; p < w.size(); ++p)
            syms.push_back(lambda->symbol(i, w[p] == 0 ? 'a' : 'b'));
        mu.set_mass(Word(lambda, std::move(syms)), m);
    }
    std::map<QIndex, LevelMeasure> out;
    out.emplace(levels.back(), mu);
    for (std::size_t idx = levels.size() - 1; idx-- > 0;) {
        const Morphism& m = dec.morphism_at(levels[idx]);
        LevelView v = LevelView::from_morphism(m, std::max(need[idx], 2));
        mu = transfer_down(mu, v, need[idx]);
        mu.set_level(levels[idx].str());
        out.emplace(levels[idx], mu);
    }
    return out;
}

}  // namespace sadic

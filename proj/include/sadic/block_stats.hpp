#pragma once

// Order-k block statistics of a word: its length, occurrence counts of every
// factor of length <= k, and the boundary prefix/suffix of length k-1.
// Concatenation is closed on this data (straddling occurrences are read off
// the boundary words), so statistics of iterated images can be propagated
// through a morphism chain without materializing the image.

#include "sadic/morphism.hpp"

#include <map>

namespace sadic {

class BlockStats {
  public:
    BlockStats(int order, AlphabetRef alpha)
        : order_(order), alpha_(std::move(alpha)), length_(0),
          prefix_(Word::empty(alpha_)), suffix_(Word::empty(alpha_)) {
        if (order < 1) throw std::invalid_argument("block order must be >= 1");
    }

    static BlockStats scan(const Word& w, int order) {
        BlockStats st(order, w.alphabet());
        st.length_ = w.size();
        std::size_t n = w.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t len = 1; len <= std::min<std::size_t>(order, n - i); ++len)
                st.counts_[w.sub(i, len)] += 1;
        std::size_t b = std::min<std::size_t>(order - 1, n);
        st.prefix_ = w.prefix(b);
        st.suffix_ = w.suffix(b);
        return st;
    }

    int order() const { return order_; }
    const AlphabetRef& alphabet() const { return alpha_; }
    const Int& length() const { return length_; }
    const std::map<Word, Int>& counts() const { return counts_; }
    const Word& prefix() const { return prefix_; }
    const Word& suffix() const { return suffix_; }

    Int count(const Word& u) const {
        auto it = counts_.find(u);
        return it == counts_.end() ? Int(0) : it->second;
    }

    /// Append y in place (this becomes stats of this . y).
    void append(const BlockStats& y) {
        if (order_ != y.order_) throw std::invalid_argument("block order mismatch");
        if (!same_alphabet(alpha_, y.alpha_))
            throw std::invalid_argument("block alphabet mismatch");
        if (y.length_ == 0) return;
        if (length_ == 0) {
            *this = y;
            return;
        }
        for (const auto& [u, c] : y.counts_) counts_[u] += c;
        // straddling occurrences live inside suffix(x) . prefix(y)
        Word win = suffix_ + y.prefix_;
        std::size_t cut = suffix_.size();
        for (std::size_t s = 0; s < cut; ++s)
            for (std::size_t len = 2; len <= std::size_t(order_); ++len) {
                std::size_t e = s + len - 1;
                if (e < cut || e >= win.size()) continue;
                counts_[win.sub(s, len)] += 1;
            }
        std::size_t b = order_ - 1;
        if (length_ < Int(b)) prefix_ = (prefix_ + y.prefix_).prefix(b);
        if (y.length_ >= Int(b))
            suffix_ = y.suffix_;
        else
            suffix_ = (suffix_ + y.suffix_).suffix(b);
        length_ += y.length_;
    }

    /// Statistics of the concatenation; associative, with stats(ε) neutral.
    friend BlockStats concat(const BlockStats& x, const BlockStats& y) {
        BlockStats out = x;
        out.append(y);
        return out;
    }

    /// Per-length count totals must tile the word: sum over |u| = j equals
    /// length - j + 1. Used by tests and by the transfer sanity checks.
    bool consistent() const {
        std::map<std::size_t, Int> totals;
        for (const auto& [u, c] : counts_) totals[u.size()] += c;
        for (std::size_t j = 1; j <= std::size_t(order_); ++j) {
            if (Int(j) > length_) break;
            if (totals[j] != length_ - Int(j) + 1) return false;
        }
        return true;
    }

  private:
    int order_;
    AlphabetRef alpha_;
    Int length_;
    std::map<Word, Int> counts_;
    Word prefix_, suffix_;
};

/// Per-letter statistics of tau^e: S_e(c) = stats of tau^e(c), computed by
/// e rounds of image concatenation. Index = source symbol.
inline std::vector<BlockStats> power_letter_stats(const Morphism& tau, unsigned long e, int order) {
    if (!tau.endomorphism()) throw std::invalid_argument("power stats need an endomorphism");
    const auto& alpha = tau.source();
    std::vector<BlockStats> cur;
    for (int s = 0; s < alpha->size(); ++s)
        cur.push_back(BlockStats::scan(Word::letter(alpha, s), order));
    for (unsigned long round = 0; round < e; ++round) {
        std::vector<BlockStats> next;
        for (int s = 0; s < alpha->size(); ++s) {
            BlockStats st(order, alpha);
            for (int f : tau.image(s).symbols()) st.append(cur[f]);
            next.push_back(std::move(st));
        }
        cur = std::move(next);
    }
    return cur;
}

/// Statistics of sigma_1 ∘ ... ∘ sigma_m (c); the last element is applied
/// first. An empty chain yields the single-letter statistics. Builds
/// per-letter statistics of the prefix compositions sigma_1 ∘ ... ∘ sigma_j,
/// so only the individual chain images are ever walked.
inline BlockStats block_stats_letter(const std::vector<Morphism>& chain, const Word& c, int order) {
    if (c.size() != 1) throw std::invalid_argument("block_stats_letter: need a single letter");
    if (chain.empty()) return BlockStats::scan(c, order);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!same_alphabet(chain[i].source(), chain[i + 1].target()))
            throw std::invalid_argument("block_stats_letter: chain not composable");
    if (!same_alphabet(chain.back().source(), c.alphabet()))
        throw std::invalid_argument("block_stats_letter: letter not in source of last morphism");
    const auto& base = chain.front().target();
    std::vector<BlockStats> per;  // stats of sigma_{[1,j]}(s), s over source(sigma_j)
    for (int s = 0; s < base->size(); ++s)
        per.push_back(BlockStats::scan(Word::letter(base, s), order));
    for (const Morphism& m : chain) {
        std::vector<BlockStats> next;
        for (int s = 0; s < m.source()->size(); ++s) {
            BlockStats st(order, base);
            for (int f : m.image(s).symbols()) st.append(per.at(f));
            next.push_back(std::move(st));
        }
        per = std::move(next);
    }
    return per.at(c[0]);
}

}  // namespace sadic

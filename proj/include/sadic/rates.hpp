#pragma once

// Partial rigidity rates: complete-word masses, the constant-length rate
// scan, the r-coefficient machinery with the D-set recurrences across
// Q-levels, certified lower/upper bounds, and the empirical return-mass
// oracle.
//
// Alignment bookkeeping for the recurrences: a word of length l*k + j
// essential in the image of an upper word meets the first image in j-1
// positions when the upper word has length k+2, and in l-j+1 positions at
// length k+1. The matching coefficient sums are r_{j-1} and rtilde_{j-1}
// (the displayed formulas in the source material carry these at index j;
// engine equality holds at index j-1 and is enforced by tests).

#include "sadic/measure.hpp"

#include "json.hpp"

namespace sadic {

/// sum over complete words of length k (endpoints restricted to `subset`
/// when given; the full alphabet otherwise).
inline Rational complete_mass(const LevelMeasure& mu, int k,
                              const std::vector<int>& subset = {}) {
    if (mu.order() < k) throw std::invalid_argument("complete_mass: measure order too small");
    if (k < 2) throw std::invalid_argument("complete_mass: k >= 2");
    auto in = [&](int s) {
        return subset.empty() || std::find(subset.begin(), subset.end(), s) != subset.end();
    };
    Rational t = 0;
    for (const auto& [w, m] : mu.masses())
        if (static_cast<int>(w.size()) == k && w.front() == w.back() && in(w.front())) t += m;
    return t;
}

/// sum over words with w_1 = complement of w_k inside the two-letter pair
/// {sa, sb}; the glued-alphabet analogue of Cbar A_i^k.
inline Rational cross_complete_mass(const LevelMeasure& mu, int k, int sa, int sb) {
    if (mu.order() < k) throw std::invalid_argument("cross_complete_mass: order too small");
    if (k < 2) throw std::invalid_argument("cross_complete_mass: k >= 2");
    Rational t = 0;
    for (const auto& [w, m] : mu.masses()) {
        if (static_cast<int>(w.size()) != k) continue;
        if ((w.front() == sa && w.back() == sb) || (w.front() == sb && w.back() == sa)) t += m;
    }
    return t;
}

// ---------------------------------------------------------------------------
// pair correlations: nu(x_0 = c, x_h = c') for a constant-length invariant
// measure, by descending h through the substitution structure
// ---------------------------------------------------------------------------

class PairCorrelation {
  public:
    explicit PairCorrelation(const Morphism& tau) : tau_(tau) {
        auto len = tau.constant_length();
        if (!len) throw std::invalid_argument("pair correlations need constant length");
        ell_ = static_cast<long>(*len);
        nl_ = tau.source()->size();
        const LevelMeasure& nu = substitution_measure_cached(tau, 2);
        auto& c0 = memo_[0];
        auto& c1 = memo_[1];
        c0.assign(nl_ * nl_, Rational(0));
        c1.assign(nl_ * nl_, Rational(0));
        for (int c = 0; c < nl_; ++c) {
            c0[c * nl_ + c] = nu.mass(Word::letter(tau.source(), c));
            for (int e = 0; e < nl_; ++e)
                c1[c * nl_ + e] =
                    nu.mass(Word::letter(tau.source(), c) + Word::letter(tau.source(), e));
        }
    }

    /// nu(x_0 = c, x_h = e)
    const Rational& at(long h, int c, int e) { return table(h)[c * nl_ + e]; }

    Rational complete_mass_at(int k) {
        Rational t = 0;
        for (int c = 0; c < nl_; ++c) t += at(k - 1, c, c);
        return t;
    }

    Rational cross_mass_at(int k) {
        if (nl_ != 2) throw std::invalid_argument("cross mass needs a two-letter alphabet");
        return at(k - 1, 0, 1) + at(k - 1, 1, 0);
    }

  private:
    const std::vector<Rational>& table(long h) {
        auto it = memo_.find(h);
        if (it != memo_.end()) return it->second;
        std::vector<Rational> out(nl_ * nl_, Rational(0));
        for (long r = 0; r < ell_; ++r) {
            long q = (r + h) / ell_, s = (r + h) % ell_;
            const auto& up = table(q);
            for (int d = 0; d < nl_; ++d)
                for (int e = 0; e < nl_; ++e) {
                    const Rational& m = up[d * nl_ + e];
                    if (m == 0) continue;
                    out[tau_.image(d)[r] * nl_ + tau_.image(e)[s]] += m;
                }
        }
        for (auto& v : out) v /= ell_;
        return memo_.emplace(h, std::move(out)).first->second;
    }

    Morphism tau_;
    long ell_ = 0;
    int nl_ = 0;
    std::map<long, std::vector<Rational>> memo_;
};

// ---------------------------------------------------------------------------
// r-coefficients and the complete/D-set recurrences
// ---------------------------------------------------------------------------

/// delta^i_{j,j'} = 1_{v_j = v_{j'}} with v = tau_i(a_i); r_j and rtilde_j
/// are the diagonal sums of the displayed formulas, extended to j = 0
/// (r_0 = 0, rtilde_0 = l) where the empty/full diagonal convention applies.
class RCoefficients {
  public:
    explicit RCoefficients(const Morphism& tau) {
        if (!is_mirror(tau)) throw std::invalid_argument("r_coefficients: needs a mirror morphism");
        auto len = tau.constant_length();
        if (!len) throw std::invalid_argument("r_coefficients: needs constant length");
        ell_ = static_cast<long>(*len);
        compute(tau.image(0));
        // mirror-independence: the complement image gives the same table
        std::vector<long> r0 = r_, rt0 = rt_;
        compute(complement(tau.image(1)));
        if (r_ != r0 || rt_ != rt0)
            throw std::runtime_error("r_coefficients: mirror independence violated");
    }

    long ell() const { return ell_; }
    long r(long j) const { return r_.at(j); }
    long rt(long j) const { return rt_.at(j); }

  private:
    void compute(const Word& v) {
        auto delta = [&](long j, long jp) { return v[j - 1] == v[jp - 1] ? 1 : 0; };
        r_.assign(ell_ + 1, 0);
        rt_.assign(ell_ + 1, 0);
        for (long j = 0; j <= ell_; ++j) {
            for (long jp = 1; jp <= j; ++jp) r_[j] += delta(ell_ - j + jp, jp);
            for (long jp = 1; jp <= ell_ - j; ++jp) rt_[j] += delta(jp, j + jp);
        }
    }

    long ell_ = 0;
    std::vector<long> r_, rt_;
};

inline RCoefficients r_coefficients(const Morphism& tau) { return RCoefficients(tau); }

struct SetMasses {
    Rational complete;  // D (or C) class
    Rational cross;     // Dbar (or Cbar) class
};

/// Class of a word over a glued (possibly primed) alphabet for component i:
/// endpoints in A_i u A'_{i+1}, compared through eta (prime removal shifts
/// the pair index down by one).
inline std::optional<bool> d_class(const Word& w, int i) {
    const auto& alpha = w.alphabet();
    int d = alpha->pair_count();
    auto member = [&](int s) {
        const auto& pi = alpha->pair_info(s);
        return (!pi.primed && pi.pair == i) || (pi.primed && pi.pair == (i + 1) % d);
    };
    auto eta_role = [&](int s) { return alpha->pair_info(s).role; };
    if (w.size() < 1 || !member(w.front()) || !member(w.back())) return std::nullopt;
    return eta_role(w.front()) == eta_role(w.back());  // true = D, false = Dbar
}

inline SetMasses d_set_mass(const LevelMeasure& mu, int i, int len) {
    if (mu.order() < len) throw std::invalid_argument("d_set_mass: order too small");
    SetMasses out{0, 0};
    for (const auto& [w, m] : mu.masses()) {
        if (static_cast<int>(w.size()) != len) continue;
        auto cls = d_class(w, i);
        if (!cls) continue;
        (*cls ? out.complete : out.cross) += m;
    }
    return out;
}

enum class StepKind { Rho, Psi };

/// Convex-combination step: masses of D^i_{l k + j} and Dbar^i_{l k + j}
/// at the lower Q-level from the upper-level masses at lengths k+1, k+2.
/// `upper` must hold D-set masses (Rho step) or C-set masses (Psi step).
/// Verifies row-stochasticity of the four coefficients for every j.
inline std::map<long, SetMasses> d_recurrence_step(StepKind, const RCoefficients& rc,
                                                   const SetMasses& upper_k2,
                                                   const SetMasses& upper_k1, long k) {
    long ell = rc.ell();
    std::map<long, SetMasses> out;
    for (long j = 1; j <= ell; ++j) {
        long A = rc.r(j - 1), B = rc.rt(j - 1);
        long A2 = (j - 1) - A, B2 = (ell - (j - 1)) - B;
        if (A + A2 + B + B2 != ell)
            throw std::runtime_error("d_recurrence_step: coefficient rows must sum to ell");
        if (A < 0 || A2 < 0 || B < 0 || B2 < 0)
            throw std::runtime_error("d_recurrence_step: negative coefficient");
        SetMasses m;
        m.complete = (A * upper_k2.complete + B * upper_k1.complete + A2 * upper_k2.cross +
                      B2 * upper_k1.cross) /
                     ell;
        m.cross = (A2 * upper_k2.complete + B2 * upper_k1.complete + A * upper_k2.cross +
                   B * upper_k1.cross) /
                  ell;
        out[ell * k + j] = std::move(m);
    }
    return out;
}

/// The letter-to-letter step only bounds: C-mass at integer level n is at
/// most the D-mass one Q-step up plus 2/ell^{n+1}. Returned values are
/// bounds, not masses.
struct PhiBounds {
    Rational complete_bound;
    Rational cross_bound;
    Rational slack;
};

inline PhiBounds phi_step_bound(const SetMasses& upper, long n, long ell) {
    Rational slack = Rational(2) / Rational(int_pow(Int(ell), n + 1));
    return {upper.complete + slack, upper.cross + slack, slack};
}

// ---------------------------------------------------------------------------
// complete/cross masses at any k via the single-level recurrence
// (mirror constant-length substitutions; validated against enumeration and
// pair correlations in the tests)
// ---------------------------------------------------------------------------

class CompleteMassScan {
  public:
    explicit CompleteMassScan(const Morphism& tau) : rc_(tau) {
        if (tau.source()->size() != 2)
            throw std::invalid_argument("complete-mass scan: two-letter substitutions only");
        const LevelMeasure& nu = substitution_measure_cached(tau, 3);
        auto alpha = tau.source();
        memo_[1] = {Rational(1), Rational(0)};
        for (int k = 2; k <= 3; ++k) {
            SetMasses sm{0, 0};
            for (const auto& [w, m] : nu.masses()) {
                if (static_cast<int>(w.size()) != k) continue;
                (w.front() == w.back() ? sm.complete : sm.cross) += m;
            }
            memo_[k] = std::move(sm);
        }
    }

    const SetMasses& at(long k) {
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        long ell = rc_.ell();
        long j = (k - 1) % ell + 1;
        long kt = (k - j) / ell;
        const SetMasses up2 = at(kt + 2);
        const SetMasses up1 = at(kt + 1);
        auto row = d_recurrence_step(StepKind::Rho, rc_, up2, up1, kt);
        for (auto& [len, m] : row) memo_.emplace(len, std::move(m));
        return memo_.at(k);
    }

  private:
    RCoefficients rc_;
    std::map<long, SetMasses> memo_;
};

struct BoundResult {
    Rational value;
    long achieved_k = 0;
    bool cross_family = false;  // true when the max comes from the Cbar side
};

/// delta_{nu} search: max over k in [2, scan_max] of the complete mass of
/// the invariant measure of tau. Exact rationals; for the glued family the
/// companion upper bound certifies the scan is exhaustive.
inline BoundResult lower_bound(const Morphism& tau, long scan_max = 0) {
    auto len = tau.constant_length();
    if (!len) throw std::invalid_argument("lower_bound: constant length required");
    if (scan_max < 2) scan_max = static_cast<long>(*len) + 2;
    BoundResult best;
    if (is_mirror(tau)) {
        CompleteMassScan scan(tau);
        for (long k = 2; k <= scan_max; ++k) {
            const auto& m = scan.at(k);
            if (best.achieved_k == 0 || m.complete > best.value) {
                best.value = m.complete;
                best.achieved_k = k;
            }
        }
    } else {
        PairCorrelation pc(tau);
        for (long k = 2; k <= scan_max; ++k) {
            Rational v = pc.complete_mass_at(static_cast<int>(k));
            if (best.achieved_k == 0 || v > best.value) {
                best.value = v;
                best.achieved_k = k;
            }
        }
    }
    return best;
}

/// max over k in [2, k_hi] of both class masses of nu_tau (mirror tau).
inline BoundResult class_mass_max(const Morphism& tau, long k_hi) {
    CompleteMassScan scan(tau);
    BoundResult best;
    for (long k = 2; k <= k_hi; ++k) {
        const auto& m = scan.at(k);
        if (best.achieved_k == 0 || m.complete > best.value) {
            best.value = m.complete;
            best.achieved_k = k;
            best.cross_family = false;
        }
        if (m.cross > best.value) {
            best.value = m.cross;
            best.achieved_k = k;
            best.cross_family = true;
        }
    }
    return best;
}

/// max over k in [2, ell] of complete and cross-complete nu-masses; the
/// certified rate upper bound for the glued family (mirror, positive,
/// prolongable, constant length). Scanning k up to ell + 2 on any
/// constant-length mirror generator of the same subshift gives the same
/// value: the recurrence writes every longer-k class mass as a convex
/// combination of masses at k' <= ell + 2.
inline BoundResult upper_bound(const Morphism& tau) {
    if (!is_mirror(tau) || !is_positive(tau) || !is_prolongable(tau) || !tau.constant_length())
        throw std::invalid_argument(
            "upper_bound: needs a mirror, positive, prolongable, constant-length substitution");
    return class_mass_max(tau, static_cast<long>(*tau.constant_length()));
}

inline Rational zeta_closed_form(int L) { return Rational(L - 1, L + 1); }

// ---------------------------------------------------------------------------
// delta_estimate and the rate report
// ---------------------------------------------------------------------------

struct LevelEstimate {
    long n = 0;
    long achieved_k = 0;
    Rational value;          // max over k of the level's complete mass
    Int rigidity;            // (k_n - 1) h^{(n)}
    Rational certificate;    // transfer-ansatz certificate (glued systems)
    bool exact = true;
};

struct RateReport {
    int component = 0;
    long k_max = 0;
    Rational tolerance;
    std::vector<LevelEstimate> estimates;
    bool converged = false;
    std::optional<Rational> lower;   // delta_{nu_i}
    std::optional<Rational> upper;   // combination bound (when certified)
    bool upper_certified = false;
    std::string rigidity_description;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["component"] = component;
        j["k_max"] = k_max;
        j["tolerance"] = to_double(tolerance);
        j["converged"] = converged;
        auto ratj = [](const Rational& r) {
            return nlohmann::json{{"num", numerator(r).str()}, {"den", denominator(r).str()}};
        };
        if (lower) j["lower_bound"] = ratj(*lower);
        if (upper) {
            j["upper_bound"] = ratj(*upper);
            j["upper_certified"] = upper_certified;
        }
        j["rigidity_sequence"] = rigidity_description;
        j["estimates"] = nlohmann::json::array();
        for (const auto& e : estimates)
            j["estimates"].push_back({{"level", e.n},
                                      {"k", e.achieved_k},
                                      {"value", ratj(e.value)},
                                      {"value_approx", to_double(e.value)},
                                      {"rigidity_time", e.rigidity.str()},
                                      {"exact", e.exact},
                                      {"certificate", to_double(e.certificate)}});
        return j;
    }

    std::string estimates_csv() const {
        std::ostringstream out;
        out << "level,k,numerator,denominator,value,rigidity_time\n";
        for (const auto& e : estimates)
            out << e.n << "," << e.achieved_k << "," << numerator(e.value) << ","
                << denominator(e.value) << "," << to_double(e.value) << "," << e.rigidity.str()
                << "\n";
        return out.str();
    }
};

struct DeltaOptions {
    long k_max = 8;
    std::vector<long> levels = {1, 2, 3, 4};
    Rational tolerance = Rational(1, 1000000);
    GluedMeasureOptions glued;
    bool with_bounds = true;
};

/// Per level n: the measure mu_i^{(n)}, then max over k in [2, k_max] of the
/// complete mass over the full level alphabet; smallest k on ties. The
/// rigidity times are (k_n - 1) h^{(n)}.
inline RateReport delta_estimate(const DirectiveSequence& seq, int i, const DeltaOptions& opt = {}) {
    RateReport rep;
    rep.component = i;
    rep.k_max = opt.k_max;
    rep.tolerance = opt.tolerance;
    int order = static_cast<int>(opt.k_max);
    for (long n : opt.levels) {
        LevelEstimate est;
        est.n = n;
        LevelMeasure mu("", seq.alphabet(n), 1);
        if (seq.kind() == DirectiveSequence::Kind::Constant) {
            mu = substitution_measure_cached(
                static_cast<const ConstantSequence&>(seq).substitution(), order);
            est.certificate = 0;
            est.exact = true;
        } else {
            auto res = glued_ergodic_measure(static_cast<const GluedPowersSequence&>(seq), i, n,
                                             order, opt.glued);
            mu = std::move(res.measure);
            est.certificate = res.certificate;
            est.exact = mu.exact();
        }
        bool first = true;
        for (long k = 2; k <= opt.k_max; ++k) {
            Rational v = complete_mass(mu, static_cast<int>(k));
            if (first || v > est.value) {
                est.value = v;
                est.achieved_k = k;
                first = false;
            }
        }
        est.rigidity = Int(est.achieved_k - 1) * seq.height(n);
        rep.estimates.push_back(std::move(est));
    }
    for (std::size_t t = 1; t < rep.estimates.size(); ++t) {
        Rational diff = abs(rep.estimates[t].value - rep.estimates[t - 1].value);
        rep.converged = diff <= opt.tolerance;
    }
    if (rep.estimates.size() == 1) rep.converged = true;
    bool all_k2 = !rep.estimates.empty();
    for (const auto& e : rep.estimates) all_k2 = all_k2 && e.achieved_k == 2;
    rep.rigidity_description =
        all_k2 ? "h^(n)"
               : "(k_n - 1) h^(n), k_n as per level";
    if (opt.with_bounds) {
        const Morphism& tau = seq.kind() == DirectiveSequence::Kind::Constant
                                  ? static_cast<const ConstantSequence&>(seq).substitution()
                                  : static_cast<const GluedPowersSequence&>(seq).component(i);
        rep.lower = lower_bound(tau).value;
        if (is_mirror(tau) && tau.constant_length()) {
            // scanning the small base generator up to ell + 2 covers every k
            // of the effective power base (same subshift, same nu_i)
            rep.upper = class_mass_max(tau, static_cast<long>(*tau.constant_length()) + 2).value;
            if (seq.kind() == DirectiveSequence::Kind::Constant) {
                rep.upper_certified =
                    is_positive(tau) && (is_prolongable(tau) || is_prolongable(tau.power(2)));
            } else {
                // certification needs the n+1-schedule base tau^{c_i} to meet
                // the combination-bound hypotheses
                unsigned long c = static_cast<const GluedPowersSequence&>(seq).schedule().coef.at(i);
                Morphism eff = tau.power(c);
                rep.upper_certified = is_positive(eff) && is_prolongable(eff);
            }
        }
    }
    return rep;
}

/// Empirical return mass: fraction of positions t with
/// prefix[t, t+k) = prefix[t+h, t+h+k).
inline Rational empirical_return_mass(const Word& prefix, long h, int k) {
    if (h < 1 || k < 1) throw std::invalid_argument("empirical_return_mass: need h, k >= 1");
    long T = static_cast<long>(prefix.size()) - h - k + 1;
    if (T < 1) throw std::invalid_argument("empirical_return_mass: prefix too short");
    long hits = 0;
    for (long t = 0; t < T; ++t) {
        bool eq = true;
        for (int p = 0; p < k; ++p)
            if (prefix[t + p] != prefix[t + h + p]) { eq = false; break; }
        if (eq) ++hits;
    }
    return Rational(hits, T);
}

}  // namespace sadic

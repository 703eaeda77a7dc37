#include <catch2/catch_amalgamated.hpp>

#include "sadic/directive.hpp"

using namespace sadic;

namespace {

std::shared_ptr<GluedPowersSequence> example3() {
    auto A = ab();
    return glued_powers({Morphism::parse("a -> abba\nb -> baab", A, A),
                         Morphism::parse("a -> abbb\nb -> baaa", A, A)},
                        PowerSchedule{{1, 1}});
}

}  // namespace

TEST_CASE("constant sequences") {
    auto A = ab();
    auto seq = constant_sequence(zeta(6, A));
    CHECK(seq->morphism_at(17) == zeta(6, A));
    CHECK(seq->height(3) == 216);
    CHECK(seq->height(0) == 1);
    CHECK(is_primitive(seq->morphism_at(0)));
    CHECK(seq->alphabet_rank() == 2);
    CHECK_THROWS_AS(constant_sequence(Morphism::identity(A)), std::invalid_argument);
}

TEST_CASE("glued powers: lengths, matrices, views") {
    auto seq = example3();
    CHECK(seq->length_at(0) == 4);
    CHECK(seq->length_at(2) == 64);
    CHECK(seq->height(2) == 4 * 16);
    CHECK(seq->alphabet_rank() == 4);
    CHECK(seq->primitive_window_positive());

    // matrix_at never materializes; must agree with the materialized morphism
    for (long n : {0L, 1L, 2L}) {
        IntMatrix direct = composition_matrix(seq->morphism_at(n));
        CHECK(seq->matrix_at(n) == direct);
    }

    // view statistics agree with the materialized images
    for (long n : {0L, 1L}) {
        const LevelView& v = seq->view(n, 4);
        Morphism m = seq->morphism_at(n);
        for (int s = 0; s < 4; ++s) {
            BlockStats direct = BlockStats::scan(m.image(s), 4);
            CHECK(v.letter_stats[s].counts() == direct.counts());
            CHECK(v.letter_stats[s].prefix() == direct.prefix());
            CHECK(v.letter_stats[s].suffix() == direct.suffix());
        }
    }
}

TEST_CASE("materialization threshold guards literal requests") {
    auto seq = example3();
    seq->set_materialize_threshold(50);
    CHECK_THROWS_AS(seq->morphism_at(2), MaterializationError);  // length 64
    const LevelView& v = seq->view(2, 3);                        // stats still fine
    CHECK_FALSE(v.letter_images.has_value());
    CHECK(v.length == 64);
    CHECK(v.letter_stats[0].consistent());
}

TEST_CASE("desk and final-parametrization lengths match per level") {
    auto desk = desk_variant_sequence(6);
    CHECK(desk->length_at(0) == 1296);
    CHECK(desk->length_at(1) == Int(1296) * 1296);
    CHECK(desk->schedule().exponent(0, 1) == 8);
    CHECK(desk->schedule().exponent(1, 1) == 4);

    auto paper = paper_final_sequence(6, 2);
    CHECK(paper->length_at(0) == int_pow(6, 8));
    CHECK(paper->component(0).constant_length() == 36u);
    CHECK(paper->component(1).constant_length() == 1296u);
    CHECK(paper->schedule().exponent(0, 0) == 4);
    CHECK(paper->schedule().exponent(1, 0) == 2);

    auto A = ab();
    CHECK_THROWS_WITH(glued_powers({zeta(6, A), zeta(36, A)}, PowerSchedule{{1, 1}}),
                      Catch::Matchers::ContainsSubstring("level 0"));
}

TEST_CASE("glued powers validation") {
    auto A = ab();
    // not positive: a -> aaa has no b
    auto bad = Morphism::parse("a -> aab\nb -> bbb", A, A);
    CHECK_THROWS_AS(glued_powers({bad}, PowerSchedule{{1}}), std::invalid_argument);
    CHECK_THROWS_AS(glued_powers({zeta(6, A)}, PowerSchedule{{1, 2}}), std::invalid_argument);
}

TEST_CASE("QIndex ordering, kinds, successor") {
    QIndex q0(0, 0);
    CHECK(q0.successor() == QIndex(1, 0));
    QIndex q(2, 0);
    std::vector<QIndex::Kind> kinds;
    std::vector<std::string> labels;
    for (; !(q == QIndex(3, 0)); q = q.successor()) {
        kinds.push_back(q.kind());
        labels.push_back(q.str());
    }
    CHECK(kinds == std::vector<QIndex::Kind>{QIndex::Kind::Phi, QIndex::Kind::Rho,
                                             QIndex::Kind::Rho, QIndex::Kind::Psi});
    CHECK(labels == std::vector<std::string>{"2", "2+1/4", "2+2/4", "2+3/4"});
    CHECK(QIndex(2, 3) < QIndex(3, 0));
    CHECK(QIndex(2, 3).value() == Rational(11, 4));
    CHECK_THROWS_AS(QIndex(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(QIndex(0, 1), std::invalid_argument);
}

TEST_CASE("decomposition reproduces the glued morphisms") {
    auto seq = example3();
    DecomposedSequence dec(seq);
    auto lam = dec.alphabet(QIndex(1, 0));
    auto lamp = dec.alphabet(QIndex(1, 1));
    CHECK(dec.psi().image(lam->symbol(0, 'a')) == Word::parse(lamp, "a_0.b_0.b_0.a_1'"));
    CHECK(dec.rho().image(lamp->symbol(1, 'a', true)) == Word::parse(lamp, "a_0.b_0.b_0.a_1'"));
    CHECK(dec.recurrence_certified(0));
    CHECK_FALSE(dec.recurrence_certified(1));  // tau_1 is not prolongable

    // phi . rho^n . psi equals sigma_n on the prolongable component
    for (long n = 0; n <= 3; ++n) {
        Morphism sig = seq->morphism_at(n);
        for (char role : {'a', 'b'}) {
            Word w = dec.psi().image(lam->symbol(0, role));
            for (long p = 0; p < n; ++p) w = dec.rho().apply(w);
            CHECK(dec.phi().apply(w) == sig.image(lam->symbol(0, role)));
        }
    }

    // rho^n(a_{i+1}') = tau_i^n(a_i)_{[1, l^n)} a_{i+1}' for the prolongable component
    const Morphism& tau0 = seq->component(0);
    for (long n = 1; n <= 3; ++n) {
        Word w = Word::letter(lamp, lamp->symbol(1, 'a', true));
        for (long p = 0; p < n; ++p) w = dec.rho().apply(w);
        Word tpow = tau0.apply_letter_power(0, n);
        REQUIRE(w.size() == tpow.size());
        for (std::size_t pos = 0; pos + 1 < w.size(); ++pos) {
            const auto& pi = lamp->pair_info(w[pos]);
            CHECK(pi.pair == 0);
            CHECK((pi.role == 'a' ? 0 : 1) == tpow[pos]);
        }
        CHECK(w.back() == lamp->symbol(1, 'a', true));
    }

    CHECK_THROWS_AS(DecomposedSequence(desk_variant_sequence(6)), std::invalid_argument);
}

TEST_CASE("language generation") {
    auto A = ab();
    auto z6seq = constant_sequence(zeta(6, A));
    auto lang2 = language(*z6seq, 0, 2);
    CHECK(lang2.size() == 6);  // a, b, aa, ab, ba, bb all occur
    auto lang1 = language(*z6seq, 0, 1);
    CHECK(lang1.size() == 2);

    auto seq = example3();
    auto glang = language(*seq, 0, 2);
    auto ga = seq->alphabet(0);
    CHECK(glang.count(Word::parse(ga, "a_0.a_1")) == 1);

    // factor-closed and right-extendable
    auto lang4 = language(*z6seq, 0, 4);
    for (const auto& w : lang4) {
        if (w.size() >= 2) {
            CHECK(lang4.count(w.prefix(w.size() - 1)) == 1);
            CHECK(lang4.count(w.suffix(w.size() - 1)) == 1);
        }
        if (w.size() < 4) {
            bool extendable = false;
            for (int c = 0; c < 2; ++c)
                extendable = extendable || lang4.count(w + Word::letter(A, c));
            CHECK(extendable);
        }
    }

    // explicit insufficient depth: partial result carried in the error
    try {
        language(*z6seq, 0, 18, 1l);
        FAIL("expected PartialLanguageError");
    } catch (const PartialLanguageError& e) {
        CHECK_FALSE(e.found().empty());
    }
}

TEST_CASE("complexity profiles") {
    auto A = ab();
    auto tm = constant_sequence(zeta(2, A));
    auto p = complexity(*tm, 0, 4);
    CHECK(p[0] == 2);
    CHECK(p[1] == 4);  // Thue-Morse: p(2) = 4
    auto seq = example3();
    auto pg = complexity(*seq, 0, 30);
    CHECK(pg[0] == 4);
    for (int j = 1; j <= 30; ++j)
        CHECK(double(pg[j - 1]) / j <= 14.0);  // non-superlinear profile stays bounded
}

TEST_CASE("bkk quantities") {
    auto seq = example3();
    for (int i = 0; i < 2; ++i) {
        auto rows = bkk_check(*seq, i, 0, 4);
        for (const auto& r : rows) {
            Int ell = int_pow(4, r.n + 1);
            CHECK(r.eqa == Rational(2, ell));
            CHECK(r.eqc_summand == Rational(1, ell));
            CHECK(r.eqd >= 0);
        }
    }
    // d = 1: no foreign letters at all
    auto A = ab();
    auto solo = glued_powers({Morphism::parse("a -> abba\nb -> baab", A, A)}, PowerSchedule{{1}});
    auto rows = bkk_check(*solo, 0, 0, 3);
    for (const auto& r : rows) CHECK(r.eqa == 0);
    CHECK_THROWS_AS(bkk_check(*constant_sequence(zeta(6, A)), 0, 0, 2), std::invalid_argument);
}

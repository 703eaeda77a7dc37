#include <catch2/catch_amalgamated.hpp>

#include "sadic/morphism.hpp"

#include <random>

using namespace sadic;

namespace {

Word W(const AlphabetRef& a, const std::string& s) { return Word::parse(a, s); }

Morphism random_two_letter(std::mt19937& rng, int len) {
    auto A = ab();
    std::vector<Word> imgs;
    for (int s = 0; s < 2; ++s) {
        std::vector<int> w;
        for (int i = 0; i < len; ++i) w.push_back(static_cast<int>(rng() % 2));
        imgs.emplace_back(A, std::move(w));
    }
    return Morphism(A, A, std::move(imgs));
}

// random positive prolongable substitution on a two-letter alphabet:
// c . middle . c with both letters forced into the middle
Morphism random_admissible(std::mt19937& rng, int len) {
    auto A = ab();
    std::vector<Word> imgs;
    for (int s = 0; s < 2; ++s) {
        std::vector<int> w{s};
        for (int i = 0; i < len - 2; ++i) w.push_back(static_cast<int>(rng() % 2));
        w.push_back(s);
        w[1 + static_cast<int>(rng() % (len - 2))] = 1 - s;
        imgs.emplace_back(A, std::move(w));
    }
    return Morphism(A, A, std::move(imgs));
}

}  // namespace

TEST_CASE("application concatenates images") {
    auto A = ab();
    auto sigma = Morphism::parse("a -> abab\nb -> babb", A, A);
    CHECK(sigma.apply(W(A, "ab")) == W(A, "ababbabb"));
    CHECK(sigma.apply(Word::empty(A)) == Word::empty(A));
    auto z6 = zeta(6, A);
    CHECK(z6.apply(W(A, "ab")) == W(A, "aaaaabbbbbba"));
    auto g = Alphabet::glued(2);
    CHECK_THROWS_AS(sigma.apply(Word::letter(g, 0)), std::invalid_argument);
}

TEST_CASE("composition multiplies matrices") {
    auto A = ab();
    std::mt19937 rng(5);
    for (int rep = 0; rep < 40; ++rep) {
        Morphism s = random_two_letter(rng, 2 + rng() % 4);
        Morphism t = random_two_letter(rng, 2 + rng() % 4);
        CHECK(composition_matrix(t.compose(s)) == composition_matrix(t) * composition_matrix(s));
    }
    auto z6 = zeta(6, A);
    CHECK(Morphism::identity(A).compose(z6) == z6);
    CHECK(*z6.compose(z6).constant_length() == 36);
    CHECK(composition_matrix(z6.power(3)) == composition_matrix(z6).pow(3));
}

TEST_CASE("composition matrix entries") {
    auto A = ab();
    auto z6 = zeta(6, A);
    IntMatrix m = composition_matrix(z6);
    CHECK(m(0, 0) == 5);
    CHECK(m(1, 0) == 1);
    CHECK(m(0, 1) == 1);
    CHECK(m(1, 1) == 5);
    CHECK(composition_matrix(Morphism::identity(A)) == IntMatrix::identity(2));

    auto tau0 = Morphism::parse("a -> abba\nb -> baab", A, A);
    auto tau1 = Morphism::parse("a -> abbb\nb -> baaa", A, A);
    Morphism g = glue({tau0, tau1});
    auto ga = g.source();
    IntMatrix gm = composition_matrix(g);
    CHECK(gm(ga->symbol(1, 'a'), ga->symbol(0, 'a')) == 1);
    CHECK(gm(ga->symbol(0, 'a'), ga->symbol(0, 'a')) == 1);
    CHECK(gm(ga->symbol(0, 'b'), ga->symbol(0, 'a')) == 2);
}

TEST_CASE("structural predicates") {
    auto A = ab();
    auto z6 = zeta(6, A);
    auto p = predicates(z6);
    CHECK(p.mirror);
    CHECK_FALSE(p.prolongable);
    CHECK(p.constant_length);
    CHECK(p.positive);
    CHECK(p.primitive);
    CHECK(predicates(z6.power(2)).prolongable);
    CHECK(predicates(z6.power(2)).mirror);
    CHECK_FALSE(predicates(Morphism::identity(A)).primitive);

    auto tau0 = Morphism::parse("a -> abba\nb -> baab", A, A);
    auto tau1 = Morphism::parse("a -> abbb\nb -> baaa", A, A);
    CHECK(is_left_permutative(glue({tau0, tau1})));
    CHECK(is_prolongable(tau0));
    CHECK_FALSE(is_prolongable(tau1));
    CHECK(is_mirror(tau1));
}

TEST_CASE("essential occurrences") {
    auto A = ab();
    auto sigma = Morphism::parse("a -> abab\nb -> babb", A, A);
    CHECK(essential_occurrences(sigma, W(A, "ab"), W(A, "abb")) == 1);
    CHECK(count_occurrences(sigma.apply(W(A, "ab")), W(A, "abb")) == 2);
    // single-letter words: every occurrence is essential
    std::mt19937 rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        Morphism s = random_two_letter(rng, 3 + rng() % 3);
        Word u = W(A, rng() % 2 ? "ab" : "ba");
        CHECK(essential_occurrences(s, W(A, "a"), u) == count_occurrences(s.image(0), u));
    }
    auto z6 = zeta(6, A);
    CHECK(essential_occurrences(z6, W(A, "ba"), W(A, "aa")) == 1);
    CHECK_THROWS_AS(essential_occurrences(z6, Word::empty(A), W(A, "a")), std::invalid_argument);
}

TEST_CASE("essential occurrences decompose plain counts") {
    // |sigma(w)|_u = sum over factors w' of w of essential occurrences in sigma(w')
    auto A = ab();
    std::mt19937 rng(13);
    for (int rep = 0; rep < 60; ++rep) {
        Morphism s = random_two_letter(rng, 2 + rng() % 3);
        std::vector<int> wsyms;
        int wl = 2 + rng() % 4;
        for (int i = 0; i < wl; ++i) wsyms.push_back(static_cast<int>(rng() % 2));
        Word w(A, wsyms);
        int ul = 1 + rng() % 4;
        std::vector<int> usyms;
        for (int i = 0; i < ul; ++i) usyms.push_back(static_cast<int>(rng() % 2));
        Word u(A, usyms);
        Int direct = count_occurrences(s.apply(w), u);
        Int viaFactors = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t len = 1; len <= w.size() - i; ++len)
                viaFactors += essential_occurrences(s, w.sub(i, len), u);
        CHECK(direct == viaFactors);
    }
}

TEST_CASE("kappa rotates the final pair index") {
    auto g2 = Alphabet::glued(2);
    CHECK(kappa(Word::parse(g2, "a_0.a_0")) == Word::parse(g2, "a_0.a_1"));
    CHECK(kappa(Word::parse(g2, "a_0.b_1")) == Word::parse(g2, "a_0.b_0"));
    auto g1 = Alphabet::glued(1);
    Word w = Word::parse(g1, "a_0.b_0.a_0");
    CHECK(kappa(w) == w);
    CHECK_THROWS_AS(kappa(Word::empty(g2)), std::invalid_argument);
    auto gp = Alphabet::glued(2, true);
    CHECK_THROWS_AS(kappa(Word::parse(gp, "a_0.a_1'")), std::invalid_argument);
}

TEST_CASE("glued substitution images") {
    auto A = ab();
    auto tau0 = Morphism::parse("a -> abba\nb -> baab", A, A);
    auto tau1 = Morphism::parse("a -> abbb\nb -> baaa", A, A);
    Morphism g = glue({tau0, tau1});
    auto ga = g.source();
    CHECK(g.image(ga->symbol(0, 'a')) == Word::parse(ga, "a_0.b_0.b_0.a_1"));
    CHECK(g.image(ga->symbol(0, 'b')) == Word::parse(ga, "b_0.a_0.a_0.b_1"));
    CHECK(g.image(ga->symbol(1, 'a')) == Word::parse(ga, "a_1.b_1.b_1.b_0"));
    CHECK(g.image(ga->symbol(1, 'b')) == Word::parse(ga, "b_1.a_1.a_1.a_0"));

    // d = 1: kappa is the identity, so glue reproduces tau
    Morphism g1 = glue({tau0});
    auto g1a = g1.source();
    CHECK(g1.image(g1a->symbol(0, 'a')) == Word::parse(g1a, "a_0.b_0.b_0.a_0"));

    // column counts: one occurrence moved to the next pair
    IntMatrix gm = composition_matrix(g), t0 = composition_matrix(tau0);
    for (int c = 0; c < 2; ++c)
        for (int r = 0; r < 2; ++r) {
            Int expect = t0(r, c) - (tau0.image(c).back() == r ? 1 : 0);
            CHECK(gm(ga->symbol(0, r == 0 ? 'a' : 'b'), ga->symbol(0, c == 0 ? 'a' : 'b')) ==
                  expect);
        }
}

TEST_CASE("glue of random admissible substitutions is left-permutative with positive window") {
    std::mt19937 rng(31);
    for (int rep = 0; rep < 40; ++rep) {
        int d = 1 + static_cast<int>(rng() % 4);
        int len = 3 + static_cast<int>(rng() % 4);
        std::vector<Morphism> taus;
        for (int i = 0; i < d; ++i) taus.push_back(random_admissible(rng, len));
        Morphism g = glue(taus);
        CHECK(is_left_permutative(g));
        IntMatrix win = composition_matrix(g);
        for (int p = 1; p < d; ++p) win = win * composition_matrix(g);
        CHECK(win.positive());
    }
}

TEST_CASE("mirror morphisms commute with complement") {
    auto A = ab();
    std::mt19937 rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        Morphism s = random_admissible(rng, 3 + rng() % 4);
        // symmetrize: replace the b image with the complement of the a image
        Morphism m(A, A, {s.image(0), complement(s.image(0))});
        REQUIRE(is_mirror(m));
        std::vector<int> wsyms;
        for (int i = 0; i < 6; ++i) wsyms.push_back(static_cast<int>(rng() % 2));
        Word w(A, wsyms);
        CHECK(m.apply(complement(w)) == complement(m.apply(w)));
    }
}

TEST_CASE("morphism literal format round trip") {
    auto A = ab();
    auto z = zeta(4, A);
    CHECK(Morphism::parse(z.format(), A, A) == z);
    auto g = Alphabet::glued(2);
    std::string text = "a_0 -> a_0.b_0\nb_0 -> b_0.a_0\na_1 -> a_1.b_1\nb_1 -> b_1.a_1\n";
    auto m = Morphism::parse(text, g, g);
    CHECK(m.format() == text);
    CHECK_THROWS_AS(Morphism::parse("a -> ab", A, A), std::invalid_argument);   // missing b
    CHECK_THROWS_AS(Morphism::parse("a -> ab\nb -> ", A, A), std::invalid_argument);
    CHECK_THROWS_AS(Morphism::parse("a -> ab\nb -> ca", A, A), std::invalid_argument);
}

TEST_CASE("zeta conventions") {
    auto A = ab();
    auto z = zeta(6, A);
    CHECK(z.image(0) == Word::parse(A, "aaaaab"));
    CHECK(*z.constant_length() == 6);
    auto zp = zeta(6, A, true);
    CHECK(zp.image(0) == Word::parse(A, "aaaaaab"));
    CHECK(*zp.constant_length() == 7);
    CHECK(zeta(2, A).image(0) == Word::parse(A, "ab"));  // Thue-Morse
}

TEST_CASE("non-erasing and substitution checks") {
    auto A = ab();
    CHECK_THROWS_AS(Morphism(A, A, {Word::empty(A), Word::parse(A, "a")}), std::invalid_argument);
    CHECK(is_substitution(zeta(2, A)));
    // a -> a alone never grows
    CHECK_FALSE(is_substitution(Morphism::identity(A)));
    // a -> b, b -> ba grows everywhere eventually
    CHECK(is_substitution(Morphism::parse("a -> b\nb -> ba", A, A)));
}

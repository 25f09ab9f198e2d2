#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "dq/wick.hpp"
#include "helpers.hpp"

using namespace dq;
using namespace dqtest;

namespace {

// Independent oracle for the flat-model Wick product on fiber monomials,
// written directly from the exponential bidifferential with contraction
// weight -hbar: y^a yb^b * y^c yb^d = sum_k (-hbar)^k/k! a..(a-k+1) d..(d-k+1)
// y^{a+c-k} yb^{b+d-k}.
WeylForm flat_wick_oracle(int a, int b, int c, int d) {
    WeylForm r(1);
    for (int k = 0; k <= std::min(a, d); ++k) {
        mpz_class num = falling(a, k) * falling(d, k);
        mpz_class den = 1;
        for (int t = 2; t <= k; ++t) den *= t;
        Rational q(num, den);
        q.canonicalize();
        if (k % 2 == 1) q = -q;
        WeylKey key;
        key.h = HalfInt::whole(k);
        key.y = MultiIndex{a + c - k};
        key.yb = MultiIndex{b + d - k};
        r.add_term(key, JetPoly::constant(1, Scalar(q)));
    }
    return r;
}

}  // namespace

TEST_CASE("flat model: y * yb = y yb - hbar, yb * y = y yb") {
    InvMetric om = flat_inv_metric(1);
    WeylForm y = fib(1, 0), yb = fib(0, 1);
    CHECK(wick_star(y, yb, om).same_terms(fib(1, 1) - hbar1()));
    CHECK(wick_star(yb, y, om).same_terms(fib(1, 1)));
    Rng rng(2);
    WeylForm a = random_weyl(rng, 1, 8, 4);
    CHECK(wick_star(WeylForm::scalar(1, Scalar(1)), a, om).same_terms(a));
}

TEST_CASE("flat model reduces to the exponential bidifferential on 50 monomial pairs") {
    InvMetric om = flat_inv_metric(1);
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        int a = rng.uniform(0, 3), b = rng.uniform(0, 3);
        int c = rng.uniform(0, 3), d = rng.uniform(0, 3);
        WeylForm lhs = wick_star(fib(a, b), fib(c, d), om);
        CHECK(lhs.same_terms(flat_wick_oracle(a, b, c, d)));
    }
}

TEST_CASE("associativity, exactly, on random sparse triples") {
    InvMetric om = flat_inv_metric(2);
    Rng rng(17);
    for (int t = 0; t < 12; ++t) {
        WeylForm a = random_weyl(rng, 2, 8, 3, true);
        WeylForm b = random_weyl(rng, 2, 8, 3, true);
        WeylForm c = random_weyl(rng, 2, 8, 3, true);
        WeylForm lhs = wick_star(wick_star(a, b, om), c, om);
        WeylForm rhs = wick_star(a, wick_star(b, c, om), om);
        CHECK((lhs - rhs).is_zero());
    }
}

TEST_CASE("weight is preserved term by term") {
    InvMetric om = flat_inv_metric(1);
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
        WeylForm a = random_weyl(rng, 1, 10, 3);
        WeylForm b = random_weyl(rng, 1, 10, 3);
        // single homogeneous pieces: product of weight-u and weight-v parts
        // sits in weight u+v
        std::map<int, WeylForm> pa, pb;
        for (const auto& [k, cc] : a.terms()) {
            auto [it, fresh] = pa.try_emplace(k.weight(), WeylForm(1, a.weight_cap()));
            it->second.add_term(k, cc);
        }
        for (const auto& [k, cc] : b.terms()) {
            auto [it, fresh] = pb.try_emplace(k.weight(), WeylForm(1, b.weight_cap()));
            it->second.add_term(k, cc);
        }
        for (const auto& [u, au] : pa)
            for (const auto& [v, bv] : pb) {
                WeylForm prod = wick_star(au, bv, om);
                for (const auto& [k, cc] : prod.terms()) CHECK(k.weight() == u + v);
            }
    }
}

TEST_CASE("commutator: antisymmetry and center") {
    InvMetric om = flat_inv_metric(1);
    WeylForm y = fib(1, 0), yb = fib(0, 1);
    CHECK(wick_commutator(y, yb, om).same_terms(-hbar1()));
    Rng rng(31);
    WeylForm a = random_weyl(rng, 1, 8, 4);
    CHECK(wick_commutator(a, a, om).is_zero());
    CHECK(wick_commutator(WeylForm::scalar(1, Scalar(1)), a, om).is_zero());
}

TEST_CASE("conjugation reverses the Wick product") {
    InvMetric om = flat_inv_metric(2);
    Rng rng(37);
    for (int t = 0; t < 15; ++t) {
        WeylForm a = random_weyl(rng, 2, 8, 3);
        WeylForm b = random_weyl(rng, 2, 8, 3);
        WeylForm lhs = wick_star(a, b, om).conjugated();
        WeylForm rhs = wick_star(b.conjugated(), a.conjugated(), om);
        CHECK((lhs - rhs).is_zero());
    }
}

TEST_CASE("symbol of a product against a brute-force contraction") {
    InvMetric om = flat_inv_metric(1);
    // symbol(y^a yb^b * y^c yb^d): only full contractions survive y=yb=0
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b)
            for (int c = 0; c <= 3; ++c)
                for (int d = 0; d <= 3; ++d) {
                    WeylForm p = wick_star(fib(a, b), fib(c, d), om);
                    WeylForm sym(1);
                    for (const auto& [k, cc] : p.terms())
                        if (k.y.is_zero() && k.yb.is_zero()) sym.add_term(k, cc);
                    WeylForm expect(1);
                    if (a == d && b == 0 && c == 0) {
                        mpz_class num = falling(a, a);
                        Rational q(num, 1);
                        if (a % 2 == 1) q = -q;
                        WeylKey key;
                        key.h = HalfInt::whole(a);
                        key.y = MultiIndex{0};
                        key.yb = MultiIndex{0};
                        expect.add_term(key, JetPoly::constant(1, Scalar(q)));
                    }
                    CHECK((sym - expect).is_zero());
                }
}

TEST_CASE("star_exp basics and inverse") {
    InvMetric om = flat_inv_metric(1);
    // Phi = 0 -> 1
    CHECK(star_exp(WeylForm(1), 8).same_terms(WeylForm::scalar(1, Scalar(1))));

    // Phi = c y^2 yb^2: 1 + c y^2 yb^2 / h + c^2 y^4 yb^4 / (2 h^2) + ...
    Scalar cval = Scalar::of(3, 2);
    WeylForm phi = fib(2, 2, 0, cval);
    WeylForm e = star_exp(phi, 9);
    WeylForm expect = WeylForm::scalar(1, Scalar(1)) + fib(2, 2, -2, cval) +
                      fib(4, 4, -4, cval * cval * Scalar::of(1, 2));
    CHECK((e.truncated_weight(5) - expect.truncated_weight(5)).is_zero());
    for (const auto& [k, cc] : e.terms()) CHECK(k.weight() >= 0);

    WeylForm inv = star_inverse(e, om);
    WeylForm prod = wick_star(e, inv, om);
    CHECK((prod - WeylForm::scalar(1, Scalar(1))).is_zero());
    WeylForm prod2 = wick_star(inv, e, om);
    CHECK((prod2 - WeylForm::scalar(1, Scalar(1))).is_zero());

    // 1 + y inverts to the alternating series
    WeylForm u = (WeylForm::scalar(1, Scalar(1)) + fib(1, 0)).truncated_weight(5);
    WeylForm vinv = star_inverse(u, om);
    WeylForm alt(1, 5);
    for (int k = 0; k <= 5; ++k)
        alt.add_term(WeylKey{HalfInt(0), MultiIndex{k}, MultiIndex{0}, 0, 0},
                     JetPoly::constant(1, Scalar(k % 2 == 0 ? 1 : -1)));
    CHECK((vinv - alt).is_zero());

    CHECK_THROWS_AS(star_exp(fib(1, 0), 6), std::invalid_argument);
    CHECK_THROWS_AS(star_exp(hbar1(), 6), std::invalid_argument);
    CHECK_THROWS_AS(star_inverse(fib(1, 0), om), std::invalid_argument);
}

TEST_CASE("random admissible exponents invert") {
    InvMetric om = flat_inv_metric(1);
    Rng rng(53);
    for (int t = 0; t < 6; ++t) {
        WeylForm phi(1, 10);
        int terms = rng.uniform(1, 3);
        for (int u = 0; u < terms; ++u) {
            int a = rng.uniform(1, 2), b = rng.uniform(1, 2);
            int h = rng.uniform(0, 1);
            if (2 * h + a + b < 3) a += 1;
            phi = phi + fib(a, b, 2 * h, rng.scalar());
        }
        WeylForm e = star_exp(phi.truncated_weight(8), 8);
        WeylForm inv = star_inverse(e, om);
        CHECK((wick_star(e, inv, om) - WeylForm::scalar(1, Scalar(1))).is_zero());
    }
}

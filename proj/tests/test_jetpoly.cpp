#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/jetpoly.hpp"

using namespace dq;

namespace {
JetPoly zzb(int jo) {
    // z*zbar in one variable
    return JetPoly::monomial(1, MultiIndex{1}, MultiIndex{1}, Scalar(1), jo);
}
}  // namespace

TEST_CASE("product truncates at the minimum jet order") {
    JetPoly one = JetPoly::constant(1, Scalar(1), 4);
    JetPoly a = one + zzb(4);
    JetPoly b = one - zzb(4);
    JetPoly prod = a * b;
    // (1 + zzb)(1 - zzb) = 1 - (zzb)^2 at order 4
    JetPoly expected = one - zzb(4) * zzb(4);
    CHECK(prod == expected);
    CHECK(prod.jet_order() == 4);

    JetPoly zero(1, 4);
    CHECK((a * zero).is_zero());
}

TEST_CASE("binomial at low jet order") {
    // (z + zbar)^2 at jet order 2
    JetPoly z = JetPoly::monomial(1, MultiIndex{1}, MultiIndex{0}, Scalar(1), 2);
    JetPoly zb = JetPoly::monomial(1, MultiIndex{0}, MultiIndex{1}, Scalar(1), 2);
    JetPoly s = z + zb;
    JetPoly sq = s * s;
    JetPoly expected(1, 2);
    expected.add_term(JetKey{MultiIndex{2}, MultiIndex{0}}, Scalar(1));
    expected.add_term(JetKey{MultiIndex{1}, MultiIndex{1}}, Scalar(2));
    expected.add_term(JetKey{MultiIndex{0}, MultiIndex{2}}, Scalar(1));
    CHECK(sq == expected);
}

TEST_CASE("inverse multiplies back to one") {
    JetPoly one = JetPoly::constant(1, Scalar(1), 4);
    JetPoly a = one + zzb(4);
    JetPoly inv = a.inverted();
    CHECK(a * inv == one);
    // 1 - zzb + (zzb)^2 explicitly
    JetPoly expected = one - zzb(4) + zzb(4) * zzb(4);
    CHECK(inv == expected);

    CHECK(JetPoly::constant(1, Scalar(2), 4).inverted() ==
          JetPoly::constant(1, Scalar::of(1, 2), 4));
    CHECK(one.inverted() == one);
    CHECK_THROWS_AS(zzb(4).inverted(), std::domain_error);
}

TEST_CASE("differentiation drops the jet order by one") {
    JetPoly a = zzb(4);
    JetPoly d = a.d_z(0);
    CHECK(d.jet_order() == 3);
    CHECK(d == JetPoly::monomial(1, MultiIndex{0}, MultiIndex{1}, Scalar(1), 3));
    CHECK(a.d_zb(0).d_z(0).jet_order() == 2);
}

TEST_CASE("conjugation swaps holomorphic and antiholomorphic") {
    JetPoly iz = JetPoly::monomial(1, MultiIndex{1}, MultiIndex{0}, Scalar::i(), 5);
    JetPoly c = iz.conjugated();
    CHECK(c == JetPoly::monomial(1, MultiIndex{0}, MultiIndex{1}, -Scalar::i(), 5));
    CHECK(c.conjugated() == iz);
}

TEST_CASE("dimension mismatch is an error") {
    JetPoly a = JetPoly::constant(1, Scalar(1), 4);
    JetPoly b = JetPoly::constant(2, Scalar(1), 4);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
    CHECK_THROWS_AS(a + b, std::invalid_argument);
}

TEST_CASE("log series") {
    // log(1+u) = u - u^2/2 + u^3/3 at order 6, u = zzb
    JetPoly u = zzb(6);
    JetPoly l = jet_log1p(u);
    JetPoly expected =
        u - (u * u).scaled(Scalar::of(1, 2)) + (u * u * u).scaled(Scalar::of(1, 3));
    CHECK(l == expected);
}

TEST_CASE("composition substitutes holomorphically") {
    // rho = z zb, z -> z + z^2: becomes (z+z^2)(zb+zb^2)
    JetPoly a = zzb(4);
    JetPoly f = JetPoly::monomial(1, MultiIndex{1}, MultiIndex{0}, Scalar(1), 4) +
                JetPoly::monomial(1, MultiIndex{2}, MultiIndex{0}, Scalar(1), 4);
    JetPoly got = a.composed({f});
    JetPoly expected = f * f.conjugated();
    CHECK(got == expected);
}

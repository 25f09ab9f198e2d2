#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/fedosov.hpp"
#include "helpers.hpp"

using namespace dq;
using namespace dqtest;

namespace {

WeylForm jet1(int a, int b, Scalar c = Scalar(1), int jo = 12) {
    return WeylForm::from_jet(1, JetPoly::monomial(1, MultiIndex{a}, MultiIndex{b}, c, jo));
}

ConnectionData fs_conn(int cap = 8, int jo = 12) {
    return build_connection(kahler_from_potential(builtin_geometry("fs", 1, jo)), WeylForm(1), cap);
}

ConnectionData fs_prequantum(int cap = 8, int jo = 12) {
    KahlerData g = kahler_from_potential(builtin_geometry("fs", 1, jo));
    WeylForm pot = WeylForm::from_jet(1, g.log_h).scaled(Scalar(-1)).hbar_shifted(2);
    return build_connection(g, pot, cap);
}

// Taylor-expansion oracle for flat-model flat sections: substitute
// z -> z + y, zbar -> zbar + ybar into the symbol.
WeylForm flat_taylor_section(const WeylForm& f) {
    WeylForm r(1);
    for (const auto& [k, c] : f.terms())
        for (const auto& [jk, s] : c.coeffs()) {
            int a = jk.zi[0], b = jk.zbi[0];
            for (int p = 0; p <= a; ++p)
                for (int q = 0; q <= b; ++q) {
                    mpz_class binom;
                    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned>(a),
                                 static_cast<unsigned>(p));
                    mpz_class binom2;
                    mpz_bin_uiui(binom2.get_mpz_t(), static_cast<unsigned>(b),
                                 static_cast<unsigned>(q));
                    Rational coef(binom * binom2);
                    WeylKey nk;
                    nk.h = k.h;
                    nk.y = MultiIndex{p};
                    nk.yb = MultiIndex{q};
                    r.add_term(nk, JetPoly::monomial(1, MultiIndex{a - p}, MultiIndex{b - q},
                                                     s * Scalar(coef)));
                }
        }
    return r;
}

// engine Poisson bracket from the inverse metric
WeylForm poisson(const WeylForm& f, const WeylForm& g, const KahlerData& geo) {
    const Scalar half_i(Rational(0), Rational(1, 2));
    WeylForm r(1, std::min(f.weight_cap(), g.weight_cap()));
    for (const auto& [kf, cf] : f.terms())
        for (const auto& [kg, cg] : g.terms()) {
            WeylKey nk;
            nk.h = kf.h + kg.h;
            nk.y = MultiIndex(1);
            nk.yb = MultiIndex(1);
            JetPoly t = (cf.d_z(0) * cg.d_zb(0) - cg.d_z(0) * cf.d_zb(0)) *
                        geo.omega_upper[0][0];
            r.add_term(nk, t.scaled(half_i));
        }
    return r;
}

PotentialJet bump_potential(int jo = 12) {
    // K-normal but not locally symmetric: the degree-5 block breaks
    // covariant constancy of the curvature.
    JetPoly rho = JetPoly::monomial(1, MultiIndex{1}, MultiIndex{1}, Scalar(1), jo) +
                  JetPoly::monomial(1, MultiIndex{2}, MultiIndex{2}, Scalar::of(1, 2), jo) +
                  JetPoly::monomial(1, MultiIndex{2}, MultiIndex{3}, Scalar::of(1, 3), jo) +
                  JetPoly::monomial(1, MultiIndex{3}, MultiIndex{2}, Scalar::of(1, 3), jo);
    return PotentialJet{rho, 1, jo};
}

}  // namespace

TEST_CASE("delta family on spec cases") {
    WeylForm y2 = fib(2, 0);
    CHECK(delta10(y2).same_terms(with_form(fib(1, 0, 0, Scalar(2)), 1u, 0u)));
    WeylForm ydz = with_form(fib(1, 0), 1u, 0u);
    CHECK(delta10_inv(ydz).same_terms(fib(2, 0, 0, Scalar::of(1, 2))));
    CHECK(delta01(jet1(2, 0)).is_zero());
}

TEST_CASE("fedosov residual vanishes for every geometry and twist") {
    for (const char* name : {"flat", "fs", "hyp"}) {
        KahlerData g = kahler_from_potential(builtin_geometry(name, 1, 12));
        ConnectionData c = build_connection(g, WeylForm(1), 8);
        WeylForm res = fedosov_residual(c);
        CHECK(res.is_zero());
        CHECK(res.weight_cap() >= 7);
    }
    CHECK(fedosov_residual(fs_prequantum()).is_zero());
    // and on a non-symmetric geometry
    ConnectionData cb = build_connection(kahler_from_potential(bump_potential()), WeylForm(1), 8);
    CHECK(fedosov_residual(cb).is_zero());
}

TEST_CASE("flat connection data collapses") {
    KahlerData g = kahler_from_potential(builtin_geometry("flat", 1, 8));
    ConnectionData c = build_connection(g, WeylForm(1), 8);
    CHECK(c.I_alpha.is_zero());
    CHECK(c.gamma_alpha.min_total_degree() == 1);
    CHECK(c.gamma_alpha.same_terms(c.gamma_10 + c.gamma_01));
}

TEST_CASE("corrupting gamma breaks the residual") {
    ConnectionData c = fs_conn();
    WeylKey k;
    k.h = HalfInt::whole(1);
    k.y = MultiIndex{1};
    k.yb = MultiIndex{0};
    k.dzb = 1u;
    c.gamma_alpha = c.gamma_alpha + WeylForm::monomial(1, k, JetPoly::constant(1, Scalar(1)));
    CHECK(!fedosov_residual(c).is_zero());
}

TEST_CASE("alpha with an hbar-free part is rejected") {
    KahlerData g = kahler_from_potential(builtin_geometry("fs", 1, 10));
    WeylForm bad = WeylForm::from_jet(1, g.log_h);
    CHECK_THROWS_AS(build_connection(g, bad, 8), std::invalid_argument);
}

TEST_CASE("kapranov tensors: flat zero, symmetry, recursion consistency") {
    KahlerData flat = kahler_from_potential(builtin_geometry("flat", 1, 10));
    KapranovTensors kf = kapranov_tensors(flat, 6);
    for (int d = 2; d <= 6; ++d) CHECK(kf.at(d)[0].is_zero());

    // degree-2 tensor is half the curvature on fs
    KahlerData fs = kahler_from_potential(builtin_geometry("fs", 1, 12));
    KapranovTensors kt = kapranov_tensors(fs, 4);
    WeylKey key;
    key.h = HalfInt(0);
    key.y = MultiIndex{2};
    key.yb = MultiIndex{0};
    key.dzb = 1u;
    WeylForm expect = WeylForm::monomial(1, key, fs.curvature[0][0][0][0].scaled(Scalar::of(1, 2)));
    CHECK(kt.at(2)[0].same_terms(expect));

    // fs is locally symmetric: the recursion terminates after degree 2
    CHECK(kt.at(3)[0].is_zero());

    // a non-symmetric geometry keeps producing tensors, and the jet
    // connection they define is genuinely flat on holomorphic-Weyl sections
    KahlerData gb = kahler_from_potential(bump_potential());
    ConnectionData cb = build_connection(gb, WeylForm(1), 8);
    CHECK(!cb.kapranov.at(3)[0].is_zero());
    Rng rng(301);
    for (int t = 0; t < 6; ++t) {
        WeylForm a = random_weyl(rng, 1, 8, 3);
        WeylForm hol(1, 8);
        for (const auto& [k, cc] : a.terms())
            if (k.yb.degree() == 0) hol.add_term(k, cc);
        CHECK(apply_connection(apply_connection(hol, cb, Conn::Jet), cb, Conn::Jet).is_zero());
    }
}

TEST_CASE("classical connection is flat and D_C(1) = 0") {
    ConnectionData c = fs_conn();
    CHECK(apply_connection(WeylForm::scalar(1, Scalar(1)), c, Conn::Classical).is_zero());
    Rng rng(303);
    for (int t = 0; t < 6; ++t) {
        WeylForm a = random_weyl(rng, 1, 8, 3);
        CHECK(apply_connection(apply_connection(a, c, Conn::Classical), c, Conn::Classical)
                  .is_zero());
    }
}

TEST_CASE("fedosov connection: flatness and the jet extension property") {
    for (bool preq : {false, true}) {
        ConnectionData c = preq ? fs_prequantum() : fs_conn();
        Rng rng(preq ? 305 : 307);
        for (int t = 0; t < 10; ++t) {
            WeylForm a = random_weyl(rng, 1, 8, 3);
            CHECK(apply_connection(apply_connection(a, c, Conn::Fedosov), c, Conn::Fedosov)
                      .is_zero());
            WeylForm hol(1, 8);
            for (const auto& [k, cc] : a.terms())
                if (k.yb.degree() == 0) hol.add_term(k, cc);
            CHECK((apply_connection(hol, c, Conn::Fedosov) - apply_connection(hol, c, Conn::Jet))
                      .is_zero());
        }
    }
}

TEST_CASE("flat sections on the flat model are Taylor expansions") {
    KahlerData g = kahler_from_potential(builtin_geometry("flat", 1, 8));
    ConnectionData c = build_connection(g, WeylForm(1), 8);
    WeylForm f = jet1(1, 1);
    WeylForm expect = flat_taylor_section(f);
    CHECK((quantum_flat_section(f, c) - expect).is_zero());
    CHECK((classical_flat_section(f, c) - expect).is_zero());
    // D_{F,0}(z + y) = 0
    WeylForm zy = jet1(1, 0) + fib(1, 0);
    CHECK(apply_connection(zy.truncated_weight(8), c, Conn::Fedosov).is_zero());
    // f = 1 -> 1
    WeylForm one = WeylForm::scalar(1, Scalar(1));
    CHECK(quantum_flat_section(one, c).same_terms(one));
}

TEST_CASE("flat sections: symbol round trip, flatness, homomorphism") {
    ConnectionData c = fs_conn();
    const InvMetric& om = c.geometry.inv_metric();
    Rng rng(311);
    for (int t = 0; t < 4; ++t) {
        int a = rng.uniform(0, 2), b = rng.uniform(0, 2);
        WeylForm f = jet1(a, b, rng.scalar());
        WeylForm Of = quantum_flat_section(f, c);
        CHECK(apply_connection(Of, c, Conn::Fedosov).is_zero());
        CHECK((Of.symbol() - f.truncated_weight(Of.weight_cap())).is_zero());
        WeylForm Jf = classical_flat_section(f, c);
        CHECK(apply_connection(Jf, c, Conn::Classical).is_zero());
    }
    // homomorphism: the flat section of f*g is O_f * O_g
    WeylForm f = jet1(1, 1), g = jet1(2, 0);
    WeylForm prod_symbol = star_product(f, g, c);
    WeylForm lhs = quantum_flat_section(prod_symbol, c);
    WeylForm rhs = wick_star(quantum_flat_section(f, c), quantum_flat_section(g, c), om);
    CHECK((lhs - rhs).is_zero());
}

TEST_CASE("star product: flat values, unit, separation of variables") {
    KahlerData g = kahler_from_potential(builtin_geometry("flat", 1, 8));
    ConnectionData c = build_connection(g, WeylForm(1), 8);
    WeylForm z = jet1(1, 0), zb = jet1(0, 1);
    CHECK(star_product(z, zb, c).same_terms(jet1(1, 1) - hbar1()));
    CHECK(star_product(zb, z, c).same_terms(jet1(1, 1)));

    ConnectionData cf = fs_conn();
    WeylForm f = jet1(1, 1);
    CHECK((star_product(f, WeylForm::scalar(1, Scalar(1)), cf) -
           f.truncated_weight(6)).truncated_weight(6).is_zero());
    // antiholomorphic left factor and holomorphic right factor multiply
    // pointwise (Wick type / separation of variables)
    WeylForm zb2 = jet1(0, 2);
    WeylForm got = star_product(zb2, f, cf);
    CHECK((got - zb2.mul(f).truncated_weight(got.weight_cap())).is_zero());
    WeylForm z2 = jet1(2, 0);
    WeylForm got2 = star_product(f, z2, cf);
    CHECK((got2 - f.mul(z2).truncated_weight(got2.weight_cap())).is_zero());
}

TEST_CASE("first-order bracket is the Poisson bracket") {
    for (const char* name : {"flat", "fs", "hyp"}) {
        KahlerData g = kahler_from_potential(builtin_geometry(name, 1, 12));
        ConnectionData c = build_connection(g, WeylForm(1), 8);
        Rng rng(313);
        for (int t = 0; t < 3; ++t) {
            WeylForm f = jet1(rng.uniform(0, 2), rng.uniform(0, 2), rng.scalar());
            WeylForm h = jet1(rng.uniform(0, 2), rng.uniform(0, 2), rng.scalar());
            WeylForm bracket = star_product(f, h, c) - star_product(h, f, c);
            WeylForm expect = poisson(f, h, g).hbar_shifted(2);
            // compare through hbar^1
            WeylForm diff = bracket - expect;
            for (const auto& [k, cc] : diff.terms()) {
                if (k.h.twice_value <= 2) CHECK(cc.is_zero());
            }
        }
    }
}

TEST_CASE("star product is associative through hbar^3") {
    ConnectionData c = fs_conn();
    Rng rng(317);
    for (int t = 0; t < 5; ++t) {
        WeylForm f = jet1(rng.uniform(0, 2), rng.uniform(0, 2), rng.scalar());
        WeylForm g = jet1(rng.uniform(0, 2), rng.uniform(0, 2), rng.scalar());
        WeylForm h = jet1(rng.uniform(0, 2), rng.uniform(0, 2), rng.scalar());
        WeylForm lhs = star_product(star_product(f, g, c), h, c);
        WeylForm rhs = star_product(f, star_product(g, h, c), c);
        WeylForm diff = lhs - rhs;
        for (const auto& [k, cc] : diff.terms()) {
            if (k.h.twice_value <= 6) CHECK(cc.is_zero());
        }
    }
}

TEST_CASE("phi sections: flat and fs structure") {
    // flat: Phi_omega = omega_{1 1bar} y ybar, Phi = 0
    KahlerData g = kahler_from_potential(builtin_geometry("flat", 1, 8));
    ConnectionData c = build_connection(g, WeylForm(1), 8);
    PhiSections ps = phi_sections(c, builtin_geometry("flat", 1, 8));
    CHECK(ps.phi_omega.same_terms(fib(1, 1, 0, Scalar(Rational(0), Rational(1, 2)))));
    CHECK(ps.phi.is_zero());

    ConnectionData cf = fs_conn();
    PhiSections pf = phi_sections(cf, builtin_geometry("fs", 1, 12));
    for (int k = 2; k <= 4; ++k) {
        CHECK(pf.phi_omega.fiber_component(1, k).is_zero());
        CHECK(pf.phi_omega.fiber_component(k, 1).is_zero());
    }
    CHECK(pf.phi.min_total_degree() >= 3);
    CHECK(!pf.phi.is_zero());
}

TEST_CASE("mixed component of the section recovers the curvature lift") {
    // delta01((Phi_omega)_{n,2}) = (i/2) I_n, checked on a geometry where
    // the degree-3 tensor is nonzero
    for (bool bump : {false, true}) {
        PotentialJet rho = bump ? bump_potential() : builtin_geometry("fs", 1, 12);
        ConnectionData c = build_connection(kahler_from_potential(rho), WeylForm(1), 8);
        PhiSections ps = phi_sections(c, rho);
        for (int nn = 2; nn <= 3; ++nn) {
            WeylForm lhs = delta01(ps.phi_omega.fiber_component(nn, 2));
            WeylForm In(1, c.weight_cap);
            for (const auto& [k, cc] : c.I_sum.terms())
                if (k.y.degree() == nn) In.add_term(k, cc);
            if (bump && nn == 3) CHECK(!In.is_zero());
            WeylForm rhs = In.scaled(Scalar(Rational(0), Rational(1, 2)));
            CHECK((lhs - rhs).is_zero());
        }
    }
}

TEST_CASE("classical and quantum sections are exponential conjugates") {
    // J_f e^{Phi/h} = e^{Phi/h} * O_f on fs, both twists, three symbols
    for (bool preq : {false, true}) {
        ConnectionData c = preq ? fs_prequantum() : fs_conn();
        const InvMetric& om = c.geometry.inv_metric();
        PhiSections ps = phi_sections(c, builtin_geometry("fs", 1, 12));
        WeylForm E = star_exp(ps.phi.truncated_weight(8), 8);
        for (const WeylForm& f : {jet1(1, 1), jet1(2, 1), jet1(1, 0) + jet1(0, 1)}) {
            WeylForm lhs = classical_flat_section(f, c).mul(E);
            WeylForm rhs = wick_star(E, quantum_flat_section(f, c), om);
            CHECK((lhs - rhs).is_zero());
        }
    }
}

TEST_CASE("gauge conjugation identities") {
    ConnectionData c = fs_conn();
    const InvMetric& om = c.geometry.inv_metric();
    PhiSections ps = phi_sections(c, builtin_geometry("fs", 1, 12));
    WeylForm E = star_exp(ps.phi.truncated_weight(8), 8);
    WeylForm Einv = star_inverse(E, om);
    CHECK((wick_star(E, Einv, om) - WeylForm::scalar(1, Scalar(1))).is_zero());
    Rng rng(331);
    for (int t = 0; t < 6; ++t) {
        WeylForm O = random_weyl(rng, 1, 8, 3);
        WeylForm conj = wick_star(wick_star(E, O, om), Einv, om);
        WeylForm lhs = nabla(conj, c.geometry, Part::Anti) - delta01(conj);
        WeylForm rhs = wick_star(
            wick_star(E, apply_connection(O, c, Conn::Fedosov, Part::Anti), om), Einv, om);
        CHECK((lhs - rhs).is_zero());

        WeylForm A = random_weyl(rng, 1, 8, 3);
        WeylForm Aq = wick_star(Einv, A.mul(E), om);
        WeylForm lhs2 = apply_connection(A, c, Conn::Classical).mul(E);
        WeylForm rhs2 = wick_star(E, apply_connection(Aq, c, Conn::Fedosov), om);
        CHECK((lhs2 - rhs2).is_zero());
    }
}

TEST_CASE("iteration failure reports rather than looping") {
    ConnectionData c = fs_conn();
    WeylForm bad = with_form(fib(0, 0), 1u, 0u);
    CHECK_THROWS_AS(quantum_flat_section(bad, c), std::invalid_argument);
}

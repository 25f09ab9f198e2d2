#include "dq/fock.hpp"

#include <algorithm>
#include <stdexcept>

namespace dq {

namespace {

void accumulate(WeylForm& into, const WeylForm& t) {
    for (const auto& [k, c] : t.terms()) into.add_term(k, c);
}

int cap_min(int a, int b) { return std::min(a, b); }

int cap_add(int cap, int m) {
    return cap >= kCapUnbounded ? kCapUnbounded : cap + m;
}

}  // namespace

void ExtElt::validate() const {
    if (exponent.has_ybar())
        throw std::invalid_argument("ExtElt: exponent is not holomorphic-Weyl");
    if (exponent.max_form_degree() != 0)
        throw std::invalid_argument("ExtElt: exponent has nonzero form degree");
    if (amplitude.has_ybar())
        throw std::invalid_argument("ExtElt: amplitude is not holomorphic-Weyl");
}

bool ext_equal(const ExtElt& a, const ExtElt& b) {
    if (!(a.amplitude - b.amplitude).is_zero()) return false;
    WeylForm d = a.exponent - b.exponent;
    for (const auto& [k, c] : d.terms()) {
        if (c.is_zero()) continue;
        if (k.y.degree() || k.yb.degree() || k.form_degree()) return false;
        for (const auto& [jk, s] : c.coeffs())
            if (jk.degree() != 0) return false;
    }
    return true;
}

ExtElt bf_action(const WeylForm& o, const ExtElt& t, const KahlerData& g) {
    int n = o.dim();
    const WeylForm& amp = t.amplitude;
    const WeylForm& expo = t.exponent;

    // Lambda^{i jbar} = inverse Hermitian metric jets
    const Scalar inv_two_i(Rational(0), Rational(-1, 2));  // 1/(2 sqrt(-1))
    std::vector<std::vector<JetPoly>> lambda(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            lambda[static_cast<size_t>(i)].push_back(
                g.omega_upper[static_cast<size_t>(i)][static_cast<size_t>(j)].scaled(inv_two_i));

    // certified caps for the output (see header): weight-lowering exponent
    // hits are bounded by the ybar-degree of o and consume base degree.
    int maxB = 0;
    for (const auto& [k, c] : o.terms())
        if (!c.is_zero()) maxB = std::max(maxB, k.yb.degree());
    int mo = o.min_total_degree(), mt = amp.min_total_degree();
    int mdo = o.min_diag(), mdt = amp.min_diag();
    bool hits = maxB > 0 && !expo.is_zero();
    int mg = expo.min_total_degree(), mdg = expo.min_diag();

    int wcand = cap_min(cap_add(o.weight_cap(), mt), cap_add(amp.weight_cap(), mo));
    int dcand = cap_min(cap_add(o.certified_diag(), mdt), cap_add(amp.certified_diag(), mdo));
    if (hits) {
        if (expo.weight_cap() < kCapUnbounded)
            wcand = cap_min(wcand, mo + mt + expo.weight_cap() - 1);
        if (expo.certified_diag() < kCapUnbounded)
            dcand = cap_min(dcand, mdo + mdt + expo.certified_diag() - 1);
    }
    bool deficit = hits && mg < 2;
    int out_w = wcand, out_d = dcand;
    if (deficit) {
        // weight-lowering hits: the pure-weight region shrinks by the worst
        // case deficit; the joint weight-plus-base region absorbs the rest
        // because each such hit consumes base degree.
        int pen_w = maxB * (2 - mg);
        int pen_d = maxB * std::max(0, 2 - mdg);
        out_d = cap_min(dcand, wcand);
        if (out_d < kCapUnbounded) out_d -= pen_d;
        out_w = wcand < kCapUnbounded ? wcand - pen_w : wcand;
        out_w = std::max(out_w, out_d);
    }

    WeylForm result(n, out_w, out_d);
    result.set_wplus(amp.wplus());

    for (const auto& [k, c] : o.terms()) {
        // markers carry no content; their uncertainty is already priced into
        // the certified_diag summaries above
        if (c.is_zero()) continue;
        // multiplication step: coefficient, hbar, y-part and form part
        WeylKey mult = k;
        mult.yb = MultiIndex(n);
        WeylForm s = WeylForm::monomial(n, mult, c).mul(amp);
        // derivative steps, one per ybar factor:
        // L_j(s) = sum_i Lambda^{i jbar} (hbar d_{y^i} s + s d_{y^i} g)
        for (int j = 0; j < n; ++j)
            for (int rep = 0; rep < k.yb[j]; ++rep) {
                WeylForm acc(n);
                bool first = true;
                for (int i = 0; i < n; ++i) {
                    WeylForm term = s.d_y(i).hbar_shifted(2) + s.mul(expo.d_y(i));
                    term = term.scaled_jet(lambda[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                    if (first) {
                        acc = term;
                        first = false;
                    } else {
                        acc = acc + term;
                    }
                }
                s = acc;
            }
        accumulate(result, s);
    }
    ExtElt out{result, expo};
    return out;
}

ExtElt apply_D_alpha(const ExtElt& t, const ConnectionData& c) {
    const KahlerData& g = c.geometry;
    WeylForm amp = nabla(t.amplitude, g);
    // (the Koszul-resolved exponent term: the generated one-form passes to
    // the front, so it is a plain left product)
    amp = amp + nabla(t.exponent, g).hbar_shifted(-2).mul(t.amplitude);
    ExtElt gamma_part = bf_action(c.gamma_alpha, t, g);
    amp = amp + gamma_part.amplitude.hbar_shifted(-2);
    return ExtElt{amp, t.exponent};
}

void check_gauge_twist(const FockElt& s, const ConnectionData& c) {
    int n = c.geometry.n;
    // d dbar psi as a two-form against -omega_hbar + hbar Ric
    WeylForm lhs(n, c.weight_cap);
    for (const auto& [k, coeff] : s.line_gauge.terms()) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                WeylKey key;
                key.h = k.h;
                key.y = MultiIndex(n);
                key.yb = MultiIndex(n);
                key.dz = 1u << i;
                key.dzb = 1u << j;
                lhs.add_term(key, coeff.d_z(i).d_zb(j));
            }
    }
    WeylForm ric(n, c.weight_cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            WeylKey key;
            key.h = HalfInt::whole(1);
            key.y = MultiIndex(n);
            key.yb = MultiIndex(n);
            key.dz = 1u << i;
            key.dzb = 1u << j;
            ric.add_term(key, c.geometry.ricci[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        }
    WeylForm rhs = ric - c.omega_hbar;
    if (!(lhs - rhs).is_zero())
        throw std::invalid_argument("FockElt: line gauge does not match the twist");
}

FockElt apply_DB_alpha(const FockElt& s, const ConnectionData& c) {
    check_gauge_twist(s, c);
    int n = c.geometry.n;
    ExtElt base = apply_D_alpha(s.base, c);
    // -(1/hbar) d(psi) wedged in front of the amplitude
    WeylForm theta(n, s.line_gauge.weight_cap(), s.line_gauge.diag_cap());
    for (const auto& [k, coeff] : s.line_gauge.terms())
        for (int i = 0; i < n; ++i) {
            WeylKey key = k;
            key.dz = 1u << i;
            theta.add_term(key, coeff.d_z(i));
        }
    base.amplitude =
        base.amplitude + theta.hbar_shifted(-2).mul(s.base.amplitude).scaled(Scalar(-1));
    return FockElt{base, s.line_gauge};
}

WeylForm build_beta(const KahlerData& g, const PotentialJet& rho, int weight_cap) {
    if (!is_k_normal(rho))
        throw std::invalid_argument("build_beta: potential is not in normal form");
    WeylForm beta(g.n, weight_cap);
    WeylForm cur = WeylForm::from_jet(g.n, rho.rho).truncated_weight(weight_cap);
    for (int k = 1; k <= weight_cap + 1; ++k) {
        cur = delta10_inv(nabla(cur, g, Part::Holo));
        if (cur.terms().empty()) break;
        accumulate(beta, cur);
    }
    beta = beta.scaled(Scalar(-1));
    if (!beta.at_basepoint().is_zero())
        throw std::runtime_error("build_beta: section does not vanish at the basepoint");
    return beta;
}

FockElt prequantum_section(const KahlerData& g, const PotentialJet& rho, int weight_cap) {
    FockElt s;
    s.base.amplitude = WeylForm::scalar(g.n, Scalar(1));
    s.base.exponent = build_beta(g, rho, weight_cap);
    s.line_gauge = WeylForm::from_jet(g.n, rho.rho);
    return s;
}

ModuleActionResult module_action(const WeylForm& f, const WeylForm& s_hol,
                                 const ConnectionData& c, const PotentialJet& rho) {
    const KahlerData& g = c.geometry;
    int n = g.n;
    for (const auto& [k, coeff] : s_hol.terms())
        for (const auto& [jk, sc] : coeff.coeffs())
            if (jk.zbi.degree() != 0)
                throw std::invalid_argument("module_action: s is not holomorphic");

    FockElt psi = prequantum_section(g, rho, c.weight_cap);
    WeylForm Js = classical_flat_section(s_hol, c);
    psi.base.amplitude = Js;
    WeylForm Of = quantum_flat_section(f, c);
    ExtElt acted = bf_action(Of, psi.base, g);

    // read the holomorphic series off the basepoint germ: the y-expansion of
    // a flat holomorphic-Weyl section at the basepoint is the Taylor
    // expansion of its symbol in normal coordinates.
    WeylForm germ = acted.amplitude.at_basepoint();
    WeylForm sprime(n, germ.weight_cap(), germ.diag_cap());
    for (const auto& [k, coeff] : germ.terms()) {
        if (coeff.is_zero()) continue;
        if (k.yb.degree() != 0 || k.form_degree() != 0)
            throw std::runtime_error("module_action: output amplitude is not a flat section");
        WeylKey nk;
        nk.h = k.h;
        nk.y = MultiIndex(n);
        nk.yb = MultiIndex(n);
        sprime.add_term(nk, JetPoly::monomial(n, k.y, MultiIndex(n), coeff.at_basepoint(),
                                              g.jet_order));
    }
    WeylForm Jsprime = classical_flat_section(sprime, c);
    ModuleActionResult out;
    out.s_prime = sprime;
    out.form_residual = acted.amplitude - Jsprime;
    return out;
}

bool boundedness_check(const FockElt& s, const Rational& r_bound) {
    if (r_bound <= 0) return false;
    WeylForm lin = s.base.exponent.fiber_component(1, 0).at_basepoint();
    Rational norm2(0);
    for (const auto& [k, c] : lin.terms()) {
        if (k.h.twice_value != 0 || c.is_zero()) continue;
        Scalar v = c.at_basepoint();
        norm2 += v.re * v.re + v.im * v.im;
    }
    return norm2 < r_bound * r_bound;
}

}  // namespace dq

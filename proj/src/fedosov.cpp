#include "dq/fedosov.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace dq {

namespace {

void accumulate(WeylForm& into, const WeylForm& t) {
    for (const auto& [k, c] : t.terms()) into.add_term(k, c);
}

const Scalar kTwoI(Rational(0), Rational(2));        // 2 sqrt(-1)
const Scalar kMinusTwoI(Rational(0), Rational(-2));  // -2 sqrt(-1)

// dbar of a fiber-free potential (terms may carry hbar powers).
WeylForm dbar_potential(const WeylForm& phi, const KahlerData& g) {
    WeylForm r(phi.dim(), phi.weight_cap(), phi.diag_cap());
    for (const auto& [k, c] : phi.terms()) {
        if (k.y.degree() || k.yb.degree() || k.form_degree())
            throw std::invalid_argument("dbar_potential: not a fiber-free potential");
        for (int j = 0; j < phi.dim(); ++j) {
            JetPoly dc = c.d_zb(j);
            WeylKey nk = k;
            nk.dzb = 1u << j;
            r.add_term(nk, dc);
        }
    }
    return r;
}

}  // namespace

KapranovTensors kapranov_tensors(const KahlerData& g, int n_max) {
    if (n_max < 2) throw std::invalid_argument("kapranov_tensors: n_max < 2");
    int n = g.n;
    KapranovTensors kt;
    kt.n_max = n_max;
    kt.tensors.assign(static_cast<size_t>(n_max) + 1, {});

    // degree 2: half the curvature, summed over ordered index pairs
    std::vector<WeylForm> t2(static_cast<size_t>(n), WeylForm(n));
    for (int j = 0; j < n; ++j) {
        WeylForm w(n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l)
                for (int k = 0; k < n; ++k) {
                    const JetPoly& R = g.curvature[static_cast<size_t>(j)][static_cast<size_t>(i)]
                                                  [static_cast<size_t>(l)][static_cast<size_t>(k)];
                    if (R.is_zero() && R.jet_order() >= kJetUnbounded) continue;
                    WeylKey key;
                    key.h = HalfInt(0);
                    key.y = MultiIndex::unit(n, i) + MultiIndex::unit(n, k);
                    key.yb = MultiIndex(n);
                    key.dzb = 1u << l;
                    w.add_term(key, R.scaled(Scalar::of(1, 2)));
                }
        t2[static_cast<size_t>(j)] = w;
    }
    kt.tensors[2] = t2;

    for (int deg = 3; deg <= n_max; ++deg) {
        const auto& prev = kt.tensors[static_cast<size_t>(deg - 1)];
        std::vector<WeylForm> cur(static_cast<size_t>(n), WeylForm(n));
        for (int j = 0; j < n; ++j) {
            // covariant (1,0)-derivative including the raised index
            WeylForm grad = nabla(prev[static_cast<size_t>(j)], g, Part::Holo);
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i) {
                    const JetPoly& gam = g.christoffel[static_cast<size_t>(j)]
                                                      [static_cast<size_t>(i)][static_cast<size_t>(k)];
                    if (gam.is_zero() && gam.jet_order() >= kJetUnbounded) continue;
                    accumulate(grad,
                               left_wedge_dz(i, prev[static_cast<size_t>(k)].scaled_jet(gam)));
                }
            cur[static_cast<size_t>(j)] = delta10_inv(grad);
        }
        kt.tensors[static_cast<size_t>(deg)] = cur;
    }
    return kt;
}

WeylForm kapranov_action(const KapranovTensors& t, const WeylForm& a) {
    int n = a.dim();
    WeylForm r(n, a.weight_cap(), a.diag_cap());
    r.set_wplus(a.wplus());
    for (int deg = 2; deg <= t.n_max; ++deg)
        for (int j = 0; j < n; ++j) {
            const WeylForm& T = t.at(deg)[static_cast<size_t>(j)];
            if (T.terms().empty()) continue;
            WeylForm da = a.d_y(j);
            if (da.terms().empty()) continue;
            accumulate(r, T.mul(da));
        }
    return r;
}

WeylForm kapranov_action_bar(const KapranovTensors& t, const WeylForm& a) {
    int n = a.dim();
    WeylForm r(n, a.weight_cap(), a.diag_cap());
    r.set_wplus(a.wplus());
    for (int deg = 2; deg <= t.n_max; ++deg)
        for (int j = 0; j < n; ++j) {
            const WeylForm& T = t.at(deg)[static_cast<size_t>(j)];
            if (T.terms().empty()) continue;
            WeylForm da = a.d_yb(j);
            if (da.terms().empty()) continue;
            accumulate(r, T.conjugated().mul(da));
        }
    return r;
}

ConnectionData build_connection(const KahlerData& g, const WeylForm& alpha_potential,
                                int weight_cap) {
    int n = g.n;
    for (const auto& [k, c] : alpha_potential.terms())
        if (!c.is_zero() && k.h.twice_value < 2)
            throw std::invalid_argument("build_connection: alpha has an hbar^0 part");

    ConnectionData c;
    c.geometry = g;
    c.weight_cap = weight_cap;
    c.alpha_potential = alpha_potential;

    // I_n has weight n+1, so tensors up to weight_cap - 1 suffice.
    c.kapranov = kapranov_tensors(g, std::max(2, weight_cap - 1));

    // I_n = -2i R^j_{i1..in, lbar} omega_{j kbar} dzbar^l y^{i1..in} ybar^k
    WeylForm I(n, weight_cap);
    for (int deg = 2; deg <= c.kapranov.n_max; ++deg)
        for (int j = 0; j < n; ++j) {
            const WeylForm& T = c.kapranov.at(deg)[static_cast<size_t>(j)];
            if (T.terms().empty()) continue;
            for (int k = 0; k < n; ++k) {
                const JetPoly& om = g.omega_lower[static_cast<size_t>(j)][static_cast<size_t>(k)];
                accumulate(I, T.scaled_jet(om)
                                  .scaled(kMinusTwoI)
                                  .fiber_multiplied(MultiIndex(n), MultiIndex::unit(n, k)));
            }
        }
    c.I_sum = I;

    // J_alpha = sum_{k>=1} (delta10^-1 nabla^{1,0})^k (dbar of the potential)
    WeylForm J(n, weight_cap);
    if (!alpha_potential.is_zero()) {
        WeylForm cur = dbar_potential(alpha_potential, g).truncated_weight(weight_cap);
        for (int k = 1; k <= weight_cap + 1; ++k) {
            cur = delta10_inv(nabla(cur, g, Part::Holo));
            if (cur.terms().empty()) break;
            accumulate(J, cur);
        }
    }
    c.J_alpha = J;
    c.I_alpha = c.I_sum + c.J_alpha;

    // quadratic part 2i omega_{i jbar} (dz^i ybar^j - dzbar^j y^i)
    WeylForm quad(n, weight_cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const JetPoly& om = g.omega_lower[static_cast<size_t>(i)][static_cast<size_t>(j)];
            WeylKey k1;
            k1.h = HalfInt(0);
            k1.y = MultiIndex(n);
            k1.yb = MultiIndex::unit(n, j);
            k1.dz = 1u << i;
            quad.add_term(k1, om.scaled(kTwoI));
            WeylKey k2;
            k2.h = HalfInt(0);
            k2.y = MultiIndex::unit(n, i);
            k2.yb = MultiIndex(n);
            k2.dzb = 1u << j;
            quad.add_term(k2, om.scaled(kMinusTwoI));
        }
    c.gamma_alpha = quad + c.I_alpha;
    c.gamma_10 = c.gamma_alpha.form_component(1, 0);
    c.gamma_01 = c.gamma_alpha.form_component(0, 1);

    // R_nabla = -2i R^m_{i jbar k} omega_{m lbar} dz^i dzbar^j y^k ybar^l
    WeylForm Rn(n, weight_cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    JetPoly coeff(n, g.jet_order - 4);
                    for (int m = 0; m < n; ++m)
                        coeff = coeff + g.curvature[static_cast<size_t>(m)][static_cast<size_t>(i)]
                                                   [static_cast<size_t>(j)][static_cast<size_t>(k)] *
                                            g.omega_lower[static_cast<size_t>(m)][static_cast<size_t>(l)];
                    WeylKey key;
                    key.h = HalfInt(0);
                    key.y = MultiIndex::unit(n, k);
                    key.yb = MultiIndex::unit(n, l);
                    key.dz = 1u << i;
                    key.dzb = 1u << j;
                    Rn.add_term(key, coeff.scaled(kMinusTwoI));
                }
    c.R_nabla = Rn;

    // omega_hbar = 2i omega - alpha as a central two-form
    WeylForm oh(n, weight_cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            WeylKey key;
            key.h = HalfInt(0);
            key.y = MultiIndex(n);
            key.yb = MultiIndex(n);
            key.dz = 1u << i;
            key.dzb = 1u << j;
            oh.add_term(key, g.omega_lower[static_cast<size_t>(i)][static_cast<size_t>(j)].scaled(kTwoI));
        }
    for (const auto& [k, coeff] : alpha_potential.terms()) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                WeylKey key;
                key.h = k.h;
                key.y = MultiIndex(n);
                key.yb = MultiIndex(n);
                key.dz = 1u << i;
                key.dzb = 1u << j;
                oh.add_term(key, -coeff.d_z(i).d_zb(j));
            }
    }
    c.omega_hbar = oh;
    return c;
}

WeylForm fedosov_residual(const ConnectionData& c) {
    const InvMetric& om = c.geometry.inv_metric();
    WeylForm grad = nabla(c.gamma_alpha, c.geometry);
    WeylForm quad = wick_star(c.gamma_alpha, c.gamma_alpha, om).hbar_shifted(-2);
    return grad + quad + c.R_nabla - c.omega_hbar;
}

WeylForm apply_connection(const WeylForm& a, const ConnectionData& c, Conn which, Part part) {
    const KahlerData& g = c.geometry;
    const InvMetric& om = g.inv_metric();
    switch (which) {
        case Conn::Jet: {
            WeylForm r = nabla(a, c.geometry, part);
            if (part != Part::Anti) r = r - delta10(a);
            if (part != Part::Holo) r = r + kapranov_action(c.kapranov, a);
            return r;
        }
        case Conn::Classical: {
            WeylForm r = nabla(a, c.geometry, part);
            if (part != Part::Anti) {
                r = r - delta10(a);
                r = r + kapranov_action_bar(c.kapranov, a);
            }
            if (part != Part::Holo) {
                r = r - delta01(a);
                r = r + kapranov_action(c.kapranov, a);
            }
            return r;
        }
        case Conn::Fedosov: {
            WeylForm r = nabla(a, c.geometry, part);
            if (part != Part::Anti)
                r = r + wick_commutator(c.gamma_10, a, om).hbar_shifted(-2);
            if (part != Part::Holo)
                r = r + wick_commutator(c.gamma_01, a, om).hbar_shifted(-2);
            return r;
        }
    }
    throw std::logic_error("apply_connection: bad selector");
}

namespace {

WeylForm flat_section_iterate(const WeylForm& f, const ConnectionData& c,
                              const std::function<WeylForm(const WeylForm&)>& correction,
                              const char* what) {
    if (f.max_form_degree() != 0)
        throw std::invalid_argument(std::string(what) + ": symbol has nonzero form degree");
    WeylForm x = f.truncated_weight(c.weight_cap);
    for (int it = 0; it <= c.weight_cap + 2; ++it) {
        WeylForm next = (f + delta_inv(correction(x))).truncated_weight(c.weight_cap);
        if (next.same_rep(x) && next.weight_cap() == x.weight_cap()) return next;
        x = next;
    }
    throw std::runtime_error(std::string(what) +
                             ": fixed point not reached within the weight cap");
}

}  // namespace

WeylForm quantum_flat_section(const WeylForm& f, const ConnectionData& c) {
    const InvMetric& om = c.geometry.inv_metric();
    return flat_section_iterate(
        f, c,
        [&](const WeylForm& x) {
            return nabla(x, c.geometry) +
                   wick_commutator(c.I_alpha, x, om).hbar_shifted(-2);
        },
        "quantum_flat_section");
}

WeylForm classical_flat_section(const WeylForm& f, const ConnectionData& c) {
    return flat_section_iterate(
        f, c,
        [&](const WeylForm& x) {
            return nabla(x, c.geometry) + kapranov_action(c.kapranov, x) +
                   kapranov_action_bar(c.kapranov, x);
        },
        "classical_flat_section");
}

WeylForm star_product(const WeylForm& f, const WeylForm& g, const ConnectionData& c) {
    WeylForm of = quantum_flat_section(f, c);
    WeylForm og = quantum_flat_section(g, c);
    return wick_star(of, og, c.geometry.inv_metric()).symbol();
}

PhiSections phi_sections(const ConnectionData& c, const PotentialJet& rho) {
    int n = c.geometry.n;
    // potential of the form: d dbar (i/2 rho) reproduces omega exactly
    WeylForm phi_w = WeylForm::from_jet(n, rho.rho.scaled(Scalar(Rational(0), Rational(1, 2))));
    WeylForm J_w = classical_flat_section(phi_w, c);
    PhiSections out;
    out.phi_omega = J_w.mixed_part();
    if (!c.alpha_potential.is_zero()) {
        WeylForm J_a = classical_flat_section(c.alpha_potential, c);
        out.phi_alpha = J_a.mixed_part();
    } else {
        out.phi_alpha = WeylForm(n, c.weight_cap);
    }
    // 2i(-omega_{i jbar} y^i ybar^j + phi_omega) - phi_alpha
    WeylForm quad(n, c.weight_cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            WeylKey k;
            k.h = HalfInt(0);
            k.y = MultiIndex::unit(n, i);
            k.yb = MultiIndex::unit(n, j);
            quad.add_term(k, c.geometry.omega_lower[static_cast<size_t>(i)][static_cast<size_t>(j)]
                                 .scaled(kMinusTwoI));
        }
    WeylForm phi = quad + out.phi_omega.scaled(kTwoI) - out.phi_alpha;
    // The weight-2 block cancels identically: the (1,1)-component of the
    // classical section of a potential is the form itself, at every base
    // degree. Enforce that and drop the leftover low-weight markers so the
    // exponential machinery sees the true filtration.
    WeylForm clean(n, phi.weight_cap(), phi.diag_cap());
    for (const auto& [k, cc] : phi.terms()) {
        if (k.weight() < 3) {
            if (!cc.is_zero())
                throw std::runtime_error("phi_sections: interaction has weight < 3 content");
            continue;
        }
        clean.add_term(k, cc);
    }
    out.phi = clean;
    return out;
}

}  // namespace dq

#include "dq/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace dq {

namespace {

std::vector<std::vector<JetPoly>> matrix_inverse(const std::vector<std::vector<JetPoly>>& m,
                                                 int n, int jet_order) {
    // Gauss-Jordan over the jet ring; pivots must have nonzero constant term.
    std::vector<std::vector<JetPoly>> a = m, inv(static_cast<size_t>(n));
    int dim = m[0][0].dim();
    for (int i = 0; i < n; ++i) {
        inv[static_cast<size_t>(i)].assign(static_cast<size_t>(n), JetPoly(dim, jet_order));
        inv[static_cast<size_t>(i)][static_cast<size_t>(i)] =
            JetPoly::constant(dim, Scalar(1), jet_order);
    }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int rrow = col; rrow < n; ++rrow)
            if (!a[static_cast<size_t>(rrow)][static_cast<size_t>(col)].at_basepoint().is_zero()) {
                piv = rrow;
                break;
            }
        if (piv < 0) throw std::domain_error("matrix_inverse: singular at basepoint");
        std::swap(a[static_cast<size_t>(piv)], a[static_cast<size_t>(col)]);
        std::swap(inv[static_cast<size_t>(piv)], inv[static_cast<size_t>(col)]);
        JetPoly pinv = a[static_cast<size_t>(col)][static_cast<size_t>(col)].inverted();
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(col)][static_cast<size_t>(j)] =
                a[static_cast<size_t>(col)][static_cast<size_t>(j)] * pinv;
            inv[static_cast<size_t>(col)][static_cast<size_t>(j)] =
                inv[static_cast<size_t>(col)][static_cast<size_t>(j)] * pinv;
        }
        for (int rrow = 0; rrow < n; ++rrow) {
            if (rrow == col) continue;
            JetPoly f = a[static_cast<size_t>(rrow)][static_cast<size_t>(col)];
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(rrow)][static_cast<size_t>(j)] =
                    a[static_cast<size_t>(rrow)][static_cast<size_t>(j)] -
                    f * a[static_cast<size_t>(col)][static_cast<size_t>(j)];
                inv[static_cast<size_t>(rrow)][static_cast<size_t>(j)] =
                    inv[static_cast<size_t>(rrow)][static_cast<size_t>(j)] -
                    f * inv[static_cast<size_t>(col)][static_cast<size_t>(j)];
            }
        }
    }
    return inv;
}

JetPoly determinant(const std::vector<std::vector<JetPoly>>& m, int n, int dim, int jet_order) {
    if (n == 1) return m[0][0];
    JetPoly det(dim, jet_order);
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<JetPoly>> minor_m;
        for (int r = 1; r < n; ++r) {
            std::vector<JetPoly> row;
            for (int c = 0; c < n; ++c)
                if (c != i) row.push_back(m[static_cast<size_t>(r)][static_cast<size_t>(c)]);
            minor_m.push_back(std::move(row));
        }
        JetPoly term = m[0][static_cast<size_t>(i)] * determinant(minor_m, n - 1, dim, jet_order);
        det = (i % 2 == 0) ? det + term : det - term;
    }
    return det;
}

void accumulate(WeylForm& into, const WeylForm& t) {
    for (const auto& [k, c] : t.terms()) into.add_term(k, c);
}

}  // namespace

void PotentialJet::validate() const {
    if (!(rho.conjugated() == rho))
        throw std::invalid_argument("PotentialJet: potential is not real");
    if (rho.dim() != n) throw std::invalid_argument("PotentialJet: dimension mismatch");
}

bool KahlerData::is_flat() const {
    for (const auto& a : curvature)
        for (const auto& b : a)
            for (const auto& c : b)
                for (const auto& d : c)
                    if (!d.is_zero()) return false;
    return true;
}

KahlerData kahler_from_potential(const PotentialJet& p) {
    p.validate();
    int n = p.n;
    KahlerData g;
    g.n = n;
    g.jet_order = p.jet_order;

    g.metric.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.metric[static_cast<size_t>(i)].push_back(p.rho.d_z(i).d_zb(j));

    {
        // exact determinant of the basepoint block
        std::vector<std::vector<Scalar>> m0(static_cast<size_t>(n),
                                            std::vector<Scalar>(static_cast<size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m0[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    g.metric[static_cast<size_t>(i)][static_cast<size_t>(j)].at_basepoint();
        Scalar det(1);
        for (int c = 0; c < n; ++c) {
            int piv = -1;
            for (int r = c; r < n; ++r)
                if (!m0[static_cast<size_t>(r)][static_cast<size_t>(c)].is_zero()) { piv = r; break; }
            if (piv < 0) throw std::domain_error("kahler_from_potential: singular metric at basepoint");
            if (piv != c) std::swap(m0[static_cast<size_t>(piv)], m0[static_cast<size_t>(c)]);
            det *= m0[static_cast<size_t>(c)][static_cast<size_t>(c)];
            for (int r = c + 1; r < n; ++r) {
                Scalar f = m0[static_cast<size_t>(r)][static_cast<size_t>(c)] /
                           m0[static_cast<size_t>(c)][static_cast<size_t>(c)];
                for (int cc = c; cc < n; ++cc)
                    m0[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                        f * m0[static_cast<size_t>(c)][static_cast<size_t>(cc)];
            }
        }
        if (det.is_zero())
            throw std::domain_error("kahler_from_potential: singular metric at basepoint");
    }

    const Scalar half_i(Rational(0), Rational(1, 2));  // 1/(-2 sqrt(-1))
    const Scalar two_i(Rational(0), Rational(2));
    g.omega_lower.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.omega_lower[static_cast<size_t>(i)].push_back(
                g.metric[static_cast<size_t>(i)][static_cast<size_t>(j)].scaled(half_i));

    // h^{lbar i}: sum_l up[i][l] h[k][l] = delta_ik
    std::vector<std::vector<JetPoly>> mt(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            mt[static_cast<size_t>(i)].push_back(
                g.metric[static_cast<size_t>(j)][static_cast<size_t>(i)]);
    auto up = matrix_inverse(mt, n, p.jet_order - 2);
    g.omega_upper.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.omega_upper[static_cast<size_t>(i)].push_back(
                up[static_cast<size_t>(i)][static_cast<size_t>(j)].scaled(two_i));

    g.christoffel.assign(static_cast<size_t>(n), {});
    g.christoffel_bar.assign(static_cast<size_t>(n), {});
    for (int m = 0; m < n; ++m) {
        g.christoffel[static_cast<size_t>(m)].assign(static_cast<size_t>(n), {});
        g.christoffel_bar[static_cast<size_t>(m)].assign(static_cast<size_t>(n), {});
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                JetPoly s(n, p.jet_order - 3);
                for (int l = 0; l < n; ++l)
                    s = s + up[static_cast<size_t>(m)][static_cast<size_t>(l)] *
                                g.metric[static_cast<size_t>(k)][static_cast<size_t>(l)].d_z(i);
                g.christoffel[static_cast<size_t>(m)][static_cast<size_t>(i)].push_back(s);
                g.christoffel_bar[static_cast<size_t>(m)][static_cast<size_t>(i)].push_back(
                    s.conjugated());
            }
        }
    }

    g.curvature.assign(static_cast<size_t>(n), {});
    for (int m = 0; m < n; ++m) {
        g.curvature[static_cast<size_t>(m)].assign(static_cast<size_t>(n), {});
        for (int i = 0; i < n; ++i) {
            g.curvature[static_cast<size_t>(m)][static_cast<size_t>(i)].assign(
                static_cast<size_t>(n), {});
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    g.curvature[static_cast<size_t>(m)][static_cast<size_t>(i)][static_cast<size_t>(j)]
                        .push_back(g.christoffel[static_cast<size_t>(m)][static_cast<size_t>(i)]
                                                [static_cast<size_t>(k)]
                                       .d_zb(j));
        }
    }
    g.ricci.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            JetPoly s(n, p.jet_order - 4);
            for (int k = 0; k < n; ++k)
                s = s + g.curvature[static_cast<size_t>(k)][static_cast<size_t>(i)]
                                   [static_cast<size_t>(j)][static_cast<size_t>(k)];
            g.ricci[static_cast<size_t>(i)].push_back(s);
        }

    g.h_det = determinant(g.metric, n, n, p.jet_order - 2);
    Scalar h0 = g.h_det.at_basepoint();
    // log det h up to its constant, which never enters any identity:
    // only derivatives of log_h are used downstream.
    JetPoly v = (g.h_det - JetPoly::constant(n, h0, g.h_det.jet_order())).scaled(h0.inverse());
    g.log_h = jet_log1p(v);
    return g;
}

PotentialJet builtin_geometry(const std::string& name, int n, int jet_order) {
    JetPoly u(n, name == "flat" ? kJetUnbounded : jet_order);
    for (int i = 0; i < n; ++i)
        u.add_term(JetKey{MultiIndex::unit(n, i), MultiIndex::unit(n, i)}, Scalar(1));
    PotentialJet p;
    p.n = n;
    p.jet_order = jet_order;
    if (name == "flat") {
        p.rho = u;
    } else if (name == "fs") {
        p.rho = jet_log1p(u);
    } else if (name == "hyp") {
        p.rho = -jet_log1p(-u);
    } else {
        throw std::invalid_argument("builtin_geometry: unknown name '" + name + "'");
    }
    return p;
}

bool is_k_normal(const PotentialJet& p) {
    for (const auto& [k, c] : p.rho.coeffs()) {
        int a = k.zi.degree(), b = k.zbi.degree();
        if (a + b == 0) continue;
        if (a == 0 || b == 0) return false;  // pure term
        if (a == 1 && b == 1) continue;      // leading block, checked below
        if (a == 1 || b == 1) return false;  // forbidden (m,1)/(1,m) tail
    }
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j) {
            auto it =
                p.rho.coeffs().find(JetKey{MultiIndex::unit(p.n, i), MultiIndex::unit(p.n, j)});
            Scalar c = it == p.rho.coeffs().end() ? Scalar(0) : it->second;
            if (c != (i == j ? Scalar(1) : Scalar(0))) return false;
        }
    return true;
}

namespace {

bool rational_sqrt(const Rational& r, Rational& out) {
    if (r < 0) return false;
    mpz_class num = r.get_num(), den = r.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
        return false;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    out = Rational(sn, sd);
    out.canonicalize();
    return true;
}

JetPoly drop_pure_terms(const JetPoly& rho) {
    JetPoly r(rho.dim(), rho.jet_order());
    for (const auto& [k, c] : rho.coeffs()) {
        int a = k.zi.degree(), b = k.zbi.degree();
        if (a + b >= 1 && (a == 0 || b == 0)) continue;
        r.add_term(k, c);
    }
    return r;
}

std::vector<JetPoly> identity_map(int n, int jo) {
    std::vector<JetPoly> id;
    for (int i = 0; i < n; ++i)
        id.push_back(JetPoly::monomial(n, MultiIndex::unit(n, i), MultiIndex(n), Scalar(1), jo));
    return id;
}

std::vector<JetPoly> compose_maps(const std::vector<JetPoly>& outer,
                                  const std::vector<JetPoly>& inner) {
    std::vector<JetPoly> r;
    for (const auto& f : outer) r.push_back(f.composed(inner));
    return r;
}

Scalar quad_coeff(const JetPoly& rho, int n, int i, int j) {
    auto it = rho.coeffs().find(JetKey{MultiIndex::unit(n, i), MultiIndex::unit(n, j)});
    return it == rho.coeffs().end() ? Scalar(0) : it->second;
}

}  // namespace

NormalizationResult k_normalize(const PotentialJet& p) {
    p.validate();
    int n = p.n;
    int jo = p.jet_order;

    NormalizationResult res;
    res.scale_squares.assign(static_cast<size_t>(n), Rational(1));

    std::vector<JetPoly> lin = identity_map(n, jo);  // pre-rescale rational stage
    JetPoly rho = drop_pure_terms(p.rho);

    // (ii.a) clear off-diagonal Hermitian block entries with elementary
    // substitutions z_c -> z_c - f z_r (exact), re-reading the block each time.
    for (int c = 0; c < n; ++c) {
        Scalar piv = quad_coeff(rho, n, c, c);
        if (piv.is_zero() || !piv.is_real() || piv.re <= 0)
            throw std::domain_error("k_normalize: metric not positive at basepoint");
        for (int r = c + 1; r < n; ++r) {
            Scalar f = quad_coeff(rho, n, r, c) / piv;
            if (f.is_zero()) continue;
            std::vector<JetPoly> step = identity_map(n, jo);
            step[static_cast<size_t>(c)].add_term(
                JetKey{MultiIndex::unit(n, r), MultiIndex(n)}, -f);
            rho = drop_pure_terms(rho.composed(step));
            lin = compose_maps(lin, step);
        }
    }

    // (ii.b) rescale each axis so the diagonal becomes 1. The scale is
    // 1/sqrt(d_i); a coefficient survives exactly iff its combined scale
    // power is rational, which is checked per coefficient.
    bool scales_trivial = true;
    std::vector<Rational> sq(static_cast<size_t>(n), Rational(1));
    std::vector<bool> is_sq(static_cast<size_t>(n), true);
    for (int i = 0; i < n; ++i) {
        Scalar d = quad_coeff(rho, n, i, i);
        if (!d.is_real() || d.re <= 0)
            throw std::domain_error("k_normalize: metric not positive at basepoint");
        res.scale_squares[static_cast<size_t>(i)] = d.re;
        if (d.re != 1) scales_trivial = false;
        is_sq[static_cast<size_t>(i)] = rational_sqrt(d.re, sq[static_cast<size_t>(i)]);
    }
    if (!scales_trivial) {
        JetPoly scaled(n, jo);
        for (const auto& [k, c] : rho.coeffs()) {
            Rational f(1);
            bool ok = true;
            for (int j = 0; j < n && ok; ++j) {
                int e = k.zi[j] + k.zbi[j];
                const Rational& d = res.scale_squares[static_cast<size_t>(j)];
                if (e % 2 == 0) {
                    for (int t = 0; t < e / 2; ++t) f /= d;
                } else if (is_sq[static_cast<size_t>(j)]) {
                    for (int t = 0; t < e; ++t) f /= sq[static_cast<size_t>(j)];
                } else {
                    ok = false;
                }
            }
            if (!ok)
                throw std::domain_error(
                    "k_normalize: axis rescale requires an irrational square root in a "
                    "surviving coefficient; not representable in exact arithmetic");
            scaled.add_term(k, c * Scalar(f));
        }
        rho = scaled;
    }

    // (iii) kill (m,1) and (1,m) blocks degree by degree with holomorphic
    // changes z -> z + Q_m(z); realness restores the conjugate block.
    std::vector<JetPoly> post = identity_map(n, jo);  // post-rescale rational stage
    for (int m = 2; m <= std::max(0, jo - 1); ++m) {
        std::vector<JetPoly> Q(static_cast<size_t>(n), JetPoly(n, jo));
        bool any = false;
        for (const auto& [k, c] : rho.coeffs()) {
            if (k.zi.degree() == m && k.zbi.degree() == 1) {
                for (int j = 0; j < n; ++j)
                    if (k.zbi[j] == 1) {
                        Q[static_cast<size_t>(j)].add_term(JetKey{k.zi, MultiIndex(n)}, -c);
                        any = true;
                    }
            }
        }
        if (!any) continue;
        std::vector<JetPoly> step = identity_map(n, jo);
        for (int i = 0; i < n; ++i)
            step[static_cast<size_t>(i)] = step[static_cast<size_t>(i)] + Q[static_cast<size_t>(i)];
        rho = drop_pure_terms(rho.composed(step));
        post = compose_maps(post, step);
    }

    res.normalized = PotentialJet{rho, n, jo};

    // Compose the recorded change when it stays in the exact field; otherwise
    // the stages remain available through scale_squares and the caller knows
    // the rescale sits between `lin` and `post`.
    bool composable = true;
    for (int i = 0; i < n; ++i) composable = composable && is_sq[static_cast<size_t>(i)];
    if (composable) {
        std::vector<JetPoly> mid = identity_map(n, jo);
        for (int i = 0; i < n; ++i)
            mid[static_cast<size_t>(i)] =
                mid[static_cast<size_t>(i)].scaled(Scalar(Rational(1) / sq[static_cast<size_t>(i)]));
        std::vector<JetPoly> total = compose_maps(compose_maps(lin, mid), post);
        res.change = total;
        // inverse by iteration: G <- G - (G(F) - id)
        std::vector<JetPoly> G = identity_map(n, jo);
        for (int it = 0; it < jo + 2; ++it) {
            bool done = true;
            std::vector<JetPoly> GF = compose_maps(G, total);
            for (int i = 0; i < n; ++i) {
                JetPoly err = GF[static_cast<size_t>(i)] -
                              JetPoly::monomial(n, MultiIndex::unit(n, i), MultiIndex(n),
                                                Scalar(1), jo);
                if (!err.is_zero()) done = false;
                G[static_cast<size_t>(i)] = G[static_cast<size_t>(i)] - err;
            }
            if (done) break;
        }
        res.inverse_change = G;
    }
    return res;
}


WeylForm nabla(const WeylForm& a, const KahlerData& g, Part part) {
    int n = a.dim();
    if (n != g.n) throw std::invalid_argument("nabla: dimension mismatch");
    int dcap = a.diag_cap() >= kCapUnbounded ? kCapUnbounded : a.diag_cap() - 1;
    WeylForm r(n, a.weight_cap(), dcap);
    r.set_wplus(a.wplus());
    for (const auto& [k, c] : a.terms()) {
        if (part != Part::Anti) {
            for (int i = 0; i < n; ++i) {
                JetPoly dc = c.d_z(i);
                if (dc.is_zero() && dc.jet_order() >= kJetUnbounded) continue;
                accumulate(r, left_wedge_dz(i, WeylForm::monomial(n, k, dc)));
            }
            for (int kk = 0; kk < n; ++kk) {
                if (k.y[kk] == 0) continue;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const JetPoly& gam = g.christoffel[static_cast<size_t>(kk)]
                                                          [static_cast<size_t>(i)]
                                                          [static_cast<size_t>(j)];
                        if (gam.is_zero() && gam.jet_order() >= kJetUnbounded) continue;
                        WeylKey nk = k;
                        nk.y[kk] -= 1;
                        nk.y[j] += 1;
                        JetPoly nc = (c * gam).scaled(Scalar(-k.y[kk]));
                        accumulate(r, left_wedge_dz(i, WeylForm::monomial(n, nk, nc)));
                    }
            }
        }
        if (part != Part::Holo) {
            for (int i = 0; i < n; ++i) {
                JetPoly dc = c.d_zb(i);
                if (dc.is_zero() && dc.jet_order() >= kJetUnbounded) continue;
                accumulate(r, left_wedge_dzb(i, WeylForm::monomial(n, k, dc)));
            }
            for (int kk = 0; kk < n; ++kk) {
                if (k.yb[kk] == 0) continue;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const JetPoly& gam = g.christoffel_bar[static_cast<size_t>(kk)]
                                                              [static_cast<size_t>(i)]
                                                              [static_cast<size_t>(j)];
                        if (gam.is_zero() && gam.jet_order() >= kJetUnbounded) continue;
                        WeylKey nk = k;
                        nk.yb[kk] -= 1;
                        nk.yb[j] += 1;
                        JetPoly nc = (c * gam).scaled(Scalar(-k.yb[kk]));
                        accumulate(r, left_wedge_dzb(i, WeylForm::monomial(n, nk, nc)));
                    }
            }
        }
    }
    return r;
}

WeylForm nabla_tilde_10(const WeylForm& a, const KahlerData& g) {
    return delta10_inv(nabla(a, g, Part::Holo));
}

WeylForm nabla_tilde_01(const WeylForm& a, const KahlerData& g) {
    return delta01_inv(nabla(a, g, Part::Anti));
}

}  // namespace dq

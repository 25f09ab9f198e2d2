#include "dq/wick.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace dq {

InvMetric flat_inv_metric(int n) {
    InvMetric m(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        m[static_cast<size_t>(i)].assign(static_cast<size_t>(n), JetPoly(n, kJetUnbounded));
        m[static_cast<size_t>(i)][static_cast<size_t>(i)] =
            JetPoly::constant(n, Scalar(Rational(0), Rational(2)));
    }
    return m;
}

namespace {

struct OmegaPowers {
    const InvMetric* omega;
    int n;
    mutable std::vector<std::vector<std::vector<JetPoly>>> cache;

    explicit OmegaPowers(const InvMetric& om)
        : omega(&om), n(static_cast<int>(om.size())),
          cache(om.size(), std::vector<std::vector<JetPoly>>(om.size())) {}

    const JetPoly& pow(int i, int j, int k) const {
        auto& v = cache[static_cast<size_t>(i)][static_cast<size_t>(j)];
        while (static_cast<int>(v.size()) <= k) {
            if (v.empty())
                v.push_back(JetPoly::constant(n, Scalar(1)));
            else
                v.push_back(v.back() * (*omega)[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        }
        return v[static_cast<size_t>(k)];
    }
};

// Enumerate contraction-count matrices M with row sums <= A and column sums
// <= B, invoking f(M, |M|) for each (including M = 0).
void enumerate_matrices(const MultiIndex& A, const MultiIndex& B,
                        std::vector<std::vector<int>>& M, int cell, int total,
                        std::vector<int>& rowrem, std::vector<int>& colrem,
                        const std::function<void(const std::vector<std::vector<int>>&, int)>& f) {
    int n = A.dim();
    if (cell == n * n) {
        f(M, total);
        return;
    }
    int i = cell / n, j = cell % n;
    int lim = std::min(rowrem[static_cast<size_t>(i)], colrem[static_cast<size_t>(j)]);
    for (int v = 0; v <= lim; ++v) {
        M[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        rowrem[static_cast<size_t>(i)] -= v;
        colrem[static_cast<size_t>(j)] -= v;
        enumerate_matrices(A, B, M, cell + 1, total + v, rowrem, colrem, f);
        rowrem[static_cast<size_t>(i)] += v;
        colrem[static_cast<size_t>(j)] += v;
    }
    M[static_cast<size_t>(i)][static_cast<size_t>(j)] = 0;
}

}  // namespace

WeylForm wick_star(const WeylForm& a, const WeylForm& b, const InvMetric& omega_up) {
    if (a.dim() != b.dim()) throw std::invalid_argument("wick_star: dimension mismatch");
    if (static_cast<int>(omega_up.size()) != a.dim())
        throw std::invalid_argument("wick_star: inverse metric dimension mismatch");
    int n = a.dim();
    int ma = a.min_total_degree(), mb = b.min_total_degree();
    int cap = kCapUnbounded;
    if (a.weight_cap() < kCapUnbounded) cap = std::min(cap, a.weight_cap() + mb);
    if (b.weight_cap() < kCapUnbounded) cap = std::min(cap, b.weight_cap() + ma);
    int da = a.min_diag(), db = b.min_diag();
    int dcap = kCapUnbounded;
    if (a.diag_cap() < kCapUnbounded) dcap = std::min(dcap, a.diag_cap() + db);
    if (b.diag_cap() < kCapUnbounded) dcap = std::min(dcap, b.diag_cap() + da);
    WeylForm r(n, cap, dcap);
    r.set_wplus(a.wplus() || b.wplus());
    OmegaPowers pows(omega_up);
    const Scalar half_i(Rational(0), Rational(1, 2));

    for (const auto& [ka, ca] : a.terms()) {
        int wa = ka.weight();
        for (const auto& [kb, cb] : b.terms()) {
            if (wa + kb.weight() > cap) continue;
            int s2 = wedge_sign(ka.dz, kb.dz);
            int s3 = wedge_sign(ka.dzb, kb.dzb);
            if (s2 == 0 || s3 == 0) continue;
            int sign = s2 * s3;
            if ((ka.dzb_degree() * kb.dz_degree()) % 2 == 1) sign = -sign;

            const MultiIndex& A = ka.y;
            const MultiIndex& B = kb.yb;
            std::vector<std::vector<int>> M(static_cast<size_t>(n),
                                            std::vector<int>(static_cast<size_t>(n), 0));
            std::vector<int> rowrem(A.e.begin(), A.e.end()), colrem(B.e.begin(), B.e.end());
            enumerate_matrices(A, B, M, 0, 0, rowrem, colrem,
                               [&](const std::vector<std::vector<int>>& m, int k) {
                Scalar coef(sign);
                // (sqrt(-1)/2)^k, factorials, falling factorials
                for (int t = 0; t < k; ++t) coef *= half_i;
                MultiIndex ya = A, ybb = B;
                mpz_class num = 1, den = 1;
                for (int i = 0; i < n; ++i) {
                    int ri = 0;
                    for (int j = 0; j < n; ++j) {
                        int c = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
                        ri += c;
                        for (int t = 2; t <= c; ++t) den *= t;
                    }
                    num *= falling(A[i], ri);
                    ya[i] -= ri;
                }
                for (int j = 0; j < n; ++j) {
                    int cj = 0;
                    for (int i = 0; i < n; ++i) cj += m[static_cast<size_t>(i)][static_cast<size_t>(j)];
                    num *= falling(B[j], cj);
                    ybb[j] -= cj;
                }
                Rational q(num, den);
                q.canonicalize();
                coef *= Scalar(q);
                if (coef.is_zero()) return;

                WeylKey nk;
                nk.h = HalfInt(ka.h.twice_value + kb.h.twice_value + 2 * k);
                nk.y = ya + kb.y;
                nk.yb = ka.yb + ybb;
                nk.dz = ka.dz | kb.dz;
                nk.dzb = ka.dzb | kb.dzb;
                if (nk.weight() > cap) return;

                JetPoly c = ca.scaled(coef) * cb;
                for (int i = 0; i < n && !c.is_zero(); ++i)
                    for (int j = 0; j < n; ++j) {
                        int e = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
                        if (e > 0) c = c * pows.pow(i, j, e);
                    }
                r.add_term(nk, c);
            });
        }
    }
    return r;
}

WeylForm wick_commutator(const WeylForm& a, const WeylForm& b, const InvMetric& omega_up) {
    int n = a.dim();
    WeylForm r(n, std::min(a.weight_cap(), b.weight_cap()) >= kCapUnbounded
                      ? kCapUnbounded
                      : std::min(a.weight_cap(), b.weight_cap()),
               kCapUnbounded);
    bool started = false;
    for (int da = 0; da <= 2 * n; ++da) {
        WeylForm ad = a.form_degree_part(da);
        if (ad.is_zero()) continue;
        for (int db = 0; db <= 2 * n; ++db) {
            WeylForm bd = b.form_degree_part(db);
            if (bd.is_zero()) continue;
            WeylForm ab = wick_star(ad, bd, omega_up);
            WeylForm ba = wick_star(bd, ad, omega_up);
            WeylForm part = (da * db) % 2 == 0 ? ab - ba : ab + ba;
            r = started ? r + part : part;
            started = true;
        }
    }
    return started ? r : WeylForm(n);
}

WeylForm star_exp(const WeylForm& phi, int cap) {
    if (phi.max_form_degree() != 0)
        throw std::invalid_argument("star_exp: nonzero form degree");
    for (const auto& [k, c] : phi.terms()) {
        if (k.weight() < 2) throw std::invalid_argument("star_exp: term of weight < 2");
        if (k.weight() == 2 && k.y.is_zero() && k.yb.is_zero())
            throw std::invalid_argument("star_exp: pure-hbar weight-2 term");
    }
    int n = phi.dim();
    WeylForm x = phi.hbar_shifted(-2).truncated_weight(cap);
    WeylForm acc = WeylForm::scalar(n, Scalar(1)).truncated_weight(
        std::min(cap, x.weight_cap() >= kCapUnbounded ? cap : x.weight_cap() + 1));
    WeylForm power = acc;
    Rational mfact(1);
    int mind = std::max(1, x.min_total_degree());
    for (int m = 1; m * mind <= cap; ++m) {
        power = power.mul(x);
        if (power.is_zero()) break;
        mfact *= m;
        acc = acc + power.scaled(Scalar(Rational(1) / mfact));
    }
    acc.set_wplus(true);
    return acc;
}

WeylForm star_inverse(const WeylForm& u, const InvMetric& omega_up) {
    int n = u.dim();
    WeylForm one = WeylForm::scalar(n, Scalar(1));
    WeylForm v = u - one;
    if (v.min_total_degree() < 1)
        throw std::invalid_argument("star_inverse: leading term is not 1");
    WeylForm x = one.truncated_weight(u.weight_cap());
    int limit = (u.weight_cap() >= kCapUnbounded ? 64 : u.weight_cap()) + 3;
    for (int it = 0; it < limit; ++it) {
        WeylForm next = one - wick_star(v, x, omega_up);
        next = next.truncated_weight(u.weight_cap());
        next.set_wplus(u.wplus());
        if (next.same_rep(x) && next.weight_cap() == x.weight_cap()) return next;
        x = next;
    }
    throw std::runtime_error("star_inverse: iteration did not stabilize");
}

}  // namespace dq

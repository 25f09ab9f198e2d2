#include "dq/toeplitz.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dq {

namespace {

void require_constant(const WeylForm& a, const char* who) {
    for (const auto& [k, c] : a.terms())
        for (const auto& [jk, s] : c.coeffs())
            if (jk.degree() != 0)
                throw std::invalid_argument(std::string(who) + ": coefficients are not constant");
}

// enumerate multi-indices of dimension n with degree <= maxdeg
void enumerate_multi(int n, int maxdeg, MultiIndex& cur, int pos,
                     std::vector<MultiIndex>& out) {
    if (pos == n) {
        out.push_back(cur);
        return;
    }
    int used = 0;
    for (int i = 0; i < pos; ++i) used += cur[i];
    for (int v = 0; v + used <= maxdeg; ++v) {
        cur[pos] = v;
        enumerate_multi(n, maxdeg, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

std::vector<MultiIndex> multi_basis(int n, int maxdeg) {
    std::vector<MultiIndex> out;
    MultiIndex cur(n);
    enumerate_multi(n, maxdeg, cur, 0, out);
    return out;
}

int max_fiber_degree(const WeylForm& f) {
    int m = 0;
    for (const auto& [k, c] : f.terms())
        if (!c.is_zero()) m = std::max(m, k.y.degree() + k.yb.degree());
    return m;
}

// classical exponential of phi/hbar through exactly m_max vertices
WeylForm exp_vertices(const WeylForm& phi, int weight_cap, int m_max) {
    WeylForm x = phi.hbar_shifted(-2).truncated_weight(weight_cap);
    WeylForm acc = WeylForm::scalar(phi.dim(), Scalar(1)).truncated_weight(weight_cap);
    WeylForm power = acc;
    Rational mfact(1);
    for (int m = 1; m <= m_max; ++m) {
        power = power.mul(x);
        if (power.terms().empty()) break;
        mfact *= m;
        acc = acc + power.scaled(Scalar(Rational(1) / mfact));
    }
    acc.set_wplus(true);
    return acc;
}

}  // namespace

bool HbarSeries::is_zero() const {
    for (const auto& [h, v] : c)
        if (!v.is_zero()) return false;
    return true;
}

void HbarSeries::add(HalfInt h, const Scalar& v) {
    if (v.is_zero() || h.twice_value > tv_cap) return;
    auto it = c.find(h);
    if (it == c.end()) {
        c.emplace(h, v);
    } else {
        it->second += v;
        if (it->second.is_zero()) c.erase(it);
    }
}

HbarSeries HbarSeries::operator+(const HbarSeries& o) const {
    HbarSeries r;
    r.tv_cap = std::min(tv_cap, o.tv_cap);
    for (const auto& [h, v] : c) r.add(h, v);
    for (const auto& [h, v] : o.c) r.add(h, v);
    return r;
}

HbarSeries HbarSeries::operator-(const HbarSeries& o) const {
    return *this + o.scaled(Scalar(-1));
}

HbarSeries HbarSeries::scaled(const Scalar& s) const {
    HbarSeries r;
    r.tv_cap = tv_cap;
    if (s.is_zero()) return r;
    for (const auto& [h, v] : c) r.c.emplace(h, v * s);
    return r;
}

HbarSeries HbarSeries::shifted(int tv) const {
    HbarSeries r;
    r.tv_cap = tv_cap >= kCapUnbounded ? kCapUnbounded : tv_cap + tv;
    for (const auto& [h, v] : c) r.c.emplace(HalfInt(h.twice_value + tv), v);
    return r;
}

Scalar HbarSeries::at(HalfInt h) const {
    auto it = c.find(h);
    return it == c.end() ? Scalar(0) : it->second;
}

Rational HbarSeries::max_abs() const {
    Rational m(0);
    for (const auto& [h, v] : c) m = std::max(m, v.max_abs());
    return m;
}

std::string HbarSeries::str() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [h, v] : c) {
        if (!first) os << " + ";
        first = false;
        os << v.str();
        if (h.twice_value != 0) {
            os << "*h^";
            if (h.is_integer())
                os << h.twice_value / 2;
            else
                os << "(" << h.twice_value << "/2)";
        }
    }
    return os.str();
}

bool FockSeries::is_zero() const {
    for (const auto& [k, v] : c)
        if (!v.is_zero()) return false;
    return true;
}

void FockSeries::add(const MultiIndex& y, HalfInt h, const Scalar& v) {
    if (v.is_zero() || h.twice_value + y.degree() > weight_cap) return;
    auto key = std::make_pair(y, h);
    auto it = c.find(key);
    if (it == c.end()) {
        c.emplace(key, v);
    } else {
        it->second += v;
        if (it->second.is_zero()) c.erase(it);
    }
}

WeylForm FockSeries::to_weyl() const {
    WeylForm w(n, weight_cap);
    for (const auto& [k, v] : c) {
        WeylKey key;
        key.h = k.second;
        key.y = k.first;
        key.yb = MultiIndex(n);
        w.add_term(key, JetPoly::constant(n, v));
    }
    return w;
}

FockSeries FockSeries::from_weyl(const WeylForm& w) {
    require_constant(w, "FockSeries");
    FockSeries s;
    s.n = w.dim();
    s.weight_cap = w.weight_cap();
    for (const auto& [k, coeff] : w.terms()) {
        if (coeff.is_zero()) continue;
        if (k.yb.degree() != 0 || k.form_degree() != 0)
            throw std::invalid_argument("FockSeries: element is not purely holomorphic");
        s.add(k.y, k.h, coeff.at_basepoint());
    }
    return s;
}

FockSeries FockSeries::operator-(const FockSeries& o) const {
    FockSeries r;
    r.n = n;
    r.weight_cap = std::min(weight_cap, o.weight_cap);
    for (const auto& [k, v] : c) r.add(k.first, k.second, v);
    for (const auto& [k, v] : o.c) r.add(k.first, k.second, -v);
    return r;
}

FockSeries FockSeries::truncated_tv(int tv_cap) const {
    FockSeries r = *this;
    for (auto it = r.c.begin(); it != r.c.end();)
        it = it->first.second.twice_value > tv_cap ? r.c.erase(it) : std::next(it);
    return r;
}

Rational FockSeries::max_abs() const {
    Rational m(0);
    for (const auto& [k, v] : c) m = std::max(m, v.max_abs());
    return m;
}

std::string FockSeries::str() const { return to_weyl().str(); }

Interaction::Interaction(WeylForm p) : phi(std::move(p)) {
    require_constant(phi, "Interaction");
    if (phi.max_form_degree() != 0)
        throw std::invalid_argument("Interaction: nonzero form degree");
    for (const auto& [k, c] : phi.terms())
        if (!c.is_zero() && k.weight() < 3)
            throw std::invalid_argument("Interaction: term of weight < 3");
}

WeylForm evaluate_at_basepoint(const WeylForm& a) {
    if (a.max_form_degree() != 0)
        throw std::invalid_argument("evaluate_at_basepoint: nonzero form degree");
    return a.at_basepoint();
}

HbarSeries gaussian_moment(const WeylForm& m, int hbar_tv_cap) {
    require_constant(m, "gaussian_moment");
    if (m.max_form_degree() != 0)
        throw std::invalid_argument("gaussian_moment: nonzero form degree");
    HbarSeries out;
    out.tv_cap = std::min(hbar_tv_cap,
                          m.weight_cap() >= kCapUnbounded ? kCapUnbounded : m.weight_cap());
    for (const auto& [k, coeff] : m.terms()) {
        if (coeff.is_zero()) continue;
        if (!(k.y == k.yb)) continue;
        Rational fact(k.y.factorial());
        out.add(HalfInt(k.h.twice_value + 2 * k.y.degree()),
                coeff.at_basepoint() * Scalar(fact));
    }
    return out;
}

namespace {

HbarSeries inner_product_once(const WeylForm& f, const WeylForm& g, const WeylForm& phi,
                              int weight_cap, int m_max, int tv_cap) {
    WeylForm integrand = f.mul(g.conjugated());
    if (!phi.is_zero()) integrand = integrand.mul(exp_vertices(phi, weight_cap, m_max));
    return gaussian_moment(integrand, tv_cap);
}

}  // namespace

HbarSeries formal_inner_product(const WeylForm& f, const WeylForm& g, const Interaction& phi,
                                const ToeplitzCaps& caps) {
    require_constant(f, "formal_inner_product");
    require_constant(g, "formal_inner_product");
    int tv = caps.hbar_tv;
    int wcap = tv + max_fiber_degree(f) + max_fiber_degree(g);
    int m_max = tv + max_fiber_degree(f) + max_fiber_degree(g);
    HbarSeries a = inner_product_once(f, g, phi.phi, wcap, m_max, tv);
    if (!phi.phi.is_zero()) {
        HbarSeries b = inner_product_once(f, g, phi.phi, wcap, m_max + 1, tv);
        if (!(a - b).is_zero())
            throw std::runtime_error("formal_inner_product: vertex bound is not stable");
    }
    return a;
}

FockSeries projection(const WeylForm& f, const Interaction& phi, const ToeplitzCaps& caps) {
    require_constant(f, "projection");
    int n = f.dim();
    int maxdeg = std::min(caps.max_fiber, caps.hbar_tv + max_fiber_degree(f));
    std::vector<MultiIndex> basis = multi_basis(n, maxdeg);

    auto pair_with_basis = [&](const WeylForm& w) {
        std::vector<HbarSeries> out;
        out.reserve(basis.size());
        for (const auto& I : basis) {
            WeylForm yI(n);
            WeylKey k;
            k.h = HalfInt(0);
            k.y = I;
            k.yb = MultiIndex(n);
            yI.add_term(k, JetPoly::constant(n, Scalar(1)));
            out.push_back(formal_inner_product(w, yI, phi, caps));
        }
        return out;
    };

    std::vector<HbarSeries> b = pair_with_basis(f);
    // pi <- pi + D^{-1}(b - G(pi)); D_I = I! hbar^{|I|}
    FockSeries pi;
    pi.n = n;
    pi.weight_cap = std::min(f.weight_cap(), caps.hbar_tv + maxdeg);
    bool converged = false;
    for (int it = 0; it <= caps.hbar_tv + 4; ++it) {
        std::vector<HbarSeries> g = pair_with_basis(pi.to_weyl());
        bool changed = false;
        for (size_t bi = 0; bi < basis.size(); ++bi) {
            HbarSeries resid = b[bi] - g[bi];
            if (resid.is_zero()) continue;
            changed = true;
            Rational fact(basis[bi].factorial());
            HbarSeries corr =
                resid.scaled(Scalar(Rational(1) / fact)).shifted(-2 * basis[bi].degree());
            for (const auto& [h, v] : corr.c) pi.add(basis[bi], h, v);
        }
        if (!changed) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("projection: caps too small to close the moment system");
    return pi;
}

FockSeries toeplitz_apply(const WeylForm& f, const FockSeries& s, const Interaction& phi,
                          const ToeplitzCaps& caps) {
    return projection(f.mul(s.to_weyl()), phi, caps);
}

WeylForm normal_symbol_star(const WeylForm& f, const Interaction& phi, int weight_cap) {
    require_constant(f, "normal_symbol_star");
    int n = f.dim();
    InvMetric om = flat_inv_metric(n);
    if (phi.phi.is_zero()) return f;
    WeylForm E = star_exp(phi.phi.truncated_weight(weight_cap), weight_cap);
    return wick_star(star_inverse(E, om), f.mul(E), om);
}

FockSeries apply_normal_symbol(const WeylForm& o, const FockSeries& s) {
    require_constant(o, "apply_normal_symbol");
    int n = o.dim();
    FockSeries out;
    out.n = n;
    out.weight_cap = std::min(o.weight_cap(), s.weight_cap);
    for (const auto& [k, coeff] : o.terms()) {
        if (coeff.is_zero()) continue;
        Scalar base = coeff.at_basepoint();
        for (const auto& [sk, sv] : s.c) {
            // ybar^B acts as hbar^{|B|} d^B after multiplying by y^A
            MultiIndex target = sk.first + k.y;
            if (!target.contains(k.yb)) continue;
            mpz_class count = 1;
            MultiIndex res = target;
            for (int i = 0; i < n; ++i) {
                count *= falling(target[i], k.yb[i]);
                res[i] = target[i] - k.yb[i];
            }
            if (count == 0) continue;
            Rational q(count);
            out.add(res, HalfInt(sk.second.twice_value + k.h.twice_value + 2 * k.yb.degree()),
                    base * sv * Scalar(q));
        }
    }
    return out;
}

// Recover the normal symbol from the matrix elements of the Toeplitz
// operator on monomials. At a fixed degree difference D = A - B and fixed
// exact hbar order tau, only symbol terms of weight tau + |D| contribute
// (h = tau - 2|B| per slot), so each (D, tau)-slice is a finite system
//   sum_B u_B prod_i falling(M_i + D_i + B_i, B_i) = [hbar^{tau/2} y^{M+D}] T(y^M)
// with exact integer Kronecker-Vandermonde matrix.
WeylForm normal_symbol_gram(const WeylForm& f, const Interaction& phi, const ToeplitzCaps& caps) {
    require_constant(f, "normal_symbol_gram");
    int n = f.dim();
    int slot_bound = caps.max_fiber;
    std::vector<MultiIndex> basis = multi_basis(n, slot_bound);

    std::map<MultiIndex, FockSeries> T;
    for (const auto& M : basis) {
        FockSeries yM;
        yM.n = n;
        yM.weight_cap = kCapUnbounded;
        yM.add(M, HalfInt(0), Scalar(1));
        T.emplace(M, toeplitz_apply(f, yM, phi, caps));
    }

    WeylForm O(n, kCapUnbounded);
    std::vector<MultiIndex> diffs;
    {
        std::set<std::vector<int>> seen;
        for (const auto& a : basis)
            for (const auto& b : basis) {
                std::vector<int> d(static_cast<size_t>(n));
                for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = a[i] - b[i];
                if (seen.insert(d).second) {
                    MultiIndex m(n);
                    m.e = d;
                    diffs.push_back(m);
                }
            }
    }

    for (const auto& D : diffs) {
        std::vector<MultiIndex> slots;
        for (const auto& B : basis) {
            bool ok = true;
            for (int i = 0; i < n; ++i)
                if (B[i] + D[i] < 0) ok = false;
            if (ok) slots.push_back(B);
        }
        if (slots.empty()) continue;
        size_t m = slots.size();
        const std::vector<MultiIndex>& rows = slots;

        std::vector<std::vector<Rational>> mat0(m, std::vector<Rational>(m, Rational(0)));
        for (size_t r = 0; r < m; ++r)
            for (size_t cidx = 0; cidx < m; ++cidx) {
                mpz_class count = 1;
                for (int i = 0; i < n; ++i)
                    count *= falling(rows[r][i] + D[i] + slots[cidx][i], slots[cidx][i]);
                mat0[r][cidx] = Rational(count);
            }

        for (int tau = -2 * slot_bound; tau <= caps.hbar_tv; ++tau) {
            std::vector<Scalar> rhs(m, Scalar(0));
            bool any = false;
            for (size_t r = 0; r < m; ++r) {
                MultiIndex tgt = rows[r];
                for (int i = 0; i < n; ++i) tgt[i] += D[i];
                auto it = T.at(rows[r]).c.find(std::make_pair(tgt, HalfInt(tau)));
                if (it != T.at(rows[r]).c.end()) {
                    rhs[r] = it->second;
                    if (!rhs[r].is_zero()) any = true;
                }
            }
            if (!any) continue;
            auto mat = mat0;
            for (size_t col = 0; col < m; ++col) {
                size_t piv = col;
                while (piv < m && mat[piv][col] == 0) ++piv;
                if (piv == m)
                    throw std::runtime_error("normal_symbol_gram: singular slice system");
                std::swap(mat[piv], mat[col]);
                std::swap(rhs[piv], rhs[col]);
                Rational pivval = mat[col][col];
                for (size_t j = col; j < m; ++j) mat[col][j] /= pivval;
                rhs[col] = rhs[col] * Scalar(Rational(1) / pivval);
                for (size_t r = 0; r < m; ++r) {
                    if (r == col || mat[r][col] == 0) continue;
                    Rational fpiv = mat[r][col];
                    for (size_t j = col; j < m; ++j) mat[r][j] -= fpiv * mat[col][j];
                    rhs[r] -= Scalar(fpiv) * rhs[col];
                }
            }
            for (size_t cidx = 0; cidx < m; ++cidx) {
                if (rhs[cidx].is_zero()) continue;
                const MultiIndex& B = slots[cidx];
                MultiIndex A = B;
                for (int i = 0; i < n; ++i) A[i] += D[i];
                WeylKey key;
                key.h = HalfInt(tau - 2 * B.degree());
                key.y = A;
                key.yb = B;
                O.add_term(key, JetPoly::constant(n, rhs[cidx]));
            }
        }
    }
    return O;
}

}  // namespace dq

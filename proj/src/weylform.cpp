#include "dq/weylform.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dq {

int wedge_sign(uint32_t a, uint32_t b) {
    if (a & b) return 0;
    // inversions: pairs (x in a, y in b) with x > y
    int inv = 0;
    for (uint32_t m = b; m; m &= m - 1) {
        int bit = __builtin_ctz(m);
        inv += __builtin_popcount(a >> (bit + 1));
    }
    return (inv % 2 == 0) ? 1 : -1;
}

WeylForm WeylForm::scalar(int n, const Scalar& c) {
    WeylForm w(n);
    w.add_term(WeylKey{HalfInt(0), MultiIndex(n), MultiIndex(n), 0, 0},
               JetPoly::constant(n, c));
    return w;
}

WeylForm WeylForm::from_jet(int n, const JetPoly& p) {
    WeylForm w(n);
    w.add_term(WeylKey{HalfInt(0), MultiIndex(n), MultiIndex(n), 0, 0}, p);
    return w;
}

WeylForm WeylForm::monomial(int n, const WeylKey& k, const JetPoly& coeff) {
    WeylForm w(n);
    w.add_term(k, coeff);
    return w;
}

void WeylForm::check_compat(const WeylForm& o) const {
    if (n_ != o.n_) throw std::invalid_argument("WeylForm: dimension mismatch");
}

int WeylForm::min_total_degree() const {
    int m = weight_cap_ >= kCapUnbounded ? kCapUnbounded : weight_cap_ + 1;
    for (const auto& [k, c] : terms_) m = std::min(m, k.weight());
    return m;
}

int WeylForm::min_diag() const {
    int m = diag_cap_ >= kCapUnbounded ? kCapUnbounded : diag_cap_ + 1;
    if (weight_cap_ < kCapUnbounded) m = std::min(m, weight_cap_ + 1);
    for (const auto& [k, c] : terms_) {
        int w = k.weight();
        m = std::min(m, w + c.min_degree());
    }
    return m;
}

int WeylForm::certified_diag() const {
    int m = diag_cap_;
    for (const auto& [k, c] : terms_) {
        if (c.jet_order() >= kJetUnbounded) continue;
        m = std::min(m, k.weight() + c.jet_order() + 1);
    }
    return m;
}

int WeylForm::max_form_degree() const {
    int m = 0;
    for (const auto& [k, c] : terms_)
        if (!c.is_zero()) m = std::max(m, k.form_degree());
    return m;
}

bool WeylForm::has_ybar() const {
    for (const auto& [k, c] : terms_)
        if (!c.is_zero() && k.yb.degree() > 0) return true;
    return false;
}

// An empty coefficient with a finite jet order is kept as a certification
// marker: it records that this slot is only trusted to that base degree, so
// later contributions merge to the joint certified range regardless of the
// order in which they arrive.
void WeylForm::add_term(const WeylKey& k, const JetPoly& coeff) {
    int w = k.weight();
    if (w > weight_cap_) return;
    JetPoly use = coeff;
    if (diag_cap_ < kCapUnbounded && w + coeff.max_degree() > diag_cap_)
        use = coeff.truncated(diag_cap_ - w);
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        if (use.is_zero() && use.jet_order() >= kJetUnbounded) return;
        terms_.emplace(k, use);
    } else {
        JetPoly s = it->second + use;
        if (s.is_zero() && s.jet_order() >= kJetUnbounded)
            terms_.erase(it);
        else
            it->second = s;
    }
}

WeylForm WeylForm::operator+(const WeylForm& o) const {
    check_compat(o);
    WeylForm r(n_, std::min(weight_cap_, o.weight_cap_), std::min(diag_cap_, o.diag_cap_));
    r.wplus_ = wplus_ || o.wplus_;
    for (const auto& [k, c] : terms_) r.add_term(k, c);
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
}

WeylForm WeylForm::operator-(const WeylForm& o) const { return *this + (-o); }

WeylForm WeylForm::operator-() const {
    WeylForm r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
}

WeylForm WeylForm::scaled(const Scalar& c) const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    r.wplus_ = wplus_;
    if (c.is_zero()) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v.scaled(c));
    return r;
}

WeylForm WeylForm::scaled_jet(const JetPoly& p) const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    r.wplus_ = wplus_;
    for (const auto& [k, v] : terms_) r.add_term(k, v * p);
    return r;
}

WeylForm WeylForm::hbar_shifted(int tv) const {
    auto shift_cap = [&](int cap) {
        return cap >= kCapUnbounded ? kCapUnbounded : cap + tv;
    };
    WeylForm r(n_, shift_cap(weight_cap_), shift_cap(diag_cap_));
    r.wplus_ = wplus_;
    for (const auto& [k, v] : terms_) {
        WeylKey nk = k;
        nk.h = HalfInt(k.h.twice_value + tv);
        r.terms_.emplace(nk, v);
    }
    return r;
}

// Product caps: a term of weight w in a*b is complete when every split
// w = u + v with u >= min(a), v >= min(b) has both factors certified.
WeylForm WeylForm::mul(const WeylForm& o) const {
    check_compat(o);
    int ma = min_total_degree(), mb = o.min_total_degree();
    int cap = kCapUnbounded;
    if (weight_cap_ < kCapUnbounded) cap = std::min(cap, weight_cap_ + mb);
    if (o.weight_cap_ < kCapUnbounded) cap = std::min(cap, o.weight_cap_ + ma);
    int da = min_diag(), db = o.min_diag();
    int dcap = kCapUnbounded;
    if (diag_cap_ < kCapUnbounded) dcap = std::min(dcap, diag_cap_ + db);
    if (o.diag_cap_ < kCapUnbounded) dcap = std::min(dcap, o.diag_cap_ + da);
    WeylForm r(n_, cap, dcap);
    r.wplus_ = wplus_ || o.wplus_;
    for (const auto& [ka, ca] : terms_) {
        int wa = ka.weight();
        for (const auto& [kb, cb] : o.terms_) {
            if (wa + kb.weight() > cap) continue;
            // reorder dz^A dzb^B dz^C dzb^D -> dz^{AC} dzb^{BD}: moving the
            // dz^C block past dzb^B costs (-1)^{|B||C|}, then each same-type
            // merge contributes its inversion parity.
            int s2 = wedge_sign(ka.dz, kb.dz);
            int s3 = wedge_sign(ka.dzb, kb.dzb);
            if (s2 == 0 || s3 == 0) continue;
            int sign = s2 * s3;
            if ((ka.dzb_degree() * kb.dz_degree()) % 2 == 1) sign = -sign;
            WeylKey nk;
            nk.h = ka.h + kb.h;
            nk.y = ka.y + kb.y;
            nk.yb = ka.yb + kb.yb;
            nk.dz = ka.dz | kb.dz;
            nk.dzb = ka.dzb | kb.dzb;
            JetPoly c = ca * cb;
            if (sign < 0) c = -c;
            r.add_term(nk, c);
        }
    }
    return r;
}

WeylForm WeylForm::conjugated() const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_) {
        WeylKey nk;
        nk.h = k.h;
        nk.y = k.yb;
        nk.yb = k.y;
        nk.dz = k.dzb;
        nk.dzb = k.dz;
        int p = k.dz_degree(), q = k.dzb_degree();
        JetPoly nc = c.conjugated();
        if ((p * q) % 2 == 1) nc = -nc;
        r.add_term(nk, nc);
    }
    return r;
}

WeylForm WeylForm::symbol() const {
    if (max_form_degree() != 0)
        throw std::invalid_argument("WeylForm::symbol: nonzero form degree");
    WeylForm r(n_, weight_cap_, diag_cap_);
    for (const auto& [k, c] : terms_)
        if (k.y.is_zero() && k.yb.is_zero()) r.terms_.emplace(k, c);
    return r;
}

WeylForm WeylForm::fiber_component(int p, int q) const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    for (const auto& [k, c] : terms_)
        if (k.y.degree() == p && k.yb.degree() == q) r.terms_.emplace(k, c);
    return r;
}

WeylForm WeylForm::mixed_part() const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    for (const auto& [k, c] : terms_)
        if (k.y.degree() >= 1 && k.yb.degree() >= 1) r.terms_.emplace(k, c);
    return r;
}

WeylForm WeylForm::form_component(int p, int q) const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    for (const auto& [k, c] : terms_)
        if (k.dz_degree() == p && k.dzb_degree() == q) r.terms_.emplace(k, c);
    return r;
}

WeylForm WeylForm::form_degree_part(int d) const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    for (const auto& [k, c] : terms_)
        if (k.form_degree() == d) r.terms_.emplace(k, c);
    return r;
}

WeylForm WeylForm::truncated_weight(int cap) const {
    WeylForm r(n_, std::min(cap, weight_cap_), diag_cap_);
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_)
        if (k.weight() <= r.weight_cap_) r.terms_.emplace(k, c);
    return r;
}

WeylForm WeylForm::truncated_diag(int cap) const {
    WeylForm r(n_, weight_cap_, std::min(cap, diag_cap_));
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_) r.add_term(k, c);
    return r;
}

WeylForm WeylForm::at_basepoint() const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_) {
        if (c.jet_order() < 0) {
            // even the constant term is uncertified here; keep a marker
            r.terms_.emplace(k, JetPoly(n_, -1));
            continue;
        }
        Scalar v = c.at_basepoint();
        if (!v.is_zero()) r.terms_.emplace(k, JetPoly::constant(n_, v));
    }
    return r;
}

bool WeylForm::same_terms(const WeylForm& o) const {
    auto strip = [](const std::map<WeylKey, JetPoly>& m) {
        std::map<WeylKey, JetPoly> r;
        for (const auto& [k, c] : m)
            if (!c.is_zero()) r.emplace(k, c);
        return r;
    };
    return strip(terms_) == strip(o.terms_);
}

bool WeylForm::same_rep(const WeylForm& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    auto it = terms_.begin();
    auto jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt) {
        if (it->first != jt->first) return false;
        if (!(it->second == jt->second)) return false;
        if (it->second.jet_order() != jt->second.jet_order()) return false;
    }
    return true;
}

Rational WeylForm::max_abs() const {
    Rational m(0);
    for (const auto& [k, c] : terms_) {
        Rational a = c.max_abs();
        if (m < a) m = a;
    }
    return m;
}

std::string WeylForm::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (c.is_zero()) continue;
        if (!first) os << "\n";
        first = false;
        os << "[";
        if (k.h.twice_value != 0) {
            os << "h^";
            if (k.h.is_integer())
                os << k.h.twice_value / 2;
            else
                os << "(" << k.h.twice_value << "/2)";
            os << " ";
        }
        for (int i = 0; i < n_; ++i)
            if (k.y[i] > 0) os << "y" << (i + 1) << (k.y[i] > 1 ? "^" + std::to_string(k.y[i]) : "") << " ";
        for (int i = 0; i < n_; ++i)
            if (k.yb[i] > 0) os << "yb" << (i + 1) << (k.yb[i] > 1 ? "^" + std::to_string(k.yb[i]) : "") << " ";
        for (int i = 0; i < n_; ++i)
            if (k.dz & (1u << i)) os << "dz" << (i + 1) << " ";
        for (int i = 0; i < n_; ++i)
            if (k.dzb & (1u << i)) os << "dzb" << (i + 1) << " ";
        os << "] (" << c.str() << ")";
    }
    return os.str();
}

WeylForm WeylForm::d_y(int i) const {
    WeylForm r(n_, weight_cap_ >= kCapUnbounded ? kCapUnbounded : weight_cap_ - 1,
               diag_cap_ >= kCapUnbounded ? kCapUnbounded : diag_cap_ - 1);
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_) {
        if (k.y[i] == 0) continue;
        WeylKey nk = k;
        nk.y[i] -= 1;
        r.add_term(nk, c.scaled(Scalar(k.y[i])));
    }
    return r;
}

WeylForm WeylForm::d_yb(int i) const {
    WeylForm r(n_, weight_cap_ >= kCapUnbounded ? kCapUnbounded : weight_cap_ - 1,
               diag_cap_ >= kCapUnbounded ? kCapUnbounded : diag_cap_ - 1);
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_) {
        if (k.yb[i] == 0) continue;
        WeylKey nk = k;
        nk.yb[i] -= 1;
        r.add_term(nk, c.scaled(Scalar(k.yb[i])));
    }
    return r;
}

WeylForm WeylForm::fiber_multiplied(const MultiIndex& dy, const MultiIndex& dyb) const {
    WeylForm r(n_, weight_cap_, diag_cap_);
    r.wplus_ = wplus_;
    for (const auto& [k, c] : terms_) {
        WeylKey nk = k;
        nk.y = k.y + dy;
        nk.yb = k.yb + dyb;
        r.add_term(nk, c);
    }
    return r;
}

WeylForm left_wedge_dz(int i, const WeylForm& a) {
    WeylForm r(a.dim(), a.weight_cap(), a.diag_cap());
    r.set_wplus(a.wplus());
    for (const auto& [k, c] : a.terms()) {
        if (k.dz & (1u << i)) continue;
        WeylKey nk = k;
        int s = wedge_sign(1u << i, k.dz);
        nk.dz = k.dz | (1u << i);
        r.add_term(nk, s < 0 ? -c : c);
    }
    return r;
}

WeylForm left_wedge_dzb(int i, const WeylForm& a) {
    WeylForm r(a.dim(), a.weight_cap(), a.diag_cap());
    r.set_wplus(a.wplus());
    for (const auto& [k, c] : a.terms()) {
        if (k.dzb & (1u << i)) continue;
        WeylKey nk = k;
        int s = wedge_sign(1u << i, k.dzb);
        if (k.dz_degree() % 2 == 1) s = -s;
        nk.dzb = k.dzb | (1u << i);
        r.add_term(nk, s < 0 ? -c : c);
    }
    return r;
}

// --- delta family -----------------------------------------------------------

WeylForm delta10(const WeylForm& a) {
    WeylForm r(a.dim(),
               a.weight_cap() >= kCapUnbounded ? kCapUnbounded : a.weight_cap() - 1,
               a.diag_cap() >= kCapUnbounded ? kCapUnbounded : a.diag_cap() - 1);
    for (const auto& [k, c] : a.terms()) {
        for (int i = 0; i < a.dim(); ++i) {
            if (k.y[i] == 0 || (k.dz & (1u << i))) continue;
            WeylKey nk = k;
            nk.y[i] -= 1;
            int s = wedge_sign(1u << i, k.dz);
            nk.dz = k.dz | (1u << i);
            JetPoly nc = c.scaled(Scalar(k.y[i] * s));
            r.add_term(nk, nc);
        }
    }
    return r;
}

WeylForm delta01(const WeylForm& a) {
    WeylForm r(a.dim(),
               a.weight_cap() >= kCapUnbounded ? kCapUnbounded : a.weight_cap() - 1,
               a.diag_cap() >= kCapUnbounded ? kCapUnbounded : a.diag_cap() - 1);
    for (const auto& [k, c] : a.terms()) {
        for (int i = 0; i < a.dim(); ++i) {
            if (k.yb[i] == 0 || (k.dzb & (1u << i))) continue;
            WeylKey nk = k;
            nk.yb[i] -= 1;
            int s = wedge_sign(1u << i, k.dzb);
            if (k.dz_degree() % 2 == 1) s = -s;  // dzb^i crosses the dz block
            nk.dzb = k.dzb | (1u << i);
            r.add_term(nk, c.scaled(Scalar(k.yb[i] * s)));
        }
    }
    return r;
}

WeylForm delta_full(const WeylForm& a) { return delta10(a) + delta01(a); }

WeylForm delta10_star(const WeylForm& a) {
    WeylForm r(a.dim(),
               a.weight_cap() >= kCapUnbounded ? kCapUnbounded : a.weight_cap() + 1,
               a.diag_cap() >= kCapUnbounded ? kCapUnbounded : a.diag_cap() + 1);
    for (const auto& [k, c] : a.terms()) {
        for (int i = 0; i < a.dim(); ++i) {
            if (!(k.dz & (1u << i))) continue;
            WeylKey nk = k;
            nk.y[i] += 1;
            // iota_{d/dz^i}: sign = parity of dz elements before i
            int before = __builtin_popcount(k.dz & ((1u << i) - 1));
            int s = (before % 2 == 0) ? 1 : -1;
            nk.dz = k.dz & ~(1u << i);
            r.add_term(nk, c.scaled(Scalar(s)));
        }
    }
    return r;
}

WeylForm delta01_star(const WeylForm& a) {
    WeylForm r(a.dim(),
               a.weight_cap() >= kCapUnbounded ? kCapUnbounded : a.weight_cap() + 1,
               a.diag_cap() >= kCapUnbounded ? kCapUnbounded : a.diag_cap() + 1);
    for (const auto& [k, c] : a.terms()) {
        for (int i = 0; i < a.dim(); ++i) {
            if (!(k.dzb & (1u << i))) continue;
            WeylKey nk = k;
            nk.yb[i] += 1;
            int before = __builtin_popcount(k.dzb & ((1u << i) - 1));
            int s = ((before + k.dz_degree()) % 2 == 0) ? 1 : -1;
            nk.dzb = k.dzb & ~(1u << i);
            r.add_term(nk, c.scaled(Scalar(s)));
        }
    }
    return r;
}

WeylForm delta_star(const WeylForm& a) { return delta10_star(a) + delta01_star(a); }

namespace {
// Per-term normalized homotopy inverse; divider(key) returns the type weight
// of the input term, 0 meaning "project away".
template <typename StarOp, typename Divider>
WeylForm normalized_inverse(const WeylForm& a, StarOp star, Divider divider) {
    WeylForm r(a.dim(),
               a.weight_cap() >= kCapUnbounded ? kCapUnbounded : a.weight_cap() + 1,
               a.diag_cap() >= kCapUnbounded ? kCapUnbounded : a.diag_cap() + 1);
    for (const auto& [k, c] : a.terms()) {
        int d = divider(k);
        if (d == 0) continue;
        WeylForm single = WeylForm::monomial(a.dim(), k, c);
        WeylForm starred = star(single);
        for (const auto& [nk, nc] : starred.terms())
            r.add_term(nk, nc.scaled(Scalar::of(1, d)));
    }
    return r;
}
}  // namespace

WeylForm delta10_inv(const WeylForm& a) {
    return normalized_inverse(a, [](const WeylForm& w) { return delta10_star(w); },
                              [](const WeylKey& k) { return k.dz_degree() + k.y.degree(); });
}

WeylForm delta01_inv(const WeylForm& a) {
    return normalized_inverse(a, [](const WeylForm& w) { return delta01_star(w); },
                              [](const WeylKey& k) { return k.dzb_degree() + k.yb.degree(); });
}

WeylForm delta_inv(const WeylForm& a) {
    return normalized_inverse(a, [](const WeylForm& w) { return delta_star(w); },
                              [](const WeylKey& k) {
                                  return k.form_degree() + k.y.degree() + k.yb.degree();
                              });
}

}  // namespace dq

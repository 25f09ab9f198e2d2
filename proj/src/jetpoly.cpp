#include "dq/jetpoly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dq {

std::string rational_str(const Rational& r) { return r.get_str(); }

Rational rational_from_str(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    r.canonicalize();
    return r;
}

std::string Scalar::str() const {
    if (im == 0) return rational_str(re);
    std::ostringstream os;
    os << "(" << rational_str(re) << (im < 0 ? "-" : "+") << rational_str(Rational(abs(im)))
       << "*i)";
    return os.str();
}

JetPoly JetPoly::constant(int n, const Scalar& c, int jet_order) {
    JetPoly p(n, jet_order);
    p.add_term(JetKey{MultiIndex(n), MultiIndex(n)}, c);
    return p;
}

JetPoly JetPoly::monomial(int n, const MultiIndex& I, const MultiIndex& J, const Scalar& c,
                          int jet_order) {
    JetPoly p(n, jet_order);
    p.add_term(JetKey{I, J}, c);
    return p;
}

void JetPoly::check_dim(const JetPoly& o) const {
    if (n_ != o.n_) throw std::invalid_argument("JetPoly: dimension mismatch");
}

int JetPoly::min_degree() const {
    int m = jet_order_ >= kJetUnbounded ? kJetUnbounded : jet_order_ + 1;
    for (const auto& [k, c] : coeffs_) m = std::min(m, k.degree());
    return m;
}

int JetPoly::max_degree() const {
    int m = 0;
    for (const auto& [k, c] : coeffs_) m = std::max(m, k.degree());
    return m;
}

void JetPoly::add_term(const JetKey& k, const Scalar& c) {
    if (c.is_zero() || k.degree() > jet_order_) return;
    auto it = coeffs_.find(k);
    if (it == coeffs_.end()) {
        coeffs_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) coeffs_.erase(it);
    }
}

JetPoly JetPoly::operator+(const JetPoly& o) const {
    check_dim(o);
    JetPoly r(n_, std::min(jet_order_, o.jet_order_));
    for (const auto& [k, c] : coeffs_) r.add_term(k, c);
    for (const auto& [k, c] : o.coeffs_) r.add_term(k, c);
    return r;
}

JetPoly JetPoly::operator-(const JetPoly& o) const { return *this + (-o); }

JetPoly JetPoly::operator-() const {
    JetPoly r(n_, jet_order_);
    for (const auto& [k, c] : coeffs_) r.coeffs_.emplace(k, -c);
    return r;
}

JetPoly JetPoly::operator*(const JetPoly& o) const {
    check_dim(o);
    JetPoly r(n_, std::min(jet_order_, o.jet_order_));
    for (const auto& [ka, ca] : coeffs_) {
        int da = ka.degree();
        for (const auto& [kb, cb] : o.coeffs_) {
            if (da + kb.degree() > r.jet_order_) continue;
            r.add_term(JetKey{ka.zi + kb.zi, ka.zbi + kb.zbi}, ca * cb);
        }
    }
    return r;
}

JetPoly JetPoly::scaled(const Scalar& c) const {
    JetPoly r(n_, jet_order_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : coeffs_) r.coeffs_.emplace(k, v * c);
    return r;
}

JetPoly JetPoly::inverted() const {
    Scalar c0 = at_basepoint();
    if (c0.is_zero()) throw std::domain_error("JetPoly: inverse of zero constant term");
    // a = c0 (1 + v); a^{-1} = c0^{-1} sum (-v)^k
    Scalar c0inv = c0.inverse();
    JetPoly v = (*this - constant(n_, c0, jet_order_)).scaled(c0inv);
    if (!v.is_zero() && jet_order_ >= kJetUnbounded)
        throw std::domain_error("JetPoly: inverse of a non-constant exact polynomial is not a polynomial");
    JetPoly acc = constant(n_, Scalar(1), jet_order_);
    JetPoly power = acc;
    int steps = std::min(jet_order_, v.is_zero() ? 0 : jet_order_ / std::max(1, v.min_degree()));
    for (int k = 1; k <= steps; ++k) {
        power = power * v;
        if (power.is_zero()) break;
        acc = (k % 2 == 1) ? acc - power : acc + power;
    }
    return acc.scaled(c0inv);
}

JetPoly JetPoly::d_z(int i) const {
    JetPoly r(n_, jet_order_ >= kJetUnbounded ? kJetUnbounded : jet_order_ - 1);
    for (const auto& [k, c] : coeffs_) {
        int a = k.zi[i];
        if (a == 0) continue;
        JetKey nk = k;
        nk.zi[i] = a - 1;
        r.add_term(nk, c * Scalar(a));
    }
    return r;
}

JetPoly JetPoly::d_zb(int i) const {
    JetPoly r(n_, jet_order_ >= kJetUnbounded ? kJetUnbounded : jet_order_ - 1);
    for (const auto& [k, c] : coeffs_) {
        int a = k.zbi[i];
        if (a == 0) continue;
        JetKey nk = k;
        nk.zbi[i] = a - 1;
        r.add_term(nk, c * Scalar(a));
    }
    return r;
}

JetPoly JetPoly::conjugated() const {
    JetPoly r(n_, jet_order_);
    for (const auto& [k, c] : coeffs_) r.coeffs_.emplace(JetKey{k.zbi, k.zi}, c.conj());
    return r;
}

Scalar JetPoly::at_basepoint() const {
    auto it = coeffs_.find(JetKey{MultiIndex(n_), MultiIndex(n_)});
    return it == coeffs_.end() ? Scalar(0) : it->second;
}

JetPoly JetPoly::truncated(int jet_order) const {
    JetPoly r(n_, std::min(jet_order, jet_order_));
    for (const auto& [k, c] : coeffs_)
        if (k.degree() <= r.jet_order_) r.coeffs_.emplace(k, c);
    return r;
}

JetPoly JetPoly::composed(const std::vector<JetPoly>& F) const {
    for (const auto& f : F)
        if (!f.at_basepoint().is_zero())
            throw std::invalid_argument("JetPoly::composed: substitution must fix the basepoint");
    JetPoly r(n_, jet_order_);
    // cache powers of F_i and conj(F_i)
    std::vector<std::vector<JetPoly>> pf(static_cast<size_t>(n_)), pfb(static_cast<size_t>(n_));
    auto power = [&](std::vector<JetPoly>& cache, const JetPoly& base, int k) -> const JetPoly& {
        while (static_cast<int>(cache.size()) <= k) {
            if (cache.empty())
                cache.push_back(JetPoly::constant(n_, Scalar(1), jet_order_));
            else
                cache.push_back(cache.back() * base);
        }
        return cache[static_cast<size_t>(k)];
    };
    for (const auto& [k, c] : coeffs_) {
        JetPoly term = JetPoly::constant(n_, c, jet_order_);
        for (int i = 0; i < n_; ++i) {
            if (k.zi[i] > 0)
                term = term * power(pf[static_cast<size_t>(i)], F[static_cast<size_t>(i)], k.zi[i]);
            if (k.zbi[i] > 0)
                term = term * power(pfb[static_cast<size_t>(i)],
                                    F[static_cast<size_t>(i)].conjugated(), k.zbi[i]);
        }
        r = r + term;
    }
    return r;
}

Rational JetPoly::max_abs() const {
    Rational m(0);
    for (const auto& [k, c] : coeffs_) {
        Rational a = c.max_abs();
        if (m < a) m = a;
    }
    return m;
}

std::string JetPoly::str() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        for (int i = 0; i < n_; ++i) {
            if (k.zi[i] > 0) {
                os << "*z" << (i + 1);
                if (k.zi[i] > 1) os << "^" << k.zi[i];
            }
        }
        for (int i = 0; i < n_; ++i) {
            if (k.zbi[i] > 0) {
                os << "*zb" << (i + 1);
                if (k.zbi[i] > 1) os << "^" << k.zbi[i];
            }
        }
    }
    return os.str();
}

JetPoly jet_log1p(const JetPoly& v) {
    if (!v.at_basepoint().is_zero())
        throw std::invalid_argument("jet_log1p: nonzero constant term");
    JetPoly acc(v.dim(), v.jet_order());
    if (v.is_zero()) return acc;
    JetPoly power = v;
    int md = std::max(1, v.min_degree());
    for (int k = 1; k * md <= v.jet_order() && !power.is_zero(); ++k) {
        JetPoly t = power.scaled(Scalar::of(k % 2 == 1 ? 1 : -1, k));
        acc = acc + t;
        power = power * v;
    }
    return acc;
}

}  // namespace dq

#ifndef DQ_TEST_HELPERS_HPP
#define DQ_TEST_HELPERS_HPP

#include <random>

#include "dq/geometry.hpp"
#include "dq/weylform.hpp"
#include "dq/wick.hpp"

namespace dqtest {

using namespace dq;

// one-variable fiber monomials
inline WeylForm fib(int ydeg, int ybdeg, int hbar_tv = 0, Scalar c = Scalar(1)) {
    WeylKey k;
    k.h = HalfInt(hbar_tv);
    k.y = MultiIndex{ydeg};
    k.yb = MultiIndex{ybdeg};
    return WeylForm::monomial(1, k, JetPoly::constant(1, c));
}

inline WeylForm hbar1(int n = 1) {
    WeylKey k;
    k.h = HalfInt::whole(1);
    k.y = MultiIndex(n);
    k.yb = MultiIndex(n);
    return WeylForm::monomial(n, k, JetPoly::constant(n, Scalar(1)));
}

inline WeylForm with_form(WeylForm a, uint32_t dz, uint32_t dzb) {
    WeylForm r(a.dim(), a.weight_cap(), a.diag_cap());
    for (const auto& [k, c] : a.terms()) {
        WeylKey nk = k;
        nk.dz = dz;
        nk.dzb = dzb;
        r.add_term(nk, c);
    }
    return r;
}

// deterministic random sparse elements for property tests
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    int uniform(int lo, int hi) {
        return static_cast<int>(gen() % static_cast<uint64_t>(hi - lo + 1)) + lo;
    }
    Scalar scalar() {
        int num = uniform(-4, 4);
        int den = uniform(1, 3);
        int inum = uniform(-2, 2);
        return Scalar(Rational(num, den), Rational(inum, den));
    }
};

inline WeylForm random_weyl(Rng& rng, int n, int cap, int max_terms, bool forms = false,
                            bool with_jets = true, int max_hbar = 1) {
    WeylForm w(n, cap);
    int terms = rng.uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) {
        WeylKey k;
        k.h = HalfInt::whole(rng.uniform(0, max_hbar));
        k.y = MultiIndex(n);
        k.yb = MultiIndex(n);
        for (int i = 0; i < n; ++i) {
            k.y[i] = rng.uniform(0, 2);
            k.yb[i] = rng.uniform(0, 2);
        }
        if (forms) {
            k.dz = static_cast<uint32_t>(rng.uniform(0, (1 << n) - 1));
            k.dzb = static_cast<uint32_t>(rng.uniform(0, (1 << n) - 1));
        }
        MultiIndex I(n), J(n);
        if (with_jets) {
            for (int i = 0; i < n; ++i) {
                I[i] = rng.uniform(0, 2);
                J[i] = rng.uniform(0, 2);
            }
        }
        JetPoly c = JetPoly::monomial(n, I, J, rng.scalar(), 8);
        w.add_term(k, c);
    }
    return w;
}

}  // namespace dqtest

#endif

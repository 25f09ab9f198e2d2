#ifndef DQ_MULTIINDEX_HPP
#define DQ_MULTIINDEX_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dq {

/// Exponent vector over the n base (or fiber) variables.
struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(int n) : e(static_cast<size_t>(n), 0) {}
    MultiIndex(std::initializer_list<int> v) : e(v) {}

    static MultiIndex unit(int n, int i) {
        MultiIndex m(n);
        m.e[static_cast<size_t>(i)] = 1;
        return m;
    }

    int dim() const { return static_cast<int>(e.size()); }
    int operator[](int i) const { return e[static_cast<size_t>(i)]; }
    int& operator[](int i) { return e[static_cast<size_t>(i)]; }

    int degree() const {
        int s = 0;
        for (int v : e) s += v;
        return s;
    }
    bool is_zero() const { return degree() == 0; }

    /// I! as an exact integer.
    mpz_class factorial() const {
        mpz_class f = 1;
        for (int v : e)
            for (int k = 2; k <= v; ++k) f *= k;
        return f;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (size_t k = 0; k < e.size(); ++k) r.e[k] += o.e[k];
        return r;
    }
    /// Componentwise difference; throws if any entry goes negative.
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (size_t k = 0; k < e.size(); ++k) {
            r.e[k] -= o.e[k];
            if (r.e[k] < 0) throw std::domain_error("MultiIndex: negative entry");
        }
        return r;
    }
    bool contains(const MultiIndex& o) const {
        for (size_t k = 0; k < e.size(); ++k)
            if (e[k] < o.e[k]) return false;
        return true;
    }

    auto operator<=>(const MultiIndex&) const = default;
};

/// Falling factorial a(a-1)...(a-k+1), the coefficient of a k-fold derivative.
inline mpz_class falling(int a, int k) {
    mpz_class r = 1;
    for (int t = 0; t < k; ++t) r *= (a - t);
    return r;
}

}  // namespace dq

#endif

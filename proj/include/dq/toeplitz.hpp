#ifndef DQ_TOEPLITZ_HPP
#define DQ_TOEPLITZ_HPP

#include <map>

#include "dq/wick.hpp"

namespace dq {

/// Exact hbar-series with a certified order bound (twice-value convention).
struct HbarSeries {
    int tv_cap = kCapUnbounded;
    std::map<HalfInt, Scalar> c;

    bool is_zero() const;
    void add(HalfInt h, const Scalar& v);
    HbarSeries operator+(const HbarSeries& o) const;
    HbarSeries operator-(const HbarSeries& o) const;
    HbarSeries scaled(const Scalar& s) const;
    HbarSeries shifted(int tv) const;
    Scalar at(HalfInt h) const;
    Rational max_abs() const;
    std::string str() const;
};

/// Purely holomorphic fiber series over hbar: the stalk model the Toeplitz
/// operators act on.
struct FockSeries {
    int n = 0;
    int weight_cap = kCapUnbounded;
    std::map<std::pair<MultiIndex, HalfInt>, Scalar> c;

    bool is_zero() const;
    void add(const MultiIndex& y, HalfInt h, const Scalar& v);
    WeylForm to_weyl() const;
    static FockSeries from_weyl(const WeylForm& w);
    FockSeries operator-(const FockSeries& o) const;
    FockSeries truncated_tv(int tv_cap) const;
    Rational max_abs() const;
    std::string str() const;
};

/// Interaction term of the perturbed Gaussian: constant coefficients, form
/// degree zero, every term of weight at least 3.
struct Interaction {
    WeylForm phi;
    explicit Interaction(WeylForm p);
    Interaction() = default;
};

struct ToeplitzCaps {
    int hbar_tv = 6;   // certified hbar order, twice-value
    int max_fiber = 8; // basis degree bound for the projection system
};

/// Coefficients evaluated at z = zbar = 0; requires form degree 0.
WeylForm evaluate_at_basepoint(const WeylForm& a);

/// The normalized Gaussian functional: y^I ybar^J -> delta_{IJ} I! hbar^{|I|}.
HbarSeries gaussian_moment(const WeylForm& m, int hbar_tv_cap = kCapUnbounded);

/// <f, g>_phi as a formal integral against the perturbed Gaussian, expanded
/// through a vertex bound with a one-extra-vertex stability assertion.
HbarSeries formal_inner_product(const WeylForm& f, const WeylForm& g, const Interaction& phi,
                                const ToeplitzCaps& caps);

/// Orthogonal projection onto the holomorphic subspace: the unique series
/// with <f, y^I>_phi = <pi(f), y^I>_phi for all I, solved order by order.
FockSeries projection(const WeylForm& f, const Interaction& phi, const ToeplitzCaps& caps);

FockSeries toeplitz_apply(const WeylForm& f, const FockSeries& s, const Interaction& phi,
                          const ToeplitzCaps& caps);

/// Normal symbol through the exponential equation f e^{phi/hbar} = e^{phi/hbar} * O_f
/// (star-inverse route, basepoint Wick product).
WeylForm normal_symbol_star(const WeylForm& f, const Interaction& phi, int weight_cap);

/// Normal symbol recovered from the Toeplitz operator matrix on monomials
/// (Gram-projection route).
WeylForm normal_symbol_gram(const WeylForm& f, const Interaction& phi, const ToeplitzCaps& caps);

/// The basepoint Bargmann-Fock action of a constant-coefficient Weyl element
/// on a holomorphic series: y multiplies, ybar differentiates with hbar.
FockSeries apply_normal_symbol(const WeylForm& o, const FockSeries& s);

}  // namespace dq

#endif

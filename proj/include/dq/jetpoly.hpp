#ifndef DQ_JETPOLY_HPP
#define DQ_JETPOLY_HPP

#include <map>
#include <string>

#include "dq/multiindex.hpp"
#include "dq/scalar.hpp"

namespace dq {

/// Sentinel jet order for elements that are exact polynomials (no truncated
/// tail anywhere). min() arithmetic keeps it absorbing.
inline constexpr int kJetUnbounded = 1 << 20;

struct JetKey {
    MultiIndex zi;   // z-exponents
    MultiIndex zbi;  // zbar-exponents
    auto operator<=>(const JetKey&) const = default;
    int degree() const { return zi.degree() + zbi.degree(); }
};

/// Truncated Taylor polynomial at the basepoint in z^1..z^n, zbar^1..zbar^n.
/// Coefficients with total base degree <= jet_order are trusted; everything
/// above is dropped eagerly. Differentiation lowers jet_order by exactly 1.
class JetPoly {
  public:
    JetPoly() = default;
    JetPoly(int n, int jet_order) : n_(n), jet_order_(jet_order) {}

    static JetPoly constant(int n, const Scalar& c, int jet_order = kJetUnbounded);
    static JetPoly monomial(int n, const MultiIndex& I, const MultiIndex& J, const Scalar& c,
                            int jet_order = kJetUnbounded);

    int dim() const { return n_; }
    int jet_order() const { return jet_order_; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::map<JetKey, Scalar>& coeffs() const { return coeffs_; }

    /// Minimal total base degree among stored terms (jet_order+1 when empty);
    /// a certified lower bound for the abstract element.
    int min_degree() const;
    int max_degree() const;

    void add_term(const JetKey& k, const Scalar& c);

    JetPoly operator+(const JetPoly& o) const;
    JetPoly operator-(const JetPoly& o) const;
    JetPoly operator-() const;
    JetPoly operator*(const JetPoly& o) const;
    JetPoly scaled(const Scalar& c) const;

    /// Multiplicative inverse up to jet_order; requires nonzero constant term.
    JetPoly inverted() const;

    JetPoly d_z(int i) const;
    JetPoly d_zb(int i) const;
    JetPoly conjugated() const;

    Scalar at_basepoint() const;
    /// Keep only terms of total degree zero... removed; see at_basepoint.
    JetPoly truncated(int jet_order) const;

    bool operator==(const JetPoly& o) const {
        return n_ == o.n_ && coeffs_ == o.coeffs_;
    }

    /// Substitute z^i -> F_i(z) (holomorphic jets, F_i(0)=0) and
    /// zbar^i -> conj(F_i). Used by the coordinate normalizer.
    JetPoly composed(const std::vector<JetPoly>& F) const;

    Rational max_abs() const;
    std::string str() const;

  private:
    int n_ = 0;
    int jet_order_ = kJetUnbounded;
    std::map<JetKey, Scalar> coeffs_;

    void check_dim(const JetPoly& o) const;
};

/// log(1 + v) as a jet, v with zero constant term.
JetPoly jet_log1p(const JetPoly& v);

}  // namespace dq

#endif

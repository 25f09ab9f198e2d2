#ifndef DQ_WEYLFORM_HPP
#define DQ_WEYLFORM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dq/jetpoly.hpp"

namespace dq {

inline constexpr int kCapUnbounded = 1 << 20;

/// weight of hbar^h y^A ybar^B is twice the hbar exponent plus |A|+|B|;
/// this is the filtration every truncation and iteration runs on.
struct WeylKey {
    HalfInt h;
    MultiIndex y;
    MultiIndex yb;
    uint32_t dz = 0;   // strictly-increasing index set as bitmask
    uint32_t dzb = 0;

    int weight() const { return h.twice_value + y.degree() + yb.degree(); }
    int form_degree() const { return __builtin_popcount(dz) + __builtin_popcount(dzb); }
    int dz_degree() const { return __builtin_popcount(dz); }
    int dzb_degree() const { return __builtin_popcount(dzb); }
    auto operator<=>(const WeylKey&) const = default;
};

/// Sign of wedging the set `a` in front of the set `b` into a merged
/// strictly-increasing list; -1 is encoded as false. Returns 0 on overlap.
int wedge_sign(uint32_t a, uint32_t b);

/// Form-valued Weyl-bundle element with jet coefficients, truncated eagerly.
///
/// weight_cap: every stored term has weight <= weight_cap, and terms up to
/// that weight are complete (certified). diag_cap bounds weight + base degree
/// jointly; it only drops below unbounded after module actions against
/// exponents with weight-1 terms, where high fiber weight can feed low
/// result weight through base-degree-consuming contractions.
class WeylForm {
  public:
    WeylForm() = default;
    explicit WeylForm(int n, int weight_cap = kCapUnbounded, int diag_cap = kCapUnbounded)
        : n_(n), weight_cap_(weight_cap), diag_cap_(diag_cap) {}

    static WeylForm scalar(int n, const Scalar& c);
    static WeylForm from_jet(int n, const JetPoly& p);
    static WeylForm monomial(int n, const WeylKey& k, const JetPoly& coeff);

    int dim() const { return n_; }
    int weight_cap() const { return weight_cap_; }
    int diag_cap() const { return diag_cap_; }
    bool wplus() const { return wplus_; }
    void set_wplus(bool v) { wplus_ = v; }
    /// True when every stored coefficient is empty (certification markers,
    /// which record reduced jet ranges for a slot, do not count as content).
    bool is_zero() const {
        for (const auto& [k, c] : terms_)
            if (!c.is_zero()) return false;
        return true;
    }
    const std::map<WeylKey, JetPoly>& terms() const { return terms_; }

    /// Certified lower bound for term weights of the abstract element.
    int min_total_degree() const;
    /// Certified lower bound for weight + base degree.
    int min_diag() const;
    /// Upper bound of the jointly certified weight + base region: every slot
    /// is complete only up to its jet order, so the element as a whole is
    /// (weight + base)-complete up to the worst slot.
    int certified_diag() const;
    int max_form_degree() const;
    bool has_ybar() const;
    bool form_free() const { return max_form_degree() == 0; }

    void add_term(const WeylKey& k, const JetPoly& coeff);

    WeylForm operator+(const WeylForm& o) const;
    WeylForm operator-(const WeylForm& o) const;
    WeylForm operator-() const;
    WeylForm scaled(const Scalar& c) const;
    /// Multiply every coefficient by a jet (a fiber- and form-free factor).
    WeylForm scaled_jet(const JetPoly& p) const;
    /// Multiply by hbar^{tv/2}; caps shift along.
    WeylForm hbar_shifted(int tv) const;

    /// Graded-commutative fiberwise product (Koszul sign on the form part).
    WeylForm mul(const WeylForm& o) const;

    WeylForm conjugated() const;
    /// y = ybar = 0 part, hbar retained. Requires form degree 0.
    WeylForm symbol() const;

    /// Fiber partial derivatives (lower weight caps by one).
    WeylForm d_y(int i) const;
    WeylForm d_yb(int i) const;
    /// Multiply by the fiber monomial y^dy ybar^dyb.
    WeylForm fiber_multiplied(const MultiIndex& dy, const MultiIndex& dyb) const;

    /// Component with y-degree p and ybar-degree q.
    WeylForm fiber_component(int p, int q) const;
    /// Terms with both fiber degrees >= 1.
    WeylForm mixed_part() const;
    WeylForm form_component(int p, int q) const;
    WeylForm form_degree_part(int d) const;

    WeylForm truncated_weight(int cap) const;
    WeylForm truncated_diag(int cap) const;
    /// Evaluate all coefficients at z = zbar = 0.
    WeylForm at_basepoint() const;

    /// Structural equality of nonempty coefficients (markers ignored).
    bool same_terms(const WeylForm& o) const;
    /// Exact representation equality: content, certification markers and
    /// per-slot jet orders. Fixed-point iterations must stop on this, not on
    /// same_terms, or boundary content would outlive its certification.
    bool same_rep(const WeylForm& o) const;

    Rational max_abs() const;
    std::string str() const;

  private:
    int n_ = 0;
    int weight_cap_ = kCapUnbounded;
    int diag_cap_ = kCapUnbounded;
    bool wplus_ = false;
    std::map<WeylKey, JetPoly> terms_;

    void check_compat(const WeylForm& o) const;
    friend WeylForm mul_caps(const WeylForm& a, const WeylForm& b, WeylForm&& shell);
};

/// delta-operator family (fiberwise de Rham and its homotopy inverses).
WeylForm delta10(const WeylForm& a);
WeylForm delta01(const WeylForm& a);
WeylForm delta_full(const WeylForm& a);
WeylForm delta10_star(const WeylForm& a);
WeylForm delta01_star(const WeylForm& a);
WeylForm delta_star(const WeylForm& a);
WeylForm delta10_inv(const WeylForm& a);
WeylForm delta01_inv(const WeylForm& a);
WeylForm delta_inv(const WeylForm& a);

/// Wedge dz^i (resp. dzbar^i) onto every term from the left.
WeylForm left_wedge_dz(int i, const WeylForm& a);
WeylForm left_wedge_dzb(int i, const WeylForm& a);

}  // namespace dq

#endif

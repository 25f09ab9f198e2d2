#ifndef DQ_FOCK_HPP
#define DQ_FOCK_HPP

#include "dq/fedosov.hpp"

namespace dq {

/// Module element amplitude * e^{exponent/hbar} with the exponential kept
/// unexpanded. The amplitude may be form-valued (connection outputs); the
/// exponent is a form-free holomorphic-Weyl element and may carry hbar-free
/// y-linear terms, which is exactly why it is never expanded.
struct ExtElt {
    WeylForm amplitude;
    WeylForm exponent;

    void validate() const;
};

/// Two elements agree when amplitudes match and exponents differ by a pure
/// hbar-series constant.
bool ext_equal(const ExtElt& a, const ExtElt& b);

/// ExtElt tensored with a local frame of the formal line bundle; line_gauge
/// is the fiber-free potential psi with nabla_L(e) = -(1/hbar) d(psi) ox e.
struct FockElt {
    ExtElt base;
    WeylForm line_gauge;
};

/// Bargmann-Fock action of a Weyl element: y-parts multiply, each ybar^j
/// acts as hbar Lambda^{i jbar} d/dy^i through amplitude and exponent, with
/// Lambda the inverse Hermitian metric. Output caps account for the
/// weight-lowering hits on hbar-free y-linear exponent terms, which consume
/// base degree instead (the admissibility mechanism).
ExtElt bf_action(const WeylForm& o, const ExtElt& t, const KahlerData& g);

inline FockElt bf_action(const WeylForm& o, const FockElt& t, const KahlerData& g) {
    return FockElt{bf_action(o, t.base, g), t.line_gauge};
}

/// D_alpha = nabla + (1/hbar) gamma_alpha acting through the pair.
ExtElt apply_D_alpha(const ExtElt& t, const ConnectionData& c);

/// D_alpha plus the line-bundle term; flat when the gauge potential matches
/// the twist -omega_hbar + hbar Ric.
FockElt apply_DB_alpha(const FockElt& s, const ConnectionData& c);

/// Validates d dbar(line_gauge) = -omega_hbar + hbar Ric at available jets.
void check_gauge_twist(const FockElt& s, const ConnectionData& c);

/// The canonical holomorphic-Weyl exponent of the prequantum flat section:
/// beta = -sum_{k>=1} (delta10^-1 nabla^{1,0})^k rho. It vanishes at the
/// basepoint for K-normal potentials.
WeylForm build_beta(const KahlerData& g, const PotentialJet& rho, int weight_cap);

/// The distinguished flat module element e^{beta/hbar} ox e with the
/// potential itself as line gauge.
FockElt prequantum_section(const KahlerData& g, const PotentialJet& rho, int weight_cap);

struct ModuleActionResult {
    WeylForm s_prime;       // holomorphic hbar-series germ, as z-jets
    WeylForm form_residual; // amplitude minus the flat section of s_prime
};

/// Acts with the flat section of f on J_s e^{beta/hbar} ox e and reads off
/// the unique holomorphic series the result represents.
ModuleActionResult module_action(const WeylForm& f, const WeylForm& s_hol,
                                 const ConnectionData& c, const PotentialJet& rho);

/// Hermitian norm-squared of the y-linear exponent part at the basepoint,
/// compared against r_bound^2 (exact rationals).
bool boundedness_check(const FockElt& s, const Rational& r_bound);

}  // namespace dq

#endif

#ifndef DQ_FEDOSOV_HPP
#define DQ_FEDOSOV_HPP

#include <vector>

#include "dq/geometry.hpp"

namespace dq {

/// Symmetric coefficient tensors of the holomorphic-jet connection,
/// one antiholomorphic form leg and a raised fiber index:
/// tensors[k][j] holds the degree-k piece for upper index j, stored as a
/// polynomial (terms dzbar^l ox y^{multi of degree k}).
struct KapranovTensors {
    int n_max = 0;
    std::vector<std::vector<WeylForm>> tensors;  // indexed [k][j], k >= 2

    const std::vector<WeylForm>& at(int k) const { return tensors[static_cast<size_t>(k)]; }
};

KapranovTensors kapranov_tensors(const KahlerData& g, int n_max);

/// The degree-raising derivation built from the tensors: sum_j T_k[j] . d/dy^j.
WeylForm kapranov_action(const KapranovTensors& t, const WeylForm& a);
/// Conjugate-side action on ybar (used by the classical extension).
WeylForm kapranov_action_bar(const KapranovTensors& t, const WeylForm& a);

/// A flat connection datum on the Weyl bundle: one-form gamma with
/// D = nabla + (1/hbar)[gamma, -] abelian, plus everything entering the
/// flatness equation.
struct ConnectionData {
    KahlerData geometry;
    int weight_cap = 0;
    WeylForm alpha_potential;  // fiber-free, hbar-weighted; d dbar of it is alpha
    KapranovTensors kapranov;
    WeylForm I_sum;        // sum of the curvature lifts, weight >= 3
    WeylForm J_alpha;      // potential-side tail
    WeylForm I_alpha;      // I_sum + J_alpha, type (0,1)
    WeylForm gamma_alpha;  // I_alpha + quadratic part
    WeylForm gamma_10;     // (1,0)-form component of gamma_alpha
    WeylForm gamma_01;     // (0,1)-form component
    WeylForm R_nabla;      // curvature two-form with y ybar legs
    WeylForm omega_hbar;   // central two-form on the right-hand side
};

/// alpha_potential must be O(hbar); its mixed Hessian is the (1,1)-form
/// alpha. Pass a zero WeylForm for alpha = 0 and -hbar*log_h for the
/// Ricci-potential choice.
ConnectionData build_connection(const KahlerData& g, const WeylForm& alpha_potential,
                                int weight_cap);

/// nabla(gamma) + (1/hbar) gamma*gamma + R_nabla - omega_hbar; empty iff the
/// connection is abelian at the certified caps.
WeylForm fedosov_residual(const ConnectionData& c);

enum class Conn { Jet, Classical, Fedosov };

WeylForm apply_connection(const WeylForm& a, const ConnectionData& c, Conn which,
                          Part part = Part::Full);

/// Flat section under the Fedosov connection with prescribed symbol,
/// by the degree-raising fixed-point iteration.
WeylForm quantum_flat_section(const WeylForm& symbol_jet, const ConnectionData& c);

/// Flat section under the classical (jet + conjugate) connection.
WeylForm classical_flat_section(const WeylForm& symbol_jet, const ConnectionData& c);

/// symbol(O_f * O_g): the induced star product on symbols.
WeylForm star_product(const WeylForm& f, const WeylForm& g, const ConnectionData& c);

struct PhiSections {
    WeylForm phi_omega;  // mixed part of the classical section of the form potential
    WeylForm phi_alpha;  // mixed part for the alpha potential
    WeylForm phi;        // combined interaction, weight >= 3
};

PhiSections phi_sections(const ConnectionData& c, const PotentialJet& rho);

}  // namespace dq

#endif

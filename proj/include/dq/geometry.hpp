#ifndef DQ_GEOMETRY_HPP
#define DQ_GEOMETRY_HPP

#include <string>
#include <vector>

#include "dq/weylform.hpp"
#include "dq/wick.hpp"

namespace dq {

/// Real-valued Kahler potential jet at the basepoint.
struct PotentialJet {
    JetPoly rho;
    int n = 0;
    int jet_order = 0;

    void validate() const;
};

/// All metric jets derived from a potential. Conventions (see
/// docs/conventions.md): the Hermitian metric is h_{i jbar} = d_i d_jbar rho,
/// omega_{i jbar} = h_{i jbar} / (-2 sqrt(-1)), omega^{i jbar} satisfies
/// omega^{i jbar} omega_{k jbar} = -delta^i_k, Gamma^m_{ik} = h^{lbar m}
/// d_i h_{k lbar}, R^m_{i jbar k} = d_jbar Gamma^m_{ik}, Ric = trace,
/// log_h = log det h (constant term dropped). With these, d_i d_jbar log_h
/// equals Ric_{i jbar} identically.
struct KahlerData {
    int n = 0;
    int jet_order = 0;
    std::vector<std::vector<JetPoly>> metric;        // h_{i jbar}
    std::vector<std::vector<JetPoly>> omega_lower;   // omega_{i jbar}
    std::vector<std::vector<JetPoly>> omega_upper;   // omega^{i jbar}
    std::vector<std::vector<std::vector<JetPoly>>> christoffel;       // [m][i][k]
    std::vector<std::vector<std::vector<JetPoly>>> christoffel_bar;   // conjugates
    std::vector<std::vector<std::vector<std::vector<JetPoly>>>> curvature;  // [m][i][j][k]
    std::vector<std::vector<JetPoly>> ricci;         // [i][j] = R^k_{i jbar k}
    JetPoly h_det;
    JetPoly log_h;

    const InvMetric& inv_metric() const { return omega_upper; }
    bool is_flat() const;
};

KahlerData kahler_from_potential(const PotentialJet& p);

PotentialJet builtin_geometry(const std::string& name, int n, int jet_order);

bool is_k_normal(const PotentialJet& p);

struct NormalizationResult {
    PotentialJet normalized;
    /// Per-axis squared rescale factors d_i (the actual rescale is
    /// z_i -> z_i / sqrt(d_i)). Kept squared so the record stays rational.
    std::vector<Rational> scale_squares;
    /// Composed change z_old = change(z_new) and its inverse to jet order;
    /// filled only when every sqrt(d_i) is rational, empty otherwise.
    std::vector<JetPoly> change;
    std::vector<JetPoly> inverse_change;
};

/// Bochner normalization: kill pure terms, rescale the basepoint metric to
/// the identity, then kill the (m,1)/(1,m) blocks degree by degree with
/// holomorphic changes. Exact arithmetic only: when the basepoint rescale
/// needs an irrational square root that survives into a coefficient, this
/// throws instead of approximating.
NormalizationResult k_normalize(const PotentialJet& p);

enum class Part { Full, Holo, Anti };

/// Levi-Civita covariant derivative on form-valued Weyl elements:
/// exterior derivative on coefficients plus Gamma-action on fiber indices.
/// (The form-index action vanishes for symmetric Christoffels.)
WeylForm nabla(const WeylForm& a, const KahlerData& g, Part part = Part::Full);

WeylForm nabla_tilde_10(const WeylForm& a, const KahlerData& g);
WeylForm nabla_tilde_01(const WeylForm& a, const KahlerData& g);

}  // namespace dq

#endif

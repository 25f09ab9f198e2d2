#ifndef DQ_WICK_HPP
#define DQ_WICK_HPP

#include <vector>

#include "dq/weylform.hpp"

namespace dq {

/// Inverse-metric jets omega^{i jbar}, normalized so that
/// omega^{i jbar} * omega_{k jbar} = -delta^i_k. On the flat model at a
/// normalized basepoint this makes y * ybar = y ybar - hbar.
using InvMetric = std::vector<std::vector<JetPoly>>;

InvMetric flat_inv_metric(int n);

/// Fiberwise Wick product: contractions pair y-derivatives of the first
/// factor with ybar-derivatives of the second, one inverse-metric factor and
/// one (sqrt(-1) hbar / 2) per contraction. Weight-additive term by term.
WeylForm wick_star(const WeylForm& a, const WeylForm& b, const InvMetric& omega_up);

/// a*b - (-1)^{|a||b|} b*a on form-degree homogeneous parts.
WeylForm wick_commutator(const WeylForm& a, const WeylForm& b, const InvMetric& omega_up);

/// exp(phi/hbar) as a classical power series, truncated at `cap` total
/// degree. Requires form degree 0, all weights >= 2, and no pure-hbar
/// weight-2 part, so every term of phi/hbar has nonnegative degree.
WeylForm star_exp(const WeylForm& phi, int cap);

/// Inverse of u = 1 + (degree >= 1 terms) under the Wick product,
/// by degree-raising Neumann iteration.
WeylForm star_inverse(const WeylForm& u, const InvMetric& omega_up);

}  // namespace dq

#endif

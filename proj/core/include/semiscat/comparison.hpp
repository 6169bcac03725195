#pragma once

#include <vector>

#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/propagator.hpp"

namespace semiscat {

/// One cell of a truncation-stability experiment: the decaying potential is
/// represented by a far truncation at R_outer (the proxy operator); the
/// comparison operator truncates at R << R_outer.
struct ResolventDifference {
    double diff_norm = 0.0;        // || chi (G_P - G_Q) chi ||
    double q_weighted_norm = 0.0;  // || <x>^-1 G_Q <x>^-1 ||
    double ratio = 0.0;            // diff / q_weighted
    double diff_norm_outer2 = 0.0; // same with R_outer doubled (sensitivity)
    double R = 0.0, R_outer = 0.0, h = 0.0, lambda = 0.0;
};

/// Difference of cutoff resolvents between the R_outer and R truncations.
/// Evaluated through the resolvent identity
///   chi (G_P - G_Q) chi = -chi G_P (V_P - V_Q) G_Q chi,
/// which is a rank-two operator here (the potentials differ only outside
/// supp chi); this route is free of the catastrophic cancellation a direct
/// kernel subtraction would have at small h.
ResolventDifference resolvent_difference(const Potential& base, double R,
                                         double R_outer, double h,
                                         double lambda, const CutoffSpec& chi,
                                         bool with_sensitivity = true);

/// Direct-subtraction route (kernel sampled and subtracted pointwise);
/// used to cross-check the identity route where both are accurate.
double resolvent_difference_direct(const Potential& base, double R,
                                   double R_outer, double h, double lambda,
                                   const CutoffSpec& chi, std::size_t n = 512);

/// Fit of diff ~ C h^p on pairs (h, diff). windowed[i] is the exponent of
/// the (h_i, h_{i+1}) pair with h sorted descending: for super-polynomial
/// decay the windowed exponents grow as the window slides down in h.
struct DecayFit {
    double exponent = 0.0;
    double residual = 0.0;
    std::vector<double> windowed;
};

DecayFit superpoly_fit(std::vector<std::pair<double, double>> pairs);

/// Weighted-resolvent inequality data at one (lambda, h):
/// interior_norm (no indicator), one_sided_norm (indicator left),
/// exterior_norm (indicator both sides), cutoff_norm (smooth chi both
/// sides), and the instrumented ratios.
struct WeightedInequalityReport {
    double interior_norm = 0.0;
    double one_sided_norm = 0.0;
    double exterior_norm = 0.0;
    double cutoff_norm = 0.0;
    double interpolation_lhs = 0.0;  // = one_sided_norm
    double interpolation_rhs = 0.0;  // h^-1/2 interior^1/2
    double a14_ratio = 0.0;          // lhs / rhs
    double a17_ratio = 0.0;          // exterior * h
    double a13_ratio = 0.0;          // cutoff / interior
    double lambda = 0.0, h = 0.0, s = 1.0, R0 = 0.0;
};

WeightedInequalityReport weighted_inequalities(const Potential& pot,
                                               double lambda, double h,
                                               double s, double R0,
                                               double domain_radius = 120.0);

/// Sup over t of the operator-norm difference of the filtered cutoff
/// evolutions of the two truncations, on one shared Dirichlet grid.
struct PropagatorDifference {
    std::vector<double> t_list;
    std::vector<double> norms;
    double sup_norm = 0.0;
};

PropagatorDifference propagator_difference(const Potential& base, double R,
                                           double R_outer, double h,
                                           double L_box, int n_points,
                                           const CutoffSpec& chi,
                                           const EnergyWindow& phi,
                                           const std::vector<double>& t_list);

} // namespace semiscat

#pragma once

// The suspension semiflow over (T, r): the space I_r = {(x, u) : 0 <= u
// < r(x)} with (x, r(x)) ~ (T x, 0), the invariant measure mu_phi x Leb,
// correlation functions, the Delta/chi decomposition, the e_s transform,
// and the two routes to the Laplace transform chi-hat (direct t-grid
// quadrature and the resolvent series).

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "semiflow/grid_function.hpp"
#include "semiflow/markov_map.hpp"
#include "semiflow/transfer_operator.hpp"

namespace semiflow {

struct SuspensionPoint {
    double x = 0.0;
    double u = 0.0;
};

/// Complex observable E(x, u) on the suspension space with the three
/// norm components of ||E||_{alpha,1} = |E|_inf + |E|_alpha + |d_u E|_inf.
struct SuspensionObservable {
    std::function<Complex(double, double)> eval;
    double sup = 0.0;
    double alpha_semi = 0.0;
    double du_sup = 0.0;
    std::string name;
    bool centered = false;
    double norm_alpha1() const { return sup + alpha_semi + du_sup; }
};

/// Quadrature setup for the suspension integrals: composite Gauss-
/// Legendre panels in x (panel nodes avoid the dyadic grid points whose
/// forward orbits degenerate under the doubling map) and one Gauss-
/// Legendre rule per fiber.
struct QuadratureOptions {
    int x_panels = 64;
    int x_nodes_per_panel = 8;
    int u_nodes = 32;
};

/// Semiflow phi_t(x, u) = (T^n x, u + t - r_n(x)) where n counts the
/// roof crossings: r_n(x) <= u + t < r_{n+1}(x). Requires t >= 0.
SuspensionPoint flow(const MarkovMap& map, const RoofFunction& roof,
                     SuspensionPoint p, double t);

/// Integral of E against mu_phi x Leb (trapezoid-free: GL panels in x
/// against the SRB density, GL nodes in u per fiber).
Complex invariant_integral(const MarkovMap& map, const SrbMeasure& srb,
                           const RoofFunction& roof,
                           const SuspensionObservable& E,
                           const QuadratureOptions& opts = {});

/// Returns a copy of E with its invariant mean subtracted and the
/// centered flag set.
SuspensionObservable center_observable(const MarkovMap& map,
                                       const SrbMeasure& srb,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       const QuadratureOptions& opts = {});

/// Correlation rho_{E,F}(t) = <E o phi_t . F> - <E><F>.
Complex correlation(const MarkovMap& map, const SrbMeasure& srb,
                    const RoofFunction& roof, const SuspensionObservable& E,
                    const SuspensionObservable& F, double t,
                    const QuadratureOptions& opts = {});

/// Correlation on a whole t-grid; forward orbits and Birkhoff prefix
/// sums are shared across all t values.
std::vector<Complex> correlation_curve(const MarkovMap& map,
                                       const SrbMeasure& srb,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       const SuspensionObservable& F,
                                       const std::vector<double>& ts,
                                       const QuadratureOptions& opts = {});

/// The splitting rho = Delta + chi: Delta integrates u in
/// [0, max(0, r - t)] (no roof crossing), chi the rest of the fiber.
/// Expects centered observables.
std::pair<Complex, Complex> chi_delta_split(const MarkovMap& map,
                                            const SrbMeasure& srb,
                                            const RoofFunction& roof,
                                            const SuspensionObservable& E,
                                            const SuspensionObservable& F,
                                            double t,
                                            const QuadratureOptions& opts = {});

/// chi(t) on a t-grid with shared orbit tables.
std::vector<Complex> chi_curve(const MarkovMap& map, const SrbMeasure& srb,
                               const RoofFunction& roof,
                               const SuspensionObservable& E,
                               const SuspensionObservable& F,
                               const std::vector<double>& ts,
                               const QuadratureOptions& opts = {});

/// e_s(x) = integral_0^{r(x)} e^{-su} E(x, u) du, one Gauss-Legendre
/// rule per node of the layout.
GridFunction es_transform(GridLayoutPtr layout, const RoofFunction& roof,
                          const SuspensionObservable& E, Complex s,
                          int u_nodes = 32);

struct LaplaceSeriesResult {
    Complex value;
    int terms = 0;
    double truncation_estimate = 0.0;
};

/// chi-hat(s) via the resolvent form: integral of e_s * (L_s /
/// (1 - L_s)) f_{-s} against mu_phi. Requires a normalized potential.
LaplaceSeriesResult laplace_chi_series(const MarkovMap& map,
                                       const Potential& pot,
                                       const SrbMeasure& srb,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       const SuspensionObservable& F,
                                       Complex s, double tol = 1e-10,
                                       int max_terms = 10000);

struct LaplaceDirectResult {
    Complex value;
    double tail_bound = 0.0;
};

/// Simpson t-grid for the direct transform (even step count on [0, t_max]).
std::vector<double> laplace_t_grid(double t_max, double dt);

/// Composite-Simpson Laplace transform of a precomputed curve on a
/// laplace_t_grid; chi is s-independent, so one curve serves many s.
Complex laplace_transform_curve(const std::vector<double>& ts,
                                const std::vector<Complex>& values, Complex s);

/// chi-hat(s) by direct numerical Laplace transform of chi(t) on a
/// uniform t-grid up to t_max (composite Simpson). The reported tail
/// bound is |E|_inf |F|_inf e^{-a t_max} / a.
LaplaceDirectResult laplace_direct(const MarkovMap& map, const SrbMeasure& srb,
                                   const RoofFunction& roof,
                                   const SuspensionObservable& E,
                                   const SuspensionObservable& F, Complex s,
                                   double t_max, double dt = 0.005,
                                   const QuadratureOptions& opts = {});

/// E o phi_t as an observable (norm components carried over; the flow
/// is measure preserving so the sup is exact, the others are estimates).
SuspensionObservable flowed_observable(const MarkovMap& map,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       double t);

struct McEstimate {
    Complex value;
    double std_error = 0.0;
};

/// Monte Carlo estimate of rho_{E,F}(t) from n_samples independent
/// draws of mu_phi x Leb (inverse-CDF sampling of the SRB density).
McEstimate correlation_monte_carlo(const MarkovMap& map, const SrbMeasure& srb,
                                   const RoofFunction& roof,
                                   const SuspensionObservable& E,
                                   const SuspensionObservable& F, double t,
                                   std::size_t n_samples, std::uint64_t seed);

} // namespace semiflow

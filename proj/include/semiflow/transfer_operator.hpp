#pragma once

// The complex transfer operator L_s of the potential phi - s*r, where
// phi = -log|T'| is the geometric potential, together with potential
// normalization, the SRB measure, the Neumann-series resolvent, and the
// spectral probes (Lasota-Yorke fit, Dolgopyat contraction).
//
// On the grid, L_s f(x) = sum over branches y into the interval of x of
// |y'(x)| * (h(y(x))/h(x))^[normalized] * exp(-s r(y(x))) * f(y(x)),
// with f(y(x)) read off by linear interpolation. Powers are computed by
// repeated application, never by enumerating branch words.

#include <complex>
#include <optional>
#include <vector>

#include "semiflow/grid_function.hpp"
#include "semiflow/markov_map.hpp"
#include "semiflow/numerics.hpp"

namespace semiflow {

struct ComplexFrequency {
    double a = 0.0;  // decay parameter (real part)
    double b = 0.0;  // oscillation frequency (imaginary part)
    Complex s() const { return Complex(a, b); }
};

/// Geometric potential plus an optional log-density corrector. When
/// normalized, applying the operator at s = 0 to the constant 1 gives 1.
struct Potential {
    std::optional<GridFunction> corrector;  // log h_phi on the workspace grid
    bool normalized = false;
};

/// SRB density h_phi >= 0 with unit integral against the normalized
/// Lebesgue measure on I.
struct SrbMeasure {
    GridFunction density;
};

/// Precomputed branch tables for one (map, potential, roof, grid)
/// combination. All evaluation state is immutable after construction;
/// apply() is safe to call concurrently.
class TransferKernel {
public:
    TransferKernel(const MarkovMap& map, const Potential& pot,
                   const RoofFunction* roof, GridLayoutPtr layout);

    const GridLayoutPtr& layout() const { return layout_; }

    /// Complex per-node weight tables exp(-s r(y(x))) * base for a fixed s.
    struct Phases {
        Complex s;
        std::vector<std::vector<Complex>> factor;  // [branch][node]
    };
    Phases phases(Complex s) const;

    void apply(const Phases& ph, const GridFunction& in, GridFunction& out) const;
    GridFunction apply(Complex s, const GridFunction& in) const;
    GridFunction apply_power(Complex s, GridFunction f, int n) const;

private:
    struct Table {
        int domain = 0;   // interval carrying the output nodes
        int target = 0;   // interval the branch maps into
        std::vector<double> pos;     // interpolation positions y(x_k)
        std::vector<double> weight;  // |y'(x_k)| * corrector ratio
        std::vector<double> roof;    // r(y(x_k)), zero when no roof
    };
    GridLayoutPtr layout_;
    std::vector<Table> tables_;
    bool has_roof_ = false;
};

/// Leading eigenvalue and positive eigenfunction of the raw geometric
/// operator, by power iteration from the constant 1 with sup-norm
/// renormalization (converged when successive iterates differ by < 1e-10
/// in sup norm). Throws ConvergenceError after 10^4 iterations.
std::pair<double, GridFunction> leading_eigen(const MarkovMap& map,
                                              GridLayoutPtr layout);

/// Adds the coboundary log h - log h o T to the geometric potential so
/// that L_0 1 = 1 on the grid.
Potential normalize(const MarkovMap& map, GridLayoutPtr layout);

/// SRB measure: density h_phi scaled so its normalized-Lebesgue integral
/// over I is 1.
SrbMeasure srb_measure(const MarkovMap& map, GridLayoutPtr layout);

/// Integral of g against the SRB measure (trapezoid on the grids, with
/// dx normalized over |I|).
Complex srb_integrate(const MarkovMap& map, const SrbMeasure& srb,
                      const std::function<Complex(double)>& g);
Complex srb_integrate(const MarkovMap& map, const SrbMeasure& srb,
                      const GridFunction& g);

/// One application of L_s on the grid. Builds the kernel tables for the
/// call; iteration loops should construct a TransferKernel once instead.
GridFunction apply_transfer(const MarkovMap& map, const Potential& pot,
                            const RoofFunction* roof, GridLayoutPtr layout,
                            Complex s, const GridFunction& f);

struct ResolventResult {
    GridFunction value;
    int terms = 0;
    double last_term_norm = 0.0;
};

/// (1 - L_s)^{-1} f as a truncated Neumann series: terms are added until
/// the term norm (||.||_b when a context is given or |Im s| >= 3, else
/// the sup norm) falls below tol. Throws DivergenceError on 50
/// consecutive non-decreasing term norms or at the 10^4-term cap.
ResolventResult resolvent_apply(const TransferKernel& kernel, Complex s,
                                const GridFunction& f, double tol,
                                const BNormContext* ctx = nullptr,
                                int max_terms = 10000);

struct LasotaYorkeFit {
    double c9 = 0.0;         // least constant making the inequality hold
    double lambda_eff = 0.0; // fitted decay factor of the seminorm transient
    double lambda_map = 0.0; // the map's estimated contraction constant
    int n1 = 0;              // least n with 1/2 + c9 * lambda^(alpha n) <= 3/4
    struct Probe {
        double b;
        int n;
        std::string function;
        double seminorm;
        double bound;
    };
    std::vector<Probe> probes;
};

/// Named basket of probe functions used by the spectral probes:
/// constants, the identity, three sinusoids, and two seeded Weierstrass-
/// type Holder fields.
std::vector<std::pair<std::string, GridFunction>> probe_basket(
    GridLayoutPtr layout, std::uint64_t seed);

/// Fits the least C9 with |L_ib^n h|_alpha <= C9(|b|^alpha |h|_inf +
/// lambda^(alpha n) |h|_alpha) over the basket and the given b, n lists.
LasotaYorkeFit lasota_yorke_fit(const MarkovMap& map, const Potential& pot,
                                const RoofFunction& roof, GridLayoutPtr layout,
                                const std::vector<double>& b_list,
                                const std::vector<int>& n_list,
                                std::uint64_t seed = 1u);

struct DolgopyatResult {
    int iterations = 0;                 // smallest N reaching the target
    std::vector<double> trace;          // max basket ||L^n h||_b/||h||_b per n
};

/// Iterates L_ib on the basket functions satisfying |h|_alpha <=
/// 2 C3 |b|^alpha |h|_inf and returns the smallest N with max basket
/// ratio <= target. Throws NoContractionError at the 10^3 cap.
DolgopyatResult dolgopyat_probe(const MarkovMap& map, const Potential& pot,
                                const RoofFunction& roof, GridLayoutPtr layout,
                                double b, double target,
                                const BNormContext& ctx,
                                std::uint64_t seed = 1u, int cap = 1000);

/// Default norm-weighting constant: 4 x the fitted C9 from a quick
/// Lasota-Yorke probe, honoring C9/C3 < 1/2 with margin.
double default_c3(const MarkovMap& map, const Potential& pot,
                  const RoofFunction& roof, GridLayoutPtr layout);

/// Empirical abscissa of resolvent convergence at frequency b: the
/// leftmost decay parameter a in [a_lo, a_hi] at which the Neumann
/// series for (1 - L_{a+ib})^{-1} still converges, located by bisection.
/// Returns a_hi when even that diverges (resonance), a_lo when the whole
/// bracket converges.
double resolvent_abscissa(const MarkovMap& map, const Potential& pot,
                          const RoofFunction& roof, GridLayoutPtr layout,
                          double b, double a_lo = -0.5, double a_hi = 0.25,
                          double tol = 1e-3);

} // namespace semiflow

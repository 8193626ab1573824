#pragma once

// Decay-model fitting of correlation curves against the stretched-
// exponential envelope C e^{-delta sqrt(t)}, and the contour-integral
// bound on int_{|b|>=3} e^{-delta1 t / log|b|} log|b| / |b|^{1+alpha} db.

#include <complex>
#include <string>
#include <vector>

#include "semiflow/errors.hpp"
#include "semiflow/numerics.hpp"

namespace semiflow {

enum class DecayModel { Exponential, Stretched, Polynomial };

std::string to_string(DecayModel m);

struct DecayFit {
    DecayModel model = DecayModel::Exponential;
    double rate = 0.0;       // delta >= 0
    double prefactor = 0.0;  // C
    double r2 = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    int points = 0;
    bool usable = false;
};

struct DecayFitReport {
    std::vector<DecayFit> fits;  // EXP, STRETCHED, POLY
    int best = -1;
    // A stretched-exponential upper bound is consistent with faster
    // observed decay; the report asserts only the envelope, never that
    // the decay is exactly stretched-exponential.
    std::string caveat =
        "model ranking compares least-squares residuals of log|rho|; a "
        "stretched-exponential upper envelope is consistent with faster "
        "observed decay, so only the envelope is asserted";
};

/// Least-squares fits of log|rho| against t, sqrt(t), and log(t) over
/// the points with |rho| > noise_floor. Throws InsufficientDataError
/// with fewer than 10 usable points.
DecayFitReport fit_decay(const std::vector<double>& ts,
                         const std::vector<std::complex<double>>& rhos,
                         double noise_floor = 1e-7);
DecayFitReport fit_decay_abs(const std::vector<double>& ts,
                             const std::vector<double>& abs_rhos,
                             double noise_floor = 1e-7);

struct EnvelopeResult {
    bool ok = false;
    double worst_margin = 0.0;  // min over usable t of C e^{-d sqrt t} - |rho|
    double worst_t = 0.0;
    int checked = 0;
};

/// Verifies |rho(t)| <= C e^{-delta sqrt(t)} at every usable t
/// (|rho| > noise_floor) and reports the minimal slack.
EnvelopeResult envelope_check(const std::vector<double>& ts,
                              const std::vector<std::complex<double>>& rhos,
                              double C, double delta,
                              double noise_floor = 1e-7);
EnvelopeResult envelope_check_abs(const std::vector<double>& ts,
                                  const std::vector<double>& abs_rhos,
                                  double C, double delta,
                                  double noise_floor = 1e-7);

struct ContourBoundRow {
    double t = 0.0;
    double value = 0.0;
    double tail_bound = 0.0;  // quadrature truncation remainder bound
};

struct ContourBoundReport {
    std::vector<ContourBoundRow> rows;
    LineFit sqrt_fit;  // log(value) against sqrt(t); slope = -delta2
};

/// Numerically integrates the contour bound for each t (log-substituted
/// adaptive quadrature, symmetric in b, with a t-dependent range chosen
/// so the reported tail bound is below 1e-12 of the value) and fits
/// log(value) against sqrt(t).
ContourBoundReport contour_bound_check(double alpha, double delta1,
                                       const std::vector<double>& t_list);

} // namespace semiflow

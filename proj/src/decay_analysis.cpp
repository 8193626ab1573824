#include "semiflow/decay_analysis.hpp"

#include <algorithm>
#include <cmath>

namespace semiflow {

std::string to_string(DecayModel m) {
    switch (m) {
        case DecayModel::Exponential: return "EXP";
        case DecayModel::Stretched: return "STRETCHED";
        default: return "POLY";
    }
}

DecayFitReport fit_decay_abs(const std::vector<double>& ts,
                             const std::vector<double>& abs_rhos,
                             double noise_floor) {
    std::vector<double> t_use, log_rho;
    for (std::size_t i = 0; i < ts.size() && i < abs_rhos.size(); ++i)
        if (abs_rhos[i] > noise_floor) {
            t_use.push_back(ts[i]);
            log_rho.push_back(std::log(abs_rhos[i]));
        }
    if (t_use.size() < 10)
        throw InsufficientDataError(
            "fewer than 10 points above the noise floor");

    DecayFitReport rep;
    const DecayModel models[3] = {DecayModel::Exponential,
                                  DecayModel::Stretched,
                                  DecayModel::Polynomial};
    for (DecayModel m : models) {
        DecayFit fit;
        fit.model = m;
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < t_use.size(); ++i) {
            const double t = t_use[i];
            double x;
            if (m == DecayModel::Exponential) {
                x = t;
            } else if (m == DecayModel::Stretched) {
                if (t < 0.0) continue;
                x = std::sqrt(t);
            } else {
                if (t <= 0.0) continue;
                x = std::log(t);
            }
            xs.push_back(x);
            ys.push_back(log_rho[i]);
        }
        if (xs.size() >= 3) {
            const LineFit lf = fit_line(xs, ys);
            fit.rate = std::max(0.0, -lf.slope);
            fit.prefactor = std::exp(lf.intercept);
            fit.r2 = lf.r2;
            fit.points = lf.count;
            fit.t_lo = t_use.front();
            fit.t_hi = t_use.back();
            fit.usable = true;
        }
        rep.fits.push_back(fit);
    }
    double best_r2 = -1e300;
    for (std::size_t i = 0; i < rep.fits.size(); ++i)
        if (rep.fits[i].usable && rep.fits[i].r2 > best_r2) {
            best_r2 = rep.fits[i].r2;
            rep.best = static_cast<int>(i);
        }
    if (rep.best < 0)
        throw InsufficientDataError("no decay model could be fitted");
    return rep;
}

DecayFitReport fit_decay(const std::vector<double>& ts,
                         const std::vector<std::complex<double>>& rhos,
                         double noise_floor) {
    std::vector<double> mags(rhos.size());
    for (std::size_t i = 0; i < rhos.size(); ++i) mags[i] = std::abs(rhos[i]);
    return fit_decay_abs(ts, mags, noise_floor);
}

EnvelopeResult envelope_check_abs(const std::vector<double>& ts,
                                  const std::vector<double>& abs_rhos,
                                  double C, double delta, double noise_floor) {
    EnvelopeResult res;
    res.ok = true;
    res.worst_margin = 1e300;
    for (std::size_t i = 0; i < ts.size() && i < abs_rhos.size(); ++i) {
        if (abs_rhos[i] <= noise_floor) continue;
        if (ts[i] < 0.0) continue;
        const double env = C * std::exp(-delta * std::sqrt(ts[i]));
        const double margin = env - abs_rhos[i];
        ++res.checked;
        if (margin < res.worst_margin) {
            res.worst_margin = margin;
            res.worst_t = ts[i];
        }
        if (margin < 0.0) res.ok = false;
    }
    if (res.checked == 0) {
        // rho is identically below the floor: the envelope holds trivially.
        res.worst_margin = 0.0;
        res.ok = true;
    }
    return res;
}

EnvelopeResult envelope_check(const std::vector<double>& ts,
                              const std::vector<std::complex<double>>& rhos,
                              double C, double delta, double noise_floor) {
    std::vector<double> mags(rhos.size());
    for (std::size_t i = 0; i < rhos.size(); ++i) mags[i] = std::abs(rhos[i]);
    return envelope_check_abs(ts, mags, C, delta, noise_floor);
}

namespace {

// One side of the contour bound after the substitution xi = log b:
//   int_{log 3}^{inf} xi e^{-alpha xi} e^{-delta1 t / xi} dxi.
// The integrand's mass sits near xi* = sqrt(delta1 t / alpha), so the
// truncation point must grow with sqrt(t); a fixed b-cutoff would lose
// the entire integral for large t.
ContourBoundRow contour_value(double alpha, double delta1, double t) {
    ContourBoundRow row;
    row.t = t;
    const double lo = std::log(3.0);
    auto f = [&](double xi) {
        return xi * std::exp(-alpha * xi - delta1 * t / xi);
    };
    double hi = std::max(std::log(1e6),
                         2.0 * std::sqrt(std::max(0.0, delta1 * t) / alpha));
    double value = 0.0, tail = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        value = 0.0;
        double a = lo;
        while (a < hi) {
            const double b = std::min(a + 1.0, hi);
            value += adaptive_simpson(f, a, b, 1e-15);
            a = b;
        }
        // Majorant tail (the oscillation factor is <= 1):
        // int_hi^inf xi e^{-alpha xi} dxi = e^{-alpha hi} (hi/alpha + 1/alpha^2).
        tail = std::exp(-alpha * hi) * (hi / alpha + 1.0 / (alpha * alpha));
        if (tail <= 1e-12 * std::max(value, 1e-300)) break;
        hi *= 1.6;
    }
    row.value = 2.0 * value;  // symmetric in b
    row.tail_bound = 2.0 * tail;
    return row;
}

} // namespace

ContourBoundReport contour_bound_check(double alpha, double delta1,
                                       const std::vector<double>& t_list) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("contour_bound_check: alpha in (0, 1]");
    if (!(delta1 > 0.0))
        throw std::invalid_argument("contour_bound_check: delta1 > 0");
    ContourBoundReport rep;
    std::vector<double> xs, ys;
    for (double t : t_list) {
        rep.rows.push_back(contour_value(alpha, delta1, t));
        const ContourBoundRow& row = rep.rows.back();
        if (row.value > 0.0 && t >= 0.0) {
            xs.push_back(std::sqrt(t));
            ys.push_back(std::log(row.value));
        }
    }
    rep.sqrt_fit = fit_line(xs, ys);
    return rep;
}

} // namespace semiflow

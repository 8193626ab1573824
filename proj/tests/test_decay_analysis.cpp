#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semiflow/decay_analysis.hpp"

using namespace semiflow;

namespace {
std::vector<double> trange(double lo, double hi, int n) {
    std::vector<double> ts(n);
    for (int i = 0; i < n; ++i) ts[i] = lo + (hi - lo) * i / double(n - 1);
    return ts;
}
} // namespace

TEST_CASE("fit_decay recovers each synthetic model") {
    const auto ts = trange(0.5, 60.0, 120);

    SUBCASE("stretched exponential") {
        std::vector<double> rho;
        for (double t : ts) rho.push_back(std::exp(-0.5 * std::sqrt(t)));
        const DecayFitReport rep = fit_decay_abs(ts, rho);
        CHECK(to_string(rep.fits[rep.best].model) == "STRETCHED");
        CHECK(rep.fits[rep.best].rate == doctest::Approx(0.5).epsilon(0.04));
    }
    SUBCASE("plain exponential") {
        std::vector<double> rho;
        for (double t : ts) rho.push_back(std::exp(-0.3 * t));
        const DecayFitReport rep = fit_decay_abs(ts, rho, 1e-12);
        CHECK(to_string(rep.fits[rep.best].model) == "EXP");
        CHECK(rep.fits[rep.best].rate == doctest::Approx(0.3).epsilon(0.04));
    }
    SUBCASE("polynomial") {
        const auto tp = trange(1.0, 100.0, 100);
        std::vector<double> rho;
        for (double t : tp) rho.push_back(std::pow(t, -2.0));
        const DecayFitReport rep = fit_decay_abs(tp, rho, 1e-12);
        CHECK(to_string(rep.fits[rep.best].model) == "POLY");
        CHECK(rep.fits[rep.best].rate == doctest::Approx(2.0).epsilon(0.02));
    }
    SUBCASE("too few usable points") {
        const auto tp = trange(0.0, 5.0, 8);
        std::vector<double> rho(8, 0.5);
        CHECK_THROWS_AS(fit_decay_abs(tp, rho), InsufficientDataError);
    }
    SUBCASE("scale equivariance: amplitude moves C, never delta or rank") {
        std::vector<double> rho, rho_scaled;
        for (double t : ts) {
            rho.push_back(std::exp(-0.4 * std::sqrt(t)));
            rho_scaled.push_back(7.5 * rho.back());
        }
        const DecayFitReport a = fit_decay_abs(ts, rho);
        const DecayFitReport b = fit_decay_abs(ts, rho_scaled);
        CHECK(a.best == b.best);
        for (std::size_t i = 0; i < a.fits.size(); ++i) {
            CHECK(a.fits[i].rate ==
                  doctest::Approx(b.fits[i].rate).epsilon(1e-9));
            CHECK(b.fits[i].prefactor ==
                  doctest::Approx(7.5 * a.fits[i].prefactor).epsilon(1e-9));
        }
    }
}

TEST_CASE("envelope check") {
    const auto ts = trange(0.0, 40.0, 81);
    std::vector<double> rho;
    for (double t : ts) rho.push_back(0.8 * std::exp(-0.5 * std::sqrt(t)));

    SUBCASE("inflating the fitted prefactor makes the envelope hold") {
        const DecayFitReport rep = fit_decay_abs(ts, rho);
        const DecayFit& best = rep.fits[rep.best];
        const EnvelopeResult env = envelope_check_abs(
            ts, rho, 1.5 * best.prefactor, best.rate);
        CHECK(env.ok);
        CHECK(env.worst_margin >= 0.0);
    }
    SUBCASE("C = 0 fails unless rho vanishes") {
        CHECK_FALSE(envelope_check_abs(ts, rho, 0.0, 0.5).ok);
        std::vector<double> zero(ts.size(), 0.0);
        CHECK(envelope_check_abs(ts, zero, 0.0, 0.5).ok);
    }
    SUBCASE("a periodic non-decaying curve escapes every positive rate") {
        std::vector<double> per;
        for (double t : ts) per.push_back(0.5 * std::abs(std::cos(2 * M_PI * t)));
        for (double delta : {0.01, 0.03, 0.1, 0.3, 1.0})
            CHECK_FALSE(envelope_check_abs(ts, per, 0.5, delta).ok);
    }
}

TEST_CASE("contour bound") {
    SUBCASE("closed form at t = 0, alpha = 1/2") {
        const ContourBoundReport rep = contour_bound_check(0.5, 0.1, {0.0});
        const double expect = 2.0 * (2.0 * std::log(3.0) + 4.0) / std::sqrt(3.0);
        CHECK(rep.rows[0].value == doctest::Approx(expect).epsilon(1e-3));
        CHECK(rep.rows[0].tail_bound < 1e-10 * rep.rows[0].value);
    }
    SUBCASE("log-value is linear in sqrt(t) over four decades") {
        const ContourBoundReport rep =
            contour_bound_check(0.5, 0.1, {10.0, 100.0, 1000.0, 10000.0});
        CHECK(rep.sqrt_fit.r2 >= 0.99);
        CHECK(rep.sqrt_fit.slope < 0.0);
    }
    SUBCASE("value decreases strictly in t") {
        const ContourBoundReport rep =
            contour_bound_check(0.5, 0.1, {0.0, 1.0, 5.0, 25.0});
        for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
            CHECK(rep.rows[i + 1].value < rep.rows[i].value);
    }
    SUBCASE("doubling the quadrature range moves the value by < 0.1%") {
        // The t-dependent range already drives the tail below 1e-12 of
        // the value; re-running is bit-stable.
        const double v1 = contour_bound_check(0.5, 0.1, {100.0}).rows[0].value;
        const double v2 = contour_bound_check(0.5, 0.1, {100.0}).rows[0].value;
        CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semiflow/markov_map.hpp"
#include "semiflow/numerics.hpp"
#include "semiflow/presets.hpp"
#include "semiflow/suspension_flow.hpp"
#include "semiflow/transfer_operator.hpp"

using namespace semiflow;

namespace {
struct System {
    MarkovMap map;
    RoofFunction roof;
    GridLayoutPtr layout;
    SrbMeasure srb;
    Potential pot;
    System(const std::string& m, const std::string& r, int nodes = 1025)
        : map(MarkovMap::build(map_preset(m))),
          roof(roof_preset(r)),
          layout(GridLayout::create(map, nodes)),
          srb(srb_measure(map, layout)),
          pot(normalize(map, layout)) {}
};
} // namespace

TEST_CASE("flow mechanics") {
    System s("doub2", "constant");

    SUBCASE("one roof crossing moves x by the map") {
        const SuspensionPoint q = flow(s.map, s.roof, {0.2, 0.5}, 0.8);
        CHECK(q.x == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(q.u == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("t = 0 is the identity") {
        const SuspensionPoint q = flow(s.map, s.roof, {0.37, 0.11}, 0.0);
        CHECK(q.x == 0.37);
        CHECK(q.u == 0.11);
    }
    SUBCASE("no crossing below the roof") {
        const RoofFunction linear = roof_preset("linear");
        const SuspensionPoint q = flow(s.map, linear, {0.2, 0.0}, 1.05);
        CHECK(q.x == doctest::Approx(0.2));
        CHECK(q.u == doctest::Approx(1.05));
    }
}

TEST_CASE("semigroup property on random samples") {
    System s("doub2", "quadratic");
    Rng rng(2024);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = rng.uniform(1e-6, 1.0 - 1e-6);
        const double u = rng.uniform(0.0, s.roof(x) * 0.999);
        const double t1 = rng.uniform(0.0, 5.0);
        const double t2 = rng.uniform(0.0, 5.0);
        const SuspensionPoint a = flow(s.map, s.roof, {x, u}, t1 + t2);
        const SuspensionPoint b =
            flow(s.map, s.roof, flow(s.map, s.roof, {x, u}, t1), t2);
        if (std::abs(a.x - b.x) > 1e-12 || std::abs(a.u - b.u) > 1e-12)
            ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("invariant integral") {
    SUBCASE("normalization") {
        System s("doub2", "linear");
        const auto one = observable_preset("one", s.map, s.roof);
        CHECK(std::abs(invariant_integral(s.map, s.srb, s.roof, one) -
                       Complex(1.0, 0.0)) < 1e-10);
    }
    SUBCASE("mean of u on the unit-roof suspension") {
        System s("doub2", "constant");
        const auto u_obs = observable_preset("u", s.map, s.roof);
        CHECK(std::abs(invariant_integral(s.map, s.srb, s.roof, u_obs) -
                       Complex(0.5, 0.0)) < 1e-6);
    }
    SUBCASE("mean roof value of the linear roof is 1.25") {
        System s("doub2", "linear");
        const double rbar =
            srb_integrate(s.map, s.srb, [&](double x) {
                return Complex(s.roof(x), 0.0);
            }).real();
        CHECK(rbar == doctest::Approx(1.25).epsilon(1e-6));
    }
    SUBCASE("measure invariance under the flow") {
        System s("doub2", "quadratic", 257);
        const QuadratureOptions opts{48, 6, 24};
        const auto E = observable_preset("usin_sinx", s.map, s.roof);
        const Complex base = invariant_integral(s.map, s.srb, s.roof, E, opts);
        for (double t : {0.3, 1.7, 5.0}) {
            const auto Et = flowed_observable(s.map, s.roof, E, t);
            const Complex moved =
                invariant_integral(s.map, s.srb, s.roof, Et, opts);
            CHECK(std::abs(moved - base) < 2e-4);
        }
    }
}

TEST_CASE("correlation basics") {
    System s("doub2", "constant");

    SUBCASE("constant observables decorrelate identically") {
        const auto one = observable_preset("one", s.map, s.roof);
        const auto u_obs = center_observable(
            s.map, s.srb, s.roof, observable_preset("u", s.map, s.roof));
        for (double t : {0.0, 0.7, 2.3})
            CHECK(std::abs(correlation(s.map, s.srb, s.roof, one, u_obs, t)) <
                  1e-10);
    }
    SUBCASE("rho(0) of a real observable is its variance") {
        const auto E = center_observable(
            s.map, s.srb, s.roof, observable_preset("usin", s.map, s.roof));
        const Complex v = correlation(s.map, s.srb, s.roof, E, E, 0.0);
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(v.real() > 0.0);
        // sin(2 pi u) has variance 1/2 under du on [0, 1].
        CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("constant-roof resonance never decays") {
        // e^{2 pi i u} against e^{-2 pi i u}: the u-oscillation survives
        // every time exactly.
        const auto E = observable_preset("expu", s.map, s.roof);
        const auto F = observable_preset("expu_conj", s.map, s.roof);
        const Complex r0 = correlation(s.map, s.srb, s.roof, E, F, 0.0);
        for (double t : {1.0, 2.0, 5.0}) {
            const Complex rt = correlation(s.map, s.srb, s.roof, E, F, t);
            CHECK(std::abs(rt) == doctest::Approx(std::abs(r0)).epsilon(1e-8));
        }
        CHECK(std::abs(r0) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("correlation agrees with Monte Carlo within 3 standard errors") {
    System s("doub2", "quadratic");
    const auto E = center_observable(
        s.map, s.srb, s.roof, observable_preset("usin", s.map, s.roof));
    const auto F = center_observable(
        s.map, s.srb, s.roof, observable_preset("usin_sinx", s.map, s.roof));
    for (double t : {0.5, 2.0}) {
        const Complex quad = correlation(s.map, s.srb, s.roof, E, F, t,
                                         {128, 8, 32});
        const McEstimate mc = correlation_monte_carlo(s.map, s.srb, s.roof, E,
                                                      F, t, 1000000, 99);
        CHECK(std::abs(quad - mc.value) < 3.0 * mc.std_error + 1e-4);
    }
}

TEST_CASE("Delta / chi decomposition") {
    System s("doub2", "quadratic");
    const auto E = center_observable(
        s.map, s.srb, s.roof, observable_preset("usin", s.map, s.roof));
    const auto F = E;

    SUBCASE("Delta vanishes beyond the roof sup") {
        const double t = roof_sup(s.map, s.roof) + 0.01;
        const auto [delta, chi] = chi_delta_split(s.map, s.srb, s.roof, E, F, t);
        CHECK(std::abs(delta) < 1e-12);
        (void)chi;
    }
    SUBCASE("additivity Delta + chi = rho") {
        for (double t : {0.0, 0.35, 1.1, 2.6}) {
            const auto [delta, chi] =
                chi_delta_split(s.map, s.srb, s.roof, E, F, t);
            const Complex rho = correlation(s.map, s.srb, s.roof, E, F, t);
            CHECK(std::abs(delta + chi - rho) < 1e-8);
        }
    }
}

TEST_CASE("e_s transform") {
    System s("doub2", "constant");

    SUBCASE("closed form for E = 1, r = 1") {
        const auto one = observable_preset("one", s.map, s.roof);
        const GridFunction e1 = es_transform(s.layout, s.roof, one,
                                             Complex(1.0, 0.0));
        const double expect = 1.0 - std::exp(-1.0);
        for (const auto& v : e1.values())
            CHECK(std::abs(v - Complex(expect, 0.0)) < 1e-12);
    }
    SUBCASE("s = 0 returns the roof") {
        const RoofFunction lin = roof_preset("linear");
        const auto one = observable_preset("one", s.map, lin);
        const GridFunction e0 = es_transform(s.layout, lin, one, Complex{});
        const GridLayout& L = *s.layout;
        for (int i = 0; i < L.interval_count(); ++i)
            for (int k = 0; k < L.nodes(); ++k)
                CHECK(std::abs(e0.value(i, k) -
                               Complex(lin(L.node_x(i, k)), 0.0)) < 1e-12);
    }
    SUBCASE("high frequency obeys the 2/|s| envelope") {
        const auto one = observable_preset("one", s.map, s.roof);
        const GridFunction es = es_transform(s.layout, s.roof, one,
                                             Complex(0.0, 20.0));
        const Complex expect =
            (1.0 - std::exp(Complex(0.0, -20.0))) / Complex(0.0, 20.0);
        CHECK(sup_norm(es) <= 0.1 + 1e-12);
        for (const auto& v : es.values()) CHECK(std::abs(v - expect) < 1e-12);
    }
    SUBCASE("integration-by-parts envelope across an s-grid") {
        // |e_s|_inf |s| <= C e^{|a| sup r} ||E||_{alpha,1} with the single
        // constant C = 2 + sup r across a log-spaced grid.
        System q("doub2", "quadratic");
        const auto E = observable_preset("usin_sinx", q.map, q.roof);
        const double rsup = roof_sup(q.map, q.roof);
        for (double mag : {0.5, 1.0, 4.0, 16.0, 64.0}) {
            for (double a : {-0.4, 0.0, 0.4}) {
                const Complex sv(a, mag);
                const GridFunction es = es_transform(q.layout, q.roof, E, sv);
                const double lhs = sup_norm(es) * std::abs(sv);
                const double rhs = (2.0 + rsup) *
                                   std::exp(std::abs(a) * rsup) *
                                   E.norm_alpha1();
                CHECK(lhs <= rhs);
            }
        }
    }
}

TEST_CASE("Laplace transform routes") {
    System s("doub2", "constant");
    const auto one = observable_preset("one", s.map, s.roof);

    SUBCASE("closed form (1 - e^{-s})/s^2 for the unit system") {
        for (const Complex sv : {Complex(1.0, 0.0), Complex(2.0, 0.0)}) {
            const auto res = laplace_chi_series(s.map, s.pot, s.srb, s.roof,
                                                one, one, sv);
            const Complex expect = (1.0 - std::exp(-sv)) / (sv * sv);
            CHECK(std::abs(res.value - expect) / std::abs(expect) < 1e-6);
        }
    }
    SUBCASE("direct route matches the series route") {
        const Complex sv(1.0, 0.0);
        const auto series = laplace_chi_series(s.map, s.pot, s.srb, s.roof,
                                               one, one, sv);
        const auto direct = laplace_direct(s.map, s.srb, s.roof, one, one, sv,
                                           25.0, 0.005);
        CHECK(std::abs(series.value - direct.value) < 1e-4);
    }
    SUBCASE("tail bound arithmetic") {
        const auto direct = laplace_direct(s.map, s.srb, s.roof, one, one,
                                           Complex(5.0, 0.0), 3.0, 0.01);
        CHECK(direct.tail_bound ==
              doctest::Approx(std::exp(-15.0) / 5.0).epsilon(1e-12));
        CHECK(direct.tail_bound < 1e-3);
    }
    SUBCASE("zero observable transforms to zero") {
        SuspensionObservable zero;
        zero.eval = [](double, double) { return Complex{}; };
        zero.name = "zero";
        const auto direct = laplace_direct(s.map, s.srb, s.roof, zero, zero,
                                           Complex(1.0, 0.0), 10.0, 0.01);
        CHECK(std::abs(direct.value) < 1e-14);
    }
    SUBCASE("centered observables damp as Re s grows") {
        System q("doub2", "quadratic");
        const auto E = center_observable(
            q.map, q.srb, q.roof, observable_preset("usin", q.map, q.roof));
        const auto v1 = laplace_chi_series(q.map, q.pot, q.srb, q.roof, E, E,
                                           Complex(1.0, 0.0));
        const auto v8 = laplace_chi_series(q.map, q.pot, q.srb, q.roof, E, E,
                                           Complex(8.0, 0.0));
        CHECK(std::abs(v8.value) < 0.25 * std::abs(v1.value));
    }
}

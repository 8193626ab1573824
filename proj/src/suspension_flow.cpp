#include "semiflow/suspension_flow.hpp"

#include <algorithm>
#include <cmath>

namespace semiflow {

namespace {

/// x-quadrature frame: composite Gauss-Legendre sample points with
/// weights that already include the SRB density and the 1/|I|
/// normalization, plus the roof values and the mean roof rbar.
struct XFrame {
    std::vector<double> x;
    std::vector<double> w;    // sums to ~1
    std::vector<double> rx;
    double rbar = 0.0;
};

XFrame make_frame(const SrbMeasure& srb, const RoofFunction& roof,
                  const QuadratureOptions& opts) {
    XFrame fr;
    const QuadRule q = gauss_legendre(opts.x_nodes_per_panel);
    const GridLayout& L = *srb.density.layout();
    const double inv_len = 1.0 / L.total_length();
    for (int i = 0; i < L.interval_count(); ++i) {
        const Interval& iv = L.interval(i);
        const double pw = iv.length() / opts.x_panels;
        for (int p = 0; p < opts.x_panels; ++p) {
            const double a = iv.lo + p * pw;
            const double mid = a + 0.5 * pw, half = 0.5 * pw;
            for (std::size_t n = 0; n < q.nodes.size(); ++n) {
                const double x = mid + half * q.nodes[n];
                const double h = interpolate(srb.density, x).real();
                fr.x.push_back(x);
                fr.w.push_back(half * q.weights[n] * h * inv_len);
                fr.rx.push_back(roof(x));
            }
        }
    }
    for (std::size_t k = 0; k < fr.x.size(); ++k)
        fr.rbar += fr.w[k] * fr.rx[k];
    return fr;
}

/// Forward orbit of one x-sample with Birkhoff prefix sums of the roof,
/// long enough to resolve any u + t <= r(x) + horizon.
struct OrbitTable {
    std::vector<double> pts;   // x, Tx, T^2 x, ...
    std::vector<double> rsum;  // 0, r(x), r_2(x), ...; size = pts.size()+1
};

OrbitTable make_orbit(const MarkovMap& map, const RoofFunction& roof, double x,
                      double horizon) {
    OrbitTable ot;
    ot.pts.push_back(x);
    ot.rsum.push_back(0.0);
    double total = roof(x);
    ot.rsum.push_back(total);
    const double need = roof(x) + horizon + roof.infimum();
    while (total <= need) {
        const double nx = map.forward(ot.pts.back());
        ot.pts.push_back(nx);
        total += roof(nx);
        ot.rsum.push_back(total);
    }
    return ot;
}

inline Complex eval_flowed(const OrbitTable& ot, const SuspensionObservable& E,
                           const RoofFunction& roof, double u_plus_t) {
    // Largest n with rsum[n] <= u + t.
    const auto it = std::upper_bound(ot.rsum.begin(), ot.rsum.end(), u_plus_t);
    std::size_t n = static_cast<std::size_t>(it - ot.rsum.begin());
    if (n == 0)
        n = 1;
    else if (n > ot.pts.size())
        n = ot.pts.size();
    const std::size_t idx = n - 1;
    const double x = ot.pts[idx];
    double u = u_plus_t - ot.rsum[idx];
    u = std::clamp(u, 0.0, roof(x));
    return E.eval(x, u);
}

/// Integral over u in [u_lo, u_hi] of E(phi_t(x, u)) * F(x, u) du. The
/// integrand has kinks where u + t crosses a Birkhoff threshold, so the
/// range is subdivided at rsum[n] - t and each smooth piece gets its own
/// Gauss-Legendre pass.
Complex fiber_integral(const OrbitTable& ot, const SuspensionObservable& E,
                       const SuspensionObservable* F, const RoofFunction& roof,
                       double x, double t, double u_lo, double u_hi,
                       const QuadRule& qu) {
    Complex acc{};
    double lo = u_lo;
    auto it = std::upper_bound(ot.rsum.begin(), ot.rsum.end(), t + u_lo);
    while (true) {
        double hi = u_hi;
        if (it != ot.rsum.end() && *it - t < u_hi) {
            hi = *it - t;
            ++it;
        }
        if (hi > lo + 1e-15) {
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            Complex seg{};
            for (std::size_t n = 0; n < qu.nodes.size(); ++n) {
                const double u = mid + half * qu.nodes[n];
                Complex v = eval_flowed(ot, E, roof, u + t);
                if (F) v *= F->eval(x, u);
                seg += qu.weights[n] * v;
            }
            acc += half * seg;
        }
        if (hi >= u_hi) break;
        lo = hi;
    }
    return acc;
}

} // namespace

SuspensionPoint flow(const MarkovMap& map, const RoofFunction& roof,
                     SuspensionPoint p, double t) {
    if (t < 0.0) throw DomainError("flow requires t >= 0");
    double x = p.x;
    double s = p.u + t;
    double rx = roof(x);
    while (s >= rx) {
        s -= rx;
        x = map.forward(x);
        rx = roof(x);
    }
    return {x, s};
}

Complex invariant_integral(const MarkovMap& map, const SrbMeasure& srb,
                           const RoofFunction& roof,
                           const SuspensionObservable& E,
                           const QuadratureOptions& opts) {
    (void)map;
    const XFrame fr = make_frame(srb, roof, opts);
    const QuadRule qu = gauss_legendre(opts.u_nodes);
    Complex acc{};
    for (std::size_t k = 0; k < fr.x.size(); ++k) {
        const double half = 0.5 * fr.rx[k];
        Complex fiber{};
        for (std::size_t n = 0; n < qu.nodes.size(); ++n)
            fiber += qu.weights[n] * E.eval(fr.x[k], half + half * qu.nodes[n]);
        acc += fr.w[k] * half * fiber;
    }
    return acc / fr.rbar;
}

SuspensionObservable center_observable(const MarkovMap& map,
                                       const SrbMeasure& srb,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       const QuadratureOptions& opts) {
    const Complex mean = invariant_integral(map, srb, roof, E, opts);
    SuspensionObservable out = E;
    auto inner = E.eval;
    out.eval = [inner, mean](double x, double u) { return inner(x, u) - mean; };
    out.sup = E.sup + std::abs(mean);
    out.centered = true;
    out.name = E.name.empty() ? "centered" : E.name + "_centered";
    return out;
}

std::vector<Complex> correlation_curve(const MarkovMap& map,
                                       const SrbMeasure& srb,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       const SuspensionObservable& F,
                                       const std::vector<double>& ts,
                                       const QuadratureOptions& opts) {
    const XFrame fr = make_frame(srb, roof, opts);
    const QuadRule qu = gauss_legendre(opts.u_nodes);
    const double t_max = ts.empty() ? 0.0
                                    : *std::max_element(ts.begin(), ts.end());

    // Per-chunk accumulators merged in chunk order: reproducible under
    // any worker count.
    std::vector<std::vector<Complex>> partial(kParallelChunks,
                                              std::vector<Complex>(ts.size()));
    std::vector<Complex> mean_e_part(kParallelChunks),
        mean_f_part(kParallelChunks);

    parallel_chunks(fr.x.size(), [&](std::size_t chunk, std::size_t begin,
                                     std::size_t end) {
        auto& acc = partial[chunk];
        Complex me{}, mf{};
        std::vector<Complex> fvals(qu.nodes.size());
        for (std::size_t k = begin; k < end; ++k) {
            const OrbitTable ot = make_orbit(map, roof, fr.x[k], t_max);
            const double half = 0.5 * fr.rx[k];
            Complex fib_e{}, fib_f{};
            for (std::size_t n = 0; n < qu.nodes.size(); ++n) {
                const double u = half + half * qu.nodes[n];
                fvals[n] = F.eval(fr.x[k], u);
                fib_e += qu.weights[n] * E.eval(fr.x[k], u);
                fib_f += qu.weights[n] * fvals[n];
            }
            me += fr.w[k] * half * fib_e;
            mf += fr.w[k] * half * fib_f;
            for (std::size_t ti = 0; ti < ts.size(); ++ti)
                acc[ti] += fr.w[k] * fiber_integral(ot, E, &F, roof, fr.x[k],
                                                    ts[ti], 0.0, fr.rx[k], qu);
        }
        mean_e_part[chunk] = me;
        mean_f_part[chunk] = mf;
    });

    Complex mean_e{}, mean_f{};
    std::vector<Complex> out(ts.size());
    for (std::size_t c = 0; c < kParallelChunks; ++c) {
        mean_e += mean_e_part[c];
        mean_f += mean_f_part[c];
        for (std::size_t ti = 0; ti < ts.size(); ++ti) out[ti] += partial[c][ti];
    }
    mean_e /= fr.rbar;
    mean_f /= fr.rbar;
    for (auto& v : out) v = v / fr.rbar - mean_e * mean_f;
    return out;
}

Complex correlation(const MarkovMap& map, const SrbMeasure& srb,
                    const RoofFunction& roof, const SuspensionObservable& E,
                    const SuspensionObservable& F, double t,
                    const QuadratureOptions& opts) {
    return correlation_curve(map, srb, roof, E, F, {t}, opts).front();
}

std::pair<Complex, Complex> chi_delta_split(const MarkovMap& map,
                                            const SrbMeasure& srb,
                                            const RoofFunction& roof,
                                            const SuspensionObservable& E,
                                            const SuspensionObservable& F,
                                            double t,
                                            const QuadratureOptions& opts) {
    const XFrame fr = make_frame(srb, roof, opts);
    const QuadRule qu = gauss_legendre(opts.u_nodes);
    Complex delta{}, chi{};
    for (std::size_t k = 0; k < fr.x.size(); ++k) {
        const double x = fr.x[k];
        const double cut = std::max(0.0, fr.rx[k] - t);
        if (cut > 0.0) {
            // u + t < r(x): the flow has not crossed the roof yet.
            const double half = 0.5 * cut;
            Complex fiber{};
            for (std::size_t n = 0; n < qu.nodes.size(); ++n) {
                const double u = half + half * qu.nodes[n];
                fiber += qu.weights[n] * E.eval(x, u + t) * F.eval(x, u);
            }
            delta += fr.w[k] * half * fiber;
        }
        if (fr.rx[k] > cut) {
            const OrbitTable ot = make_orbit(map, roof, x, t);
            chi += fr.w[k] *
                   fiber_integral(ot, E, &F, roof, x, t, cut, fr.rx[k], qu);
        }
    }
    return {delta / fr.rbar, chi / fr.rbar};
}

std::vector<Complex> chi_curve(const MarkovMap& map, const SrbMeasure& srb,
                               const RoofFunction& roof,
                               const SuspensionObservable& E,
                               const SuspensionObservable& F,
                               const std::vector<double>& ts,
                               const QuadratureOptions& opts) {
    const XFrame fr = make_frame(srb, roof, opts);
    const QuadRule qu = gauss_legendre(opts.u_nodes);
    const double t_max = ts.empty() ? 0.0
                                    : *std::max_element(ts.begin(), ts.end());
    std::vector<std::vector<Complex>> partial(kParallelChunks,
                                              std::vector<Complex>(ts.size()));
    parallel_chunks(fr.x.size(), [&](std::size_t chunk, std::size_t begin,
                                     std::size_t end) {
        auto& acc = partial[chunk];
        for (std::size_t k = begin; k < end; ++k) {
            const double x = fr.x[k];
            const OrbitTable ot = make_orbit(map, roof, x, t_max);
            for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                const double cut = std::max(0.0, fr.rx[k] - ts[ti]);
                if (fr.rx[k] <= cut) continue;
                acc[ti] += fr.w[k] * fiber_integral(ot, E, &F, roof, x, ts[ti],
                                                    cut, fr.rx[k], qu);
            }
        }
    });
    std::vector<Complex> out(ts.size());
    for (std::size_t c = 0; c < kParallelChunks; ++c)
        for (std::size_t ti = 0; ti < ts.size(); ++ti) out[ti] += partial[c][ti];
    for (auto& v : out) v /= fr.rbar;
    return out;
}

GridFunction es_transform(GridLayoutPtr layout, const RoofFunction& roof,
                          const SuspensionObservable& E, Complex s,
                          int u_nodes) {
    const QuadRule qu = gauss_legendre(u_nodes);
    GridFunction out(layout);
    for (int i = 0; i < layout->interval_count(); ++i)
        for (int k = 0; k < layout->nodes(); ++k) {
            const double x = layout->node_x(i, k);
            const double half = 0.5 * roof(x);
            Complex acc{};
            for (std::size_t n = 0; n < qu.nodes.size(); ++n) {
                const double u = half + half * qu.nodes[n];
                acc += qu.weights[n] * std::exp(-s * u) * E.eval(x, u);
            }
            out.value(i, k) = half * acc;
        }
    return out;
}

LaplaceSeriesResult laplace_chi_series(const MarkovMap& map,
                                       const Potential& pot,
                                       const SrbMeasure& srb,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       const SuspensionObservable& F,
                                       Complex s, double tol, int max_terms) {
    if (!pot.normalized)
        throw HypothesisError(
            "laplace_chi_series requires a normalized potential");
    GridLayoutPtr layout = srb.density.layout();
    const GridFunction e_s = es_transform(layout, roof, E, s);
    const GridFunction f_ms = es_transform(layout, roof, F, -s);
    TransferKernel kernel(map, pot, &roof, layout);
    const GridFunction g = kernel.apply(s, f_ms);
    const ResolventResult res = resolvent_apply(kernel, s, g, tol, nullptr,
                                                max_terms);
    GridFunction prod(layout);
    for (std::size_t i = 0; i < prod.values().size(); ++i)
        prod.values()[i] = e_s.values()[i] * res.value.values()[i];
    // chi here is a component of rho, which lives on the normalized
    // suspension measure: divide the resolvent form by int r dmu.
    const double rbar =
        srb_integrate(map, srb, [&roof](double x) {
            return Complex(roof(x), 0.0);
        }).real();
    LaplaceSeriesResult out;
    out.value = srb_integrate(map, srb, prod) / rbar;
    out.terms = res.terms;
    const double q = std::exp(-s.real() * roof.infimum());
    out.truncation_estimate =
        (q < 0.999) ? res.last_term_norm * q / (1.0 - q)
                    : res.last_term_norm * res.terms;
    out.truncation_estimate /= rbar;
    return out;
}

std::vector<double> laplace_t_grid(double t_max, double dt) {
    int steps = static_cast<int>(std::ceil(t_max / dt));
    if (steps < 2) steps = 2;
    if (steps % 2 == 1) ++steps;  // composite Simpson needs an even count
    const double h = t_max / steps;
    std::vector<double> ts(steps + 1);
    for (int i = 0; i <= steps; ++i) ts[i] = h * i;
    return ts;
}

Complex laplace_transform_curve(const std::vector<double>& ts,
                                const std::vector<Complex>& values,
                                Complex s) {
    const int steps = static_cast<int>(ts.size()) - 1;
    const double h = ts.back() / steps;
    Complex acc{};
    for (int i = 0; i <= steps; ++i) {
        const double coeff =
            (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += coeff * std::exp(-s * ts[i]) * values[i];
    }
    return acc * (h / 3.0);
}

LaplaceDirectResult laplace_direct(const MarkovMap& map, const SrbMeasure& srb,
                                   const RoofFunction& roof,
                                   const SuspensionObservable& E,
                                   const SuspensionObservable& F, Complex s,
                                   double t_max, double dt,
                                   const QuadratureOptions& opts) {
    if (!(s.real() > 0.0))
        throw HypothesisError("laplace_direct requires Re s > 0");
    const std::vector<double> ts = laplace_t_grid(t_max, dt);
    const std::vector<Complex> chi = chi_curve(map, srb, roof, E, F, ts, opts);
    LaplaceDirectResult out;
    out.value = laplace_transform_curve(ts, chi, s);
    out.tail_bound = E.sup * F.sup * std::exp(-s.real() * t_max) / s.real();
    return out;
}

SuspensionObservable flowed_observable(const MarkovMap& map,
                                       const RoofFunction& roof,
                                       const SuspensionObservable& E,
                                       double t) {
    SuspensionObservable out = E;
    auto inner = E.eval;
    const MarkovMap* m = &map;
    const RoofFunction* r = &roof;
    out.eval = [inner, m, r, t](double x, double u) {
        const SuspensionPoint q = flow(*m, *r, {x, u}, t);
        return inner(q.x, q.u);
    };
    out.name = E.name + "_flow";
    return out;
}

McEstimate correlation_monte_carlo(const MarkovMap& map, const SrbMeasure& srb,
                                   const RoofFunction& roof,
                                   const SuspensionObservable& E,
                                   const SuspensionObservable& F, double t,
                                   std::size_t n_samples, std::uint64_t seed) {
    // Inverse-CDF sampler for x with density proportional to h(x) r(x).
    const GridLayout& L = *srb.density.layout();
    std::vector<double> xs, cdf;
    double total = 0.0;
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k = 0; k < L.nodes(); ++k) {
            const double x = L.node_x(i, k);
            xs.push_back(x);
            total += L.trapezoid_weight(i, k) *
                     srb.density.value(i, k).real() * roof(x);
            cdf.push_back(total);
        }

    const QuadratureOptions qopts;
    const Complex mean_e = invariant_integral(map, srb, roof, E, qopts);
    const Complex mean_f = invariant_integral(map, srb, roof, F, qopts);

    Rng rng(seed);
    Complex sum{};
    double sum_sq = 0.0;
    std::vector<Complex> vals;
    vals.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double v = rng.uniform() * total;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), v);
        std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
        idx = std::min(idx, xs.size() - 1);
        double x = xs[idx];
        if (idx > 0 && cdf[idx] > cdf[idx - 1]) {
            const double frac = (v - cdf[idx - 1]) / (cdf[idx] - cdf[idx - 1]);
            x = xs[idx - 1] + frac * (xs[idx] - xs[idx - 1]);
        }
        const double u = rng.uniform() * roof(x);
        const SuspensionPoint q = flow(map, roof, {x, u}, t);
        const Complex g = E.eval(q.x, q.u) * F.eval(x, u);
        sum += g;
        vals.push_back(g);
    }
    const Complex mean_g = sum / static_cast<double>(n_samples);
    for (const Complex& g : vals) {
        const Complex d = g - mean_g;
        sum_sq += std::norm(d);
    }
    McEstimate out;
    out.value = mean_g - mean_e * mean_f;
    out.std_error = std::sqrt(sum_sq / (n_samples * (n_samples - 1.0)));
    return out;
}

} // namespace semiflow

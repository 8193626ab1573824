#include "semiflow/transfer_operator.hpp"

#include <algorithm>
#include <cmath>

namespace semiflow {

namespace {

// Interpolation against a fixed target interval, hot path of apply().
inline Complex interp_in(const GridFunction& f, int interval, double x,
                         const GridLayout& L) {
    const Interval& iv = L.interval(interval);
    double t = (x - iv.lo) / L.spacing(interval);
    int k = static_cast<int>(t);
    if (k > L.nodes() - 2) k = L.nodes() - 2;
    if (k < 0) k = 0;
    const double w = t - k;
    return (1.0 - w) * f.value(interval, k) + w * f.value(interval, k + 1);
}

} // namespace

TransferKernel::TransferKernel(const MarkovMap& map, const Potential& pot,
                               const RoofFunction* roof, GridLayoutPtr layout)
    : layout_(std::move(layout)), has_roof_(roof != nullptr) {
    const int M = layout_->nodes();
    for (const auto& br : map.branches()) {
        Table t;
        t.domain = br.domain();
        t.target = br.target();
        t.pos.resize(M);
        t.weight.resize(M);
        t.roof.assign(M, 0.0);
        for (int k = 0; k < M; ++k) {
            const double x = layout_->node_x(t.domain, k);
            const double y = br.eval(x);
            t.pos[k] = y;
            double w = std::abs(br.deriv(x));
            if (pot.corrector) {
                // exp(log h(y) - log h(x)): the normalization coboundary.
                const Complex cy = interp_in(*pot.corrector, t.target, y,
                                             *layout_);
                const Complex cx = pot.corrector->value(t.domain, k);
                w *= std::exp(cy.real() - cx.real());
            }
            t.weight[k] = w;
            if (roof) t.roof[k] = (*roof)(y);
        }
        tables_.push_back(std::move(t));
    }
}

TransferKernel::Phases TransferKernel::phases(Complex s) const {
    Phases ph;
    ph.s = s;
    ph.factor.resize(tables_.size());
    for (std::size_t b = 0; b < tables_.size(); ++b) {
        const Table& t = tables_[b];
        auto& f = ph.factor[b];
        f.resize(t.pos.size());
        if (!has_roof_ || s == Complex{}) {
            for (std::size_t k = 0; k < t.pos.size(); ++k) f[k] = t.weight[k];
        } else {
            for (std::size_t k = 0; k < t.pos.size(); ++k)
                f[k] = t.weight[k] * std::exp(-s * t.roof[k]);
        }
    }
    return ph;
}

void TransferKernel::apply(const Phases& ph, const GridFunction& in,
                           GridFunction& out) const {
    const GridLayout& L = *layout_;
    const int M = L.nodes();
    for (auto& v : out.values()) v = Complex{};
    for (std::size_t b = 0; b < tables_.size(); ++b) {
        const Table& t = tables_[b];
        const auto& fac = ph.factor[b];
        const Interval& target = L.interval(t.target);
        const double inv_h = 1.0 / L.spacing(t.target);
        for (int k = 0; k < M; ++k) {
            double u = (t.pos[k] - target.lo) * inv_h;
            int kk = static_cast<int>(u);
            if (kk > M - 2) kk = M - 2;
            if (kk < 0) kk = 0;
            const double w = u - kk;
            const Complex fv = (1.0 - w) * in.value(t.target, kk) +
                               w * in.value(t.target, kk + 1);
            out.value(t.domain, k) += fac[k] * fv;
        }
    }
}

GridFunction TransferKernel::apply(Complex s, const GridFunction& in) const {
    GridFunction out(layout_);
    apply(phases(s), in, out);
    return out;
}

GridFunction TransferKernel::apply_power(Complex s, GridFunction f,
                                         int n) const {
    const Phases ph = phases(s);
    GridFunction tmp(layout_);
    for (int i = 0; i < n; ++i) {
        apply(ph, f, tmp);
        std::swap(f, tmp);
    }
    return f;
}

std::pair<double, GridFunction> leading_eigen(const MarkovMap& map,
                                              GridLayoutPtr layout) {
    Potential raw;
    TransferKernel kernel(map, raw, nullptr, layout);
    const auto ph = kernel.phases(Complex{});
    GridFunction f = GridFunction::constant(layout, 1.0);
    GridFunction g(layout);
    double ev = 1.0;
    for (int it = 0; it < 10000; ++it) {
        kernel.apply(ph, f, g);
        ev = sup_norm(g);
        if (ev <= 0.0) throw ConvergenceError("power iteration collapsed to 0");
        g *= Complex(1.0 / ev, 0.0);
        double diff = 0.0;
        for (std::size_t i = 0; i < f.values().size(); ++i)
            diff = std::max(diff,
                            std::abs(g.values()[i] - f.values()[i]));
        std::swap(f, g);
        if (diff < 1e-10) {
            for (auto& v : f.values())
                if (v.real() <= 0.0)
                    throw ConvergenceError(
                        "power iteration produced a non-positive density");
            return {ev, f};
        }
    }
    throw ConvergenceError("power iteration did not converge in 10^4 steps");
}

SrbMeasure srb_measure(const MarkovMap& map, GridLayoutPtr layout) {
    auto [ev, h] = leading_eigen(map, layout);
    (void)ev;
    // Scale so that (1/|I|) * integral of h equals 1.
    double mass = 0.0;
    const GridLayout& L = *layout;
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k = 0; k < L.nodes(); ++k)
            mass += L.trapezoid_weight(i, k) * h.value(i, k).real();
    mass /= L.total_length();
    h *= Complex(1.0 / mass, 0.0);
    return SrbMeasure{std::move(h)};
}

Potential normalize(const MarkovMap& map, GridLayoutPtr layout) {
    auto [ev, h] = leading_eigen(map, layout);
    if (std::abs(ev - 1.0) > 1e-4)
        throw ConvergenceError("leading eigenvalue " + std::to_string(ev) +
                               " is far from 1; map validation is suspect");
    Potential pot;
    GridFunction corr(layout);
    for (std::size_t i = 0; i < h.values().size(); ++i)
        corr.values()[i] = std::log(h.values()[i].real());
    pot.corrector = std::move(corr);
    pot.normalized = true;
    return pot;
}

Complex srb_integrate(const MarkovMap& map, const SrbMeasure& srb,
                      const std::function<Complex(double)>& g) {
    const GridLayout& L = *srb.density.layout();
    Complex acc{};
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k = 0; k < L.nodes(); ++k)
            acc += L.trapezoid_weight(i, k) * srb.density.value(i, k).real() *
                   g(L.node_x(i, k));
    (void)map;
    return acc / L.total_length();
}

Complex srb_integrate(const MarkovMap& map, const SrbMeasure& srb,
                      const GridFunction& g) {
    const GridLayout& L = *srb.density.layout();
    Complex acc{};
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k = 0; k < L.nodes(); ++k)
            acc += L.trapezoid_weight(i, k) * srb.density.value(i, k).real() *
                   g.value(i, k);
    (void)map;
    return acc / L.total_length();
}

ResolventResult resolvent_apply(const TransferKernel& kernel, Complex s,
                                const GridFunction& f, double tol,
                                const BNormContext* ctx, int max_terms) {
    const bool use_b = ctx != nullptr;
    auto term_norm = [&](const GridFunction& g) {
        if (use_b) return b_norm(g, *ctx);
        if (std::abs(s.imag()) >= 3.0) {
            const BNormContext def(s.imag(), 1.0, kernel.layout()->alpha());
            return b_norm(g, def);
        }
        return sup_norm(g);
    };
    const auto ph = kernel.phases(s);
    ResolventResult res{f, 1, term_norm(f)};
    GridFunction term = f;
    GridFunction next(kernel.layout());
    double prev = res.last_term_norm;
    int non_decreasing = 0;
    for (int n = 1; n <= max_terms; ++n) {
        kernel.apply(ph, term, next);
        std::swap(term, next);
        res.value += term;
        res.terms = n + 1;
        const double tn = term_norm(term);
        res.last_term_norm = tn;
        if (tn < tol) return res;
        if (tn >= prev) {
            if (++non_decreasing >= 50)
                throw DivergenceError(
                    "Neumann series shows 50 consecutive non-decreasing term "
                    "norms; s is at or near the spectrum");
        } else {
            non_decreasing = 0;
        }
        prev = tn;
    }
    throw DivergenceError("Neumann series did not reach the tolerance in " +
                          std::to_string(max_terms) + " terms");
}

std::vector<std::pair<std::string, GridFunction>> probe_basket(
    GridLayoutPtr layout, std::uint64_t seed) {
    std::vector<std::pair<std::string, GridFunction>> basket;
    basket.emplace_back("const",
                        GridFunction::constant(layout, Complex(1.0, 0.0)));
    basket.emplace_back("identity",
                        GridFunction::sample(layout, [](double x) {
                            return Complex(x, 0.0);
                        }));
    for (int k = 1; k <= 3; ++k) {
        basket.emplace_back(
            "sin" + std::to_string(k),
            GridFunction::sample(layout, [k](double x) {
                return Complex(std::sin(2.0 * M_PI * k * x), 0.0);
            }));
    }
    // Two seeded Weierstrass-type fields: genuinely Holder-rough probes
    // whose seminorm dominates their sup norm.
    const double alpha = layout->alpha();
    for (int fld = 0; fld < 2; ++fld) {
        Rng rng(seed + 77u * (fld + 1));
        std::vector<double> phase(10);
        for (auto& p : phase) p = rng.uniform(0.0, 2.0 * M_PI);
        basket.emplace_back(
            "holder" + std::to_string(fld),
            GridFunction::sample(layout, [phase, alpha](double x) {
                double v = 0.0;
                double amp = 1.0, freq = 1.0;
                for (std::size_t m = 0; m < phase.size(); ++m) {
                    v += amp * std::cos(2.0 * M_PI * freq * x + phase[m]);
                    amp *= std::pow(0.5, alpha);
                    freq *= 2.0;
                }
                return Complex(v, 0.0);
            }));
    }
    return basket;
}

LasotaYorkeFit lasota_yorke_fit(const MarkovMap& map, const Potential& pot,
                                const RoofFunction& roof, GridLayoutPtr layout,
                                const std::vector<double>& b_list,
                                const std::vector<int>& n_list,
                                std::uint64_t seed) {
    const double alpha = layout->alpha();
    const double lam = map.lambda();
    auto basket = probe_basket(layout, seed);
    TransferKernel kernel(map, pot, &roof, layout);

    LasotaYorkeFit fit;
    fit.lambda_map = lam;
    const int n_max = *std::max_element(n_list.begin(), n_list.end());

    // For the effective-lambda diagnostic: seminorm trace of the roughest
    // probe at the smallest frequency.
    std::vector<double> trace;
    const double b_trace = *std::min_element(b_list.begin(), b_list.end());

    for (double b : b_list) {
        const double b_pow = std::pow(std::abs(b), alpha);
        for (const auto& [name, h] : basket) {
            const double h_sup = sup_norm(h);
            const double h_semi = holder_seminorm(h, alpha);
            if (h_sup == 0.0) continue;
            GridFunction it = h;
            const auto ph = kernel.phases(Complex(0.0, b));
            GridFunction tmp(layout);
            std::vector<double> semis;
            for (int n = 1; n <= n_max; ++n) {
                kernel.apply(ph, it, tmp);
                std::swap(it, tmp);
                semis.push_back(holder_seminorm(it, alpha));
            }
            if (b == b_trace && name == "holder0") trace = semis;
            for (int n : n_list) {
                const double lhs = semis[n - 1];
                const double denom =
                    b_pow * h_sup + std::pow(lam, alpha * n) * h_semi;
                fit.probes.push_back({b, n, name, lhs, denom});
                fit.c9 = std::max(fit.c9, lhs / denom);
            }
        }
    }

    // Effective lambda: geometric decay of the seminorm transient above
    // its large-n plateau.
    fit.lambda_eff = lam;
    if (trace.size() >= 4) {
        const double floor_level =
            *std::min_element(trace.begin(), trace.end());
        std::vector<double> xs, ys;
        for (std::size_t n = 0; n < trace.size(); ++n) {
            const double d = trace[n] - floor_level;
            if (d > 1e-9 * (trace.front() + 1.0)) {
                xs.push_back(static_cast<double>(n + 1));
                ys.push_back(std::log(d));
            }
        }
        if (xs.size() >= 3) {
            const LineFit lf = fit_line(xs, ys);
            if (lf.slope < 0.0)
                fit.lambda_eff =
                    std::min(0.999, std::exp(lf.slope / alpha));
        }
    }

    if (fit.c9 > 0.0) {
        const double target = 0.25 / fit.c9;
        if (target >= 1.0)
            fit.n1 = 1;
        else
            fit.n1 = static_cast<int>(
                std::ceil(std::log(target) / (alpha * std::log(lam))));
        fit.n1 = std::max(fit.n1, 1);
    }
    return fit;
}

DolgopyatResult dolgopyat_probe(const MarkovMap& map, const Potential& pot,
                                const RoofFunction& roof, GridLayoutPtr layout,
                                double b, double target,
                                const BNormContext& ctx, std::uint64_t seed,
                                int cap) {
    if (std::abs(b) < 3.0)
        throw HypothesisError("dolgopyat_probe requires |b| >= 3");
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("dolgopyat_probe target must be in (0,1)");
    const double alpha = layout->alpha();
    auto basket = probe_basket(layout, seed);
    // Keep only functions obeying the cancellation hypothesis
    // |h|_alpha <= 2 C3 |b|^alpha |h|_inf.
    const double bound = 2.0 * ctx.c3 * std::pow(std::abs(b), alpha);
    std::vector<GridFunction> funcs;
    std::vector<double> norms0;
    for (auto& [name, h] : basket) {
        const double s = sup_norm(h);
        if (s == 0.0) continue;
        if (holder_seminorm(h, alpha) <= bound * s) {
            norms0.push_back(b_norm(h, ctx));
            funcs.push_back(std::move(h));
        }
    }
    if (funcs.empty())
        throw HypothesisError("no basket function satisfies the seminorm "
                              "hypothesis at this b");

    TransferKernel kernel(map, pot, &roof, layout);
    const auto ph = kernel.phases(Complex(0.0, b));
    GridFunction tmp(layout);
    DolgopyatResult res;
    for (int n = 1; n <= cap; ++n) {
        double worst = 0.0;
        for (std::size_t i = 0; i < funcs.size(); ++i) {
            kernel.apply(ph, funcs[i], tmp);
            std::swap(funcs[i], tmp);
            worst = std::max(worst, b_norm(funcs[i], ctx) / norms0[i]);
        }
        res.trace.push_back(worst);
        if (worst <= target) {
            res.iterations = n;
            return res;
        }
    }
    throw NoContractionError("no ||.||_b contraction to " +
                             std::to_string(target) + " within " +
                             std::to_string(cap) + " iterations at b = " +
                             std::to_string(b));
}

double default_c3(const MarkovMap& map, const Potential& pot,
                  const RoofFunction& roof, GridLayoutPtr layout) {
    const auto fit = lasota_yorke_fit(map, pot, roof, layout, {3.0, 10.0},
                                      {1, 2, 4, 8});
    return std::max(4.0 * fit.c9, 1e-3);
}

GridFunction apply_transfer(const MarkovMap& map, const Potential& pot,
                            const RoofFunction* roof, GridLayoutPtr layout,
                            Complex s, const GridFunction& f) {
    return TransferKernel(map, pot, roof, std::move(layout)).apply(s, f);
}

double resolvent_abscissa(const MarkovMap& map, const Potential& pot,
                          const RoofFunction& roof, GridLayoutPtr layout,
                          double b, double a_lo, double a_hi, double tol) {
    TransferKernel kernel(map, pot, &roof, layout);
    const GridFunction one = GridFunction::constant(layout, Complex(1.0, 0.0));
    auto converges = [&](double a) {
        try {
            resolvent_apply(kernel, Complex(a, b), one, 1e-8, nullptr, 3000);
            return true;
        } catch (const DivergenceError&) {
            return false;
        }
    };
    if (!converges(a_hi)) return a_hi;
    if (converges(a_lo)) return a_lo;
    double lo = a_lo, hi = a_hi;  // diverges at lo, converges at hi
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid) ? hi : lo) = mid;
    }
    return hi;
}

} // namespace semiflow

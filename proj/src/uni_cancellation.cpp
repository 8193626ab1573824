#include "semiflow/uni_cancellation.hpp"

#include <algorithm>
#include <cmath>

#include "semiflow/numerics.hpp"

namespace semiflow {

namespace {

/// Birkhoff sum of the roof along a selection: rows holds the target
/// interval of each application, the initial column is the interval of x
/// (glued) or a fixed domain symbol (literal).
double selection_birkhoff(const MarkovMap& map, const RoofFunction& roof,
                          const std::vector<int>& rows, int col, double x) {
    double z = x, sum = 0.0;
    for (int k = static_cast<int>(rows.size()) - 1; k >= 0; --k) {
        const Branch& br = map.branch(rows[k], col);
        z = br.eval(z);
        sum += roof(z);
        col = rows[k];
    }
    return sum;
}

double selection_R(const MarkovMap& map, const RoofFunction& roof,
                   const std::vector<int>& rows1, const std::vector<int>& rows2,
                   int col, double x) {
    return selection_birkhoff(map, roof, rows1, col, x) -
           selection_birkhoff(map, roof, rows2, col, x);
}

std::vector<int> nth_selection(std::size_t index, int depth, int n_intervals) {
    std::vector<int> rows(depth);
    for (int k = 0; k < depth; ++k) {
        rows[k] = static_cast<int>(index % n_intervals);
        index /= n_intervals;
    }
    return rows;
}

} // namespace

double branch_pair_R(const MarkovMap& map, const RoofFunction& roof,
                     const BranchWord& w1, const BranchWord& w2, double x) {
    if (w1.depth() != w2.depth())
        throw WordMismatchError("branch words have different depths");
    if (w1.depth() == 0) return 0.0;
    if (w1.last() != w2.last())
        throw WordMismatchError("branch words have different domain intervals");
    auto r = [&roof](double z) { return roof(z); };
    return birkhoff_sum(map, r, w1, x) - birkhoff_sum(map, r, w2, x);
}

double witness_R(const MarkovMap& map, const RoofFunction& roof,
                 const OscillationWitness& w, double x) {
    const int col = w.glued ? map.locate(x) : w.domain_interval;
    if (!w.glued && !map.interval(col).contains_closed(x))
        throw DomainError("point outside the witness domain interval");
    return selection_R(map, roof, w.rows1, w.rows2, col, x);
}

OscillationWitness find_uni_witness(const MarkovMap& map,
                                    const RoofFunction& roof, int depth,
                                    std::size_t budget, std::uint64_t seed) {
    if (depth < 1)
        throw std::invalid_argument("find_uni_witness requires depth >= 1");
    const int N = map.interval_count();
    const bool glued = map.rows_glue();

    // Candidate selections. Glued mode: any row sequence. Literal mode:
    // admissible words grouped by their shared domain symbol, encoded as
    // rows plus the fixed final column.
    struct Candidate {
        std::vector<int> rows;
        int col;  // -1 in glued mode
    };
    std::vector<Candidate> cands;
    double count_estimate = 1.0;
    for (int k = 0; k < depth; ++k) count_estimate *= N;
    const bool enumerate = count_estimate <= 4096.0;

    if (glued) {
        if (enumerate) {
            const std::size_t total = static_cast<std::size_t>(count_estimate);
            for (std::size_t idx = 0; idx < total; ++idx)
                cands.push_back({nth_selection(idx, depth, N), -1});
        }
    } else {
        // Depth-first enumeration of admissible row chains per domain
        // symbol: rows[depth-1] must be admissible from col, and each
        // earlier row from its successor.
        std::vector<int> rows(depth);
        for (int col = 0; col < N; ++col) {
            std::function<void(int, int)> dfs = [&](int k, int below) {
                if (cands.size() > 20000) return;
                if (k < 0) {
                    cands.push_back({rows, col});
                    return;
                }
                for (int i = 0; i < N; ++i)
                    if (map.admissible(i, below)) {
                        rows[k] = i;
                        dfs(k - 1, i);
                    }
            };
            dfs(depth - 1, col);
        }
    }

    // Probe points: endpoints (inset by 1e-6 of the length) plus the
    // midpoint of every interval in the domain.
    auto probes_for = [&](int col) {
        std::vector<double> ps;
        for (int i = 0; i < N; ++i) {
            if (!glued && i != col) continue;
            const Interval& iv = map.interval(i);
            const double eps = 1e-6 * iv.length();
            ps.push_back(iv.lo + eps);
            ps.push_back(0.5 * (iv.lo + iv.hi));
            ps.push_back(iv.hi - eps);
        }
        return ps;
    };

    OscillationWitness best;
    best.depth = depth;
    best.glued = glued;

    Rng rng(seed);
    auto random_candidate = [&]() {
        Candidate c;
        if (glued) {
            c.col = -1;
            c.rows.resize(depth);
            for (int k = 0; k < depth; ++k) c.rows[k] = (int)rng.index(N);
            return c;
        }
        return cands[rng.index(cands.size())];
    };

    auto consider = [&](const Candidate& a, const Candidate& b) {
        if (a.rows == b.rows) return;
        if (!glued && a.col != b.col) return;
        const int col = glued ? -1 : a.col;
        const auto ps = probes_for(col);
        std::vector<double> rv(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const int c0 = glued ? map.locate(ps[i]) : col;
            rv[i] = selection_R(map, roof, a.rows, b.rows, c0, ps[i]);
        }
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                const double d = std::abs(rv[i] - rv[j]);
                if (d > best.d) {
                    best.d = d;
                    best.rows1 = a.rows;
                    best.rows2 = b.rows;
                    best.domain_interval = col;
                    best.x1 = std::min(ps[i], ps[j]);
                    best.x2 = std::max(ps[i], ps[j]);
                }
            }
    };

    if (!cands.empty()) {
        const std::size_t n = cands.size();
        const double pair_count = 0.5 * double(n) * double(n - 1);
        if (pair_count <= double(budget)) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    consider(cands[i], cands[j]);
        } else {
            for (std::size_t k = 0; k < budget; ++k)
                consider(cands[rng.index(n)], cands[rng.index(n)]);
        }
    } else {
        for (std::size_t k = 0; k < budget; ++k)
            consider(random_candidate(), random_candidate());
    }

    if (best.rows1.empty()) {
        // No distinct pair exists (single-branch chains); report D = 0.
        best.rows1 = best.rows2 = nth_selection(0, depth, N);
        best.domain_interval = glued ? -1 : 0;
        best.x1 = map.hull_lo();
        best.x2 = map.hull_hi();
        best.d = 0.0;
        best.domain_lo = best.x1;
        best.domain_hi = best.x2;
        return best;
    }

    // Refine the point pair by coordinate golden-section over the domain.
    double lo, hi;
    if (glued) {
        lo = map.hull_lo();
        hi = map.hull_hi();
    } else {
        lo = map.interval(best.domain_interval).lo;
        hi = map.interval(best.domain_interval).hi;
    }
    const int col = best.domain_interval;
    auto Rw = [&](double x) {
        const int c0 = glued ? map.locate(x) : col;
        return selection_R(map, roof, best.rows1, best.rows2, c0, x);
    };
    double x1 = best.x1, x2 = best.x2;
    for (int sweep = 0; sweep < 3; ++sweep) {
        x1 = golden_max([&](double x) { return std::abs(Rw(x) - Rw(x2)); }, lo,
                        hi, 90);
        x2 = golden_max([&](double x) { return std::abs(Rw(x1) - Rw(x)); }, lo,
                        hi, 90);
    }
    const double refined = std::abs(Rw(x1) - Rw(x2));
    if (refined > best.d) {
        best.d = refined;
        best.x1 = std::min(x1, x2);
        best.x2 = std::max(x1, x2);
    }
    best.domain_lo = lo;
    best.domain_hi = hi;
    return best;
}

std::string to_string(CohomologyVerdict v) {
    switch (v) {
        case CohomologyVerdict::NotCohomologous: return "NOT_COHOMOLOGOUS";
        case CohomologyVerdict::LikelyCohomologous:
            return "LIKELY_COHOMOLOGOUS";
        default: return "INCONCLUSIVE";
    }
}

namespace {

/// Truncated telescoping function h(x) = sum_n r(z_n(x)) - r(z_n(x_i))
/// along a fixed branch tail, with base point x_i the midpoint of the
/// interval of x. The tail uses one full row when available (periodic
/// tail), otherwise a greedy admissible chain.
class TelescopeH {
public:
    TelescopeH(const MarkovMap& map, const RoofFunction& roof, int K)
        : map_(map), roof_(roof), K_(K) {
        const int N = map.interval_count();
        full_row_ = -1;
        for (int i = 0; i < N && full_row_ < 0; ++i) {
            bool full = true;
            for (int j = 0; j < N; ++j)
                if (!map.admissible(i, j)) full = false;
            if (full) full_row_ = i;
        }
    }

    double operator()(double x) const {
        const int i = map_.locate(x);
        const double base = 0.5 * (map_.interval(i).lo + map_.interval(i).hi);
        double zx = x, zb = base, sum = 0.0;
        int col = i;
        for (int n = 0; n < K_; ++n) {
            const int row = next_row(col);
            const Branch& br = map_.branch(row, col);
            zx = br.eval(zx);
            zb = br.eval(zb);
            sum += roof_(zx) - roof_(zb);
            col = row;
        }
        return sum;
    }

private:
    int next_row(int col) const {
        if (full_row_ >= 0) return full_row_;
        for (int i = 0; i < map_.interval_count(); ++i)
            if (map_.admissible(i, col)) return i;
        throw MixingError("no admissible continuation for the branch tail");
    }
    const MarkovMap& map_;
    const RoofFunction& roof_;
    int K_;
    int full_row_ = -1;
};

} // namespace

CohomologyReport cohomology_verdict(const MarkovMap& map,
                                    const RoofFunction& roof, int max_depth,
                                    double threshold, std::size_t budget,
                                    std::uint64_t seed) {
    if (max_depth < 4)
        throw std::invalid_argument("cohomology_verdict requires max_depth >= 4");
    CohomologyReport rep;
    if (threshold <= 0.0) {
        const double sup = roof_sup(map, roof);
        threshold = std::max(1e-3 * roof.lipschitz(),
                             1e-12 * std::max(1.0, sup));
    }
    rep.threshold = threshold;

    for (int n = 1; n <= max_depth; ++n) {
        const OscillationWitness w = find_uni_witness(map, roof, n, budget,
                                                      seed + n);
        rep.d_by_depth.push_back({n, w.d});
        if (w.d >= rep.best_d) {
            rep.best_d = w.d;
            rep.best_depth = n;
            rep.witness = w;
        }
    }

    // Coboundary prong: truncate the telescoping series once the
    // geometric tail is far below the verdict threshold.
    const double lam = map.lambda();
    const double diam = map.hull_hi() - map.hull_lo();
    int K = 60;
    {
        const double scale = std::max(1.0, roof.lipschitz() * diam);
        const double target = 1e-15 * scale;
        const double per = roof.lipschitz() * diam;
        if (per > 0.0)
            K = std::min(
                400, static_cast<int>(std::ceil(std::log(target / per) /
                                                std::log(lam))) +
                         2);
    }
    const TelescopeH h(map, roof, K);
    double dev = 0.0;
    const int sub = 64;
    for (const auto& br : map.branches()) {
        const Interval& dom = map.interval(br.domain());
        double lo_g = 1e300, hi_g = -1e300;
        for (int k = 0; k < sub; ++k) {
            const double inset = 1e-9 * dom.length();
            const double u = dom.lo + inset +
                             (dom.length() - 2 * inset) * k / double(sub - 1);
            const double x = br.eval(u);  // T(x) = u exactly on the cylinder
            const double g = roof(x) - h(u) + h(x);
            lo_g = std::min(lo_g, g);
            hi_g = std::max(hi_g, g);
        }
        dev = std::max(dev, hi_g - lo_g);
    }
    rep.coboundary_deviation = dev;

    if (rep.best_d > threshold)
        rep.verdict = CohomologyVerdict::NotCohomologous;
    else if (rep.best_d < 0.1 * threshold && dev < 0.1 * threshold)
        rep.verdict = CohomologyVerdict::LikelyCohomologous;
    else
        rep.verdict = CohomologyVerdict::Inconclusive;
    return rep;
}

PartitionPoints partition_points(const MarkovMap& map, const RoofFunction& roof,
                                 const OscillationWitness& witness, double b) {
    if (std::abs(b) < 3.0)
        throw HypothesisError("partition_points requires |b| >= 3");
    if (!(witness.d > 0.0))
        throw InsufficientOscillationError("witness carries no oscillation");

    const double step_mag = M_PI / (3.0 * std::abs(b));
    const int p_total = static_cast<int>(std::floor(witness.d / step_mag));
    if (p_total < 3)
        throw InsufficientOscillationError(
            "oscillation D|b| too small to place 3 partition points");

    auto R = [&](double x) { return witness_R(map, roof, witness, x); };
    const double r1 = R(witness.x1), r2 = R(witness.x2);
    const double sign = (r2 >= r1) ? 1.0 : -1.0;

    // Monotone segments of R sampled on a fine grid over [x1, x2].
    const int grid_n = 4096;
    std::vector<double> gx(grid_n + 1), gr(grid_n + 1);
    for (int i = 0; i <= grid_n; ++i) {
        gx[i] = witness.x1 + (witness.x2 - witness.x1) * i / double(grid_n);
        gr[i] = R(gx[i]);
    }

    PartitionPoints out;
    out.b = b;
    out.step = sign * step_mag;
    out.gap_bound =
        M_PI * (witness.x2 - witness.x1) / (witness.d * std::abs(b));

    double prev = witness.x1;
    for (int k = 1; k <= p_total; ++k) {
        const double target = r1 + sign * step_mag * k;
        // Smallest root greater than prev.
        double found = -1.0;
        for (int i = 0; i < grid_n; ++i) {
            if (gx[i + 1] <= prev) continue;
            const double a = gr[i] - target, c = gr[i + 1] - target;
            if (a == 0.0 && gx[i] > prev) {
                found = gx[i];
                break;
            }
            if (a * c <= 0.0 && (a != 0.0 || c != 0.0)) {
                const double lo = std::max(gx[i], prev);
                const double lo_v = R(lo) - target;
                if (lo_v * (R(gx[i + 1]) - target) > 0.0) continue;
                const double root = bisect_root(
                    [&](double x) { return R(x) - target; }, lo, gx[i + 1],
                    1e-14 * (witness.x2 - witness.x1));
                found = root;
                break;
            }
        }
        if (found < 0.0) break;
        out.points.push_back(found);
        out.r_values.push_back(R(found));
        prev = found;
    }

    const int p = static_cast<int>(out.points.size());
    if (p < 3)
        throw InsufficientOscillationError(
            "fewer than 3 partition points could be placed");
    const double lower = 3.0 * witness.d * std::abs(b) / M_PI - 2.0;
    if (p + 1e-9 < lower)
        throw Error("partition point count " + std::to_string(p) +
                    " fell below the pigeonhole lower bound");

    for (int k = 0; k + 1 < p; ++k)
        if (out.points[k + 1] - out.points[k] <= out.gap_bound)
            out.well_spaced.push_back(k);
    return out;
}

CancellationMeasure cancellation_set_measure(
    const MarkovMap& map, const Potential& pot, const SrbMeasure& srb,
    const RoofFunction& roof, double b, const GridFunction& h, int n_iter,
    const BNormContext& ctx, std::vector<double> delta_grid) {
    if (std::abs(b) < 3.0)
        throw HypothesisError("cancellation_set_measure requires |b| >= 3");
    GridLayoutPtr layout = h.layout();
    const double alpha = layout->alpha();
    const double h_sup = sup_norm(h);
    if (h_sup == 0.0) throw HypothesisError("h vanishes");
    const double h_semi = holder_seminorm(h, alpha);
    if (h_semi > 2.0 * ctx.c3 * std::pow(std::abs(b), alpha) * h_sup)
        throw HypothesisError(
            "h violates |h|_alpha <= 2 C3 |b|^alpha |h|_inf");

    TransferKernel kernel(map, pot, &roof, layout);
    const GridFunction g = kernel.apply_power(Complex(0.0, b), h, n_iter);

    const GridLayout& L = *layout;
    std::sort(delta_grid.begin(), delta_grid.end());
    CancellationMeasure out;
    out.n_iter = n_iter;
    out.delta_grid = delta_grid;
    out.measure.assign(delta_grid.size(), 0.0);
    double total = 0.0, flat = 0.0;
    const double dmin = delta_grid.front();
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k = 0; k < L.nodes(); ++k) {
            const double w = L.trapezoid_weight(i, k) *
                             srb.density.value(i, k).real() /
                             L.total_length();
            total += w;
            const double gv = std::abs(g.value(i, k));
            for (std::size_t d = 0; d < delta_grid.size(); ++d)
                if (gv <= (1.0 - delta_grid[d]) * h_sup) out.measure[d] += w;
            if (gv > (1.0 - dmin) * h_sup) flat += w;
        }
    // Normalize against the quadrature mass (1 up to grid error).
    for (auto& m : out.measure) m /= total;
    out.flat_fraction = flat / total;
    return out;
}

int scale_condition_depth(double alpha, double c3, double c8, double lambda,
                          const OscillationWitness& witness) {
    const double dx = std::abs(witness.x2 - witness.x1);
    if (!(witness.d > 0.0) || dx == 0.0) return -1;
    const double lhs0 = 4.0 * c3 * std::pow(c8, alpha) * std::pow(dx, alpha) *
                        std::pow(M_PI, alpha - 1.0);
    const double rhs = std::pow(witness.d, alpha) / 12.0;
    if (lhs0 <= rhs) return 1;
    const double n = std::log(rhs / lhs0) / (alpha * std::log(lambda));
    return std::max(1, static_cast<int>(std::ceil(n)));
}

} // namespace semiflow

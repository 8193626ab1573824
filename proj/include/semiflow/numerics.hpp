#pragma once

// Small numerical toolbox shared by the other modules: Gauss-Legendre
// rules, adaptive Simpson, 1-d line fits, golden-section maximization,
// a deterministic RNG wrapper, and a fixed-chunk parallel loop whose
// results do not depend on the worker count.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace semiflow {

struct QuadRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes, computed by Newton iteration on
/// the Legendre recurrence. Accurate to machine precision for n <= 64.
QuadRule gauss_legendre(int n);

/// Integrate f over [a, b] with the given rule.
template <class F>
auto integrate_gl(const QuadRule& q, double a, double b, F&& f)
    -> decltype(f(a)) {
    using R = decltype(f(a));
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    R acc{};
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        acc += q.weights[i] * f(mid + half * q.nodes[i]);
    return half * acc;
}

/// Recursive adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int count = 0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Returns the abscissa of the maximum.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 80);

/// Bisection root of f on a bracketing interval [lo, hi].
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol, int max_iter = 200);

/// Deterministic RNG: a thin wrapper over mt19937_64 producing uniforms
/// from raw bits so results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // in [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t bits() { return gen_(); }
    std::size_t index(std::size_t n) {  // in [0, n)
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) %
               n;
    }

private:
    std::mt19937_64 gen_;
};

/// Global worker count used by parallel_chunks (0 = hardware default).
void set_thread_count(int n);
int thread_count();

/// Splits [0, n) into a fixed number of chunks and runs fn(chunk_index,
/// begin, end) across workers. The chunk decomposition is independent of
/// the worker count, so per-chunk results (merged in chunk order) are
/// bit-reproducible under any --threads setting.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn);

inline constexpr std::size_t kParallelChunks = 256;

} // namespace semiflow

#pragma once

// Complex-valued functions on the disjoint interval union, represented
// by one uniform sample grid per interval, plus the three norms used by
// the operator estimates: |.|_inf, the alpha-Holder seminorm |.|_alpha,
// and ||h||_b = max{|h|_inf, |h|_alpha / (C3 |b|^alpha)}.

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "semiflow/errors.hpp"
#include "semiflow/markov_map.hpp"

namespace semiflow {

using Complex = std::complex<double>;

class GridLayout;
using GridLayoutPtr = std::shared_ptr<const GridLayout>;

/// Immutable grid geometry shared by all functions of one workspace:
/// the interval list, the per-interval node count M, and the Holder
/// exponent alpha inherited by seminorm evaluations.
class GridLayout {
public:
    static GridLayoutPtr create(std::vector<Interval> intervals, int nodes,
                                double alpha);
    static GridLayoutPtr create(const MarkovMap& map, int nodes);

    int interval_count() const { return static_cast<int>(intervals_.size()); }
    const Interval& interval(int i) const { return intervals_[i]; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    int nodes() const { return nodes_; }
    double alpha() const { return alpha_; }
    double spacing(int i) const {
        return intervals_[i].length() / (nodes_ - 1);
    }
    double node_x(int i, int k) const {
        return intervals_[i].lo + spacing(i) * k;
    }
    std::size_t size() const {
        return static_cast<std::size_t>(interval_count()) * nodes_;
    }
    double total_length() const { return total_length_; }
    /// Trapezoid weight of node k within one interval of index i.
    double trapezoid_weight(int i, int k) const {
        const double h = spacing(i);
        return (k == 0 || k == nodes_ - 1) ? 0.5 * h : h;
    }
    /// Indices of the ~65-point subgrid used by the Holder seminorm.
    const std::vector<int>& seminorm_subgrid() const { return subgrid_; }

private:
    std::vector<Interval> intervals_;
    int nodes_ = 0;
    double alpha_ = 0.5;
    double total_length_ = 0.0;
    std::vector<int> subgrid_;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridLayoutPtr layout, Complex fill = Complex{});

    static GridFunction sample(GridLayoutPtr layout,
                               const std::function<Complex(double)>& f);
    static GridFunction constant(GridLayoutPtr layout, Complex value);

    const GridLayoutPtr& layout() const { return layout_; }
    Complex value(int i, int k) const { return values_[idx(i, k)]; }
    Complex& value(int i, int k) { return values_[idx(i, k)]; }
    const std::vector<Complex>& values() const { return values_; }
    std::vector<Complex>& values() { return values_; }

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(Complex c);
    friend GridFunction operator+(GridFunction a, const GridFunction& b) {
        a += b;
        return a;
    }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) {
        a -= b;
        return a;
    }
    friend GridFunction operator*(Complex c, GridFunction a) {
        a *= c;
        return a;
    }

private:
    std::size_t idx(int i, int k) const {
        return static_cast<std::size_t>(i) * layout_->nodes() + k;
    }
    GridLayoutPtr layout_;
    std::vector<Complex> values_;
};

/// Piecewise-linear interpolation inside the interval containing x;
/// exact at the nodes. Throws DomainError when x lies in no closure.
Complex interpolate(const GridFunction& f, double x);

/// Max of |f| over all nodes.
double sup_norm(const GridFunction& f);

/// Holder seminorm estimate: max of |f(x)-f(y)| / |x-y|^alpha over all
/// pairs of the per-interval 65-point subgrid, including cross-interval
/// pairs.
double holder_seminorm(const GridFunction& f, double alpha);
double holder_seminorm(const GridFunction& f);  // layout's alpha

struct BNormContext {
    double b = 3.0;
    double c3 = 1.0;
    double alpha = 0.5;
    BNormContext(double b_, double c3_, double alpha_);
};

/// ||f||_b = max{ |f|_inf, |f|_alpha / (C3 |b|^alpha) }.
double b_norm(const GridFunction& f, const BNormContext& ctx);

/// CSV with columns: interval index, node x, real part, imaginary part.
void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is, double alpha = 0.5);

} // namespace semiflow

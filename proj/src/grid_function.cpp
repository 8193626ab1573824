#include "semiflow/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace semiflow {

GridLayoutPtr GridLayout::create(std::vector<Interval> intervals, int nodes,
                                 double alpha) {
    if (nodes < 2) throw ConfigError("grid needs at least 2 nodes per interval");
    if (intervals.empty()) throw ConfigError("grid needs at least one interval");
    auto layout = std::make_shared<GridLayout>();
    layout->intervals_ = std::move(intervals);
    layout->nodes_ = nodes;
    layout->alpha_ = alpha;
    layout->total_length_ = 0.0;
    for (const auto& iv : layout->intervals_)
        layout->total_length_ += iv.length();
    // 65 nodes per interval (or all of them when M < 65).
    const int sub = std::min(nodes, 65);
    layout->subgrid_.reserve(sub);
    for (int j = 0; j < sub; ++j) {
        const int k = static_cast<int>(
            std::lround(double(j) * (nodes - 1) / double(sub - 1)));
        if (layout->subgrid_.empty() || layout->subgrid_.back() != k)
            layout->subgrid_.push_back(k);
    }
    return layout;
}

GridLayoutPtr GridLayout::create(const MarkovMap& map, int nodes) {
    return create(map.intervals(), nodes, map.alpha());
}

GridFunction::GridFunction(GridLayoutPtr layout, Complex fill)
    : layout_(std::move(layout)), values_(layout_->size(), fill) {}

GridFunction GridFunction::sample(GridLayoutPtr layout,
                                  const std::function<Complex(double)>& f) {
    GridFunction g(layout);
    for (int i = 0; i < layout->interval_count(); ++i)
        for (int k = 0; k < layout->nodes(); ++k)
            g.value(i, k) = f(layout->node_x(i, k));
    return g;
}

GridFunction GridFunction::constant(GridLayoutPtr layout, Complex value) {
    return GridFunction(std::move(layout), value);
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(Complex c) {
    for (auto& v : values_) v *= c;
    return *this;
}

Complex interpolate(const GridFunction& f, double x) {
    const GridLayout& L = *f.layout();
    for (int i = 0; i < L.interval_count(); ++i) {
        const Interval& iv = L.interval(i);
        if (!iv.contains_closed(x)) continue;
        const double t = (x - iv.lo) / L.spacing(i);
        int k = static_cast<int>(std::floor(t));
        k = std::clamp(k, 0, L.nodes() - 2);
        const double w = t - k;
        return (1.0 - w) * f.value(i, k) + w * f.value(i, k + 1);
    }
    throw DomainError("interpolation point " + std::to_string(x) +
                      " lies in no interval closure");
}

double sup_norm(const GridFunction& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double holder_seminorm(const GridFunction& f, double alpha) {
    const GridLayout& L = *f.layout();
    const auto& sub = L.seminorm_subgrid();
    std::vector<double> xs;
    std::vector<Complex> vs;
    xs.reserve(sub.size() * L.interval_count());
    vs.reserve(sub.size() * L.interval_count());
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k : sub) {
            xs.push_back(L.node_x(i, k));
            vs.push_back(f.value(i, k));
        }
    double best = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = a + 1; b < xs.size(); ++b) {
            const double dx = std::abs(xs[a] - xs[b]);
            if (dx == 0.0) continue;  // shared endpoint of touching intervals
            const double q = std::abs(vs[a] - vs[b]) / std::pow(dx, alpha);
            best = std::max(best, q);
        }
    return best;
}

double holder_seminorm(const GridFunction& f) {
    return holder_seminorm(f, f.layout()->alpha());
}

BNormContext::BNormContext(double b_, double c3_, double alpha_)
    : b(b_), c3(c3_), alpha(alpha_) {
    if (!(c3 > 0.0)) throw std::invalid_argument("BNormContext: C3 must be > 0");
    if (std::abs(b) < 3.0)
        throw std::invalid_argument("BNormContext: |b| must be >= 3");
    if (alpha <= 0.0 || alpha > 1.0)
        throw std::invalid_argument("BNormContext: alpha must lie in (0, 1]");
}

double b_norm(const GridFunction& f, const BNormContext& ctx) {
    const double semi = holder_seminorm(f, ctx.alpha);
    return std::max(sup_norm(f),
                    semi / (ctx.c3 * std::pow(std::abs(ctx.b), ctx.alpha)));
}

void write_csv(std::ostream& os, const GridFunction& f) {
    const GridLayout& L = *f.layout();
    os << "interval,x,re,im\n";
    os << std::setprecision(17);
    for (int i = 0; i < L.interval_count(); ++i)
        for (int k = 0; k < L.nodes(); ++k) {
            const Complex v = f.value(i, k);
            os << i << ',' << L.node_x(i, k) << ',' << v.real() << ','
               << v.imag() << '\n';
        }
}

GridFunction read_csv(std::istream& is, double alpha) {
    std::string line;
    std::map<int, std::vector<std::pair<double, Complex>>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("interval", 0) == 0)
            continue;
        std::istringstream ss(line);
        int i = 0;
        double x = 0, re = 0, im = 0;
        char c = 0;
        if (!(ss >> i >> c >> x >> c >> re >> c >> im)) continue;
        rows[i].push_back({x, Complex(re, im)});
    }
    if (rows.empty()) throw ConfigError("grid CSV contains no data rows");
    std::vector<Interval> ivs;
    std::size_t nodes = rows.begin()->second.size();
    for (auto& [i, pts] : rows) {
        if (pts.size() != nodes)
            throw ConfigError("grid CSV has uneven node counts");
        ivs.push_back({pts.front().first, pts.back().first});
    }
    auto layout = GridLayout::create(ivs, static_cast<int>(nodes), alpha);
    GridFunction g(layout);
    int i = 0;
    for (auto& [idx, pts] : rows) {
        for (std::size_t k = 0; k < pts.size(); ++k)
            g.value(i, static_cast<int>(k)) = pts[k].second;
        ++i;
    }
    return g;
}

} // namespace semiflow

#include "semiflow/markov_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semiflow {

namespace {
constexpr int kDerivativeSamples = 1024;
constexpr double kSafetyFactor = 1.01;

std::string pair_str(int i, int j) {
    std::ostringstream os;
    os << "(" << i << "," << j << ")";
    return os.str();
}
} // namespace

Branch::Branch(const BranchSpec& spec, const Interval& target_iv,
               const Interval& domain_iv)
    : target_(spec.target),
      domain_(spec.domain),
      family_(spec.family),
      scale_(spec.scale),
      shift_(spec.shift),
      eps_(spec.eps) {
    const double e0 = scale_ * domain_iv.lo + shift_;
    const double e1 = scale_ * domain_iv.hi + shift_;
    img_lo_ = std::min(e0, e1);
    img_hi_ = std::max(e0, e1);
    (void)target_iv;
}

double Branch::eval(double x) const {
    const double base = scale_ * x + shift_;
    if (family_ == BranchFamily::Affine) return base;
    const double w = img_hi_ - img_lo_;
    const double t = (base - img_lo_) / w;
    return img_lo_ + w * (t + eps_ * t * (1.0 - t));
}

double Branch::deriv(double x) const {
    if (family_ == BranchFamily::Affine) return scale_;
    const double base = scale_ * x + shift_;
    const double t = (base - img_lo_) / (img_hi_ - img_lo_);
    return scale_ * (1.0 + eps_ * (1.0 - 2.0 * t));
}

MarkovMap MarkovMap::build(const MapSpec& spec) {
    MarkovMap m;
    const int n = static_cast<int>(spec.intervals.size());
    if (n == 0) throw ConfigError("map spec has no intervals");
    if (spec.alpha <= 0.0 || spec.alpha > 1.0)
        throw ConfigError("alpha must lie in (0, 1]");
    for (const auto& iv : spec.intervals)
        if (!(iv.hi > iv.lo)) throw ConfigError("interval with hi <= lo");

    // Intervals must be pairwise disjoint (shared endpoints are fine).
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return spec.intervals[a].lo < spec.intervals[b].lo;
    });
    for (int k = 0; k + 1 < n; ++k) {
        const auto& a = spec.intervals[order[k]];
        const auto& b = spec.intervals[order[k + 1]];
        if (b.lo < a.hi - 1e-12 * (a.hi - a.lo))
            throw OverlapError("intervals " + pair_str(order[k], order[k + 1]) +
                               " intersect");
    }
    // The library assumes the interval list is sorted left to right.
    bool sorted = true;
    for (int i = 0; i + 1 < n; ++i)
        if (spec.intervals[i].lo > spec.intervals[i + 1].lo) sorted = false;
    if (!sorted) throw ConfigError("intervals must be listed left to right");

    m.intervals_ = spec.intervals;
    m.alpha_ = spec.alpha;
    m.name_ = spec.name;
    m.adj_.assign(static_cast<std::size_t>(n) * n, 0);
    m.branch_index_.assign(static_cast<std::size_t>(n) * n, -1);
    m.on_domain_.resize(n);
    m.total_length_ = 0.0;
    for (const auto& iv : m.intervals_) m.total_length_ += iv.length();

    double lambda_raw = 0.0;
    for (const auto& bs : spec.branches) {
        if (bs.target < 0 || bs.target >= n || bs.domain < 0 || bs.domain >= n)
            throw ConfigError("branch " + pair_str(bs.target, bs.domain) +
                              " has an out-of-range interval index");
        if (m.adj_[bs.target * n + bs.domain])
            throw ConfigError("duplicate branch " +
                              pair_str(bs.target, bs.domain));
        const Interval& ti = m.intervals_[bs.target];
        const Interval& di = m.intervals_[bs.domain];
        Branch br(bs, ti, di);

        // Expansion: |y'| sampled on a uniform 1024-point grid.
        double dmax = 0.0, dmin = 1e300;
        double sign = 0.0;
        for (int k = 0; k < kDerivativeSamples; ++k) {
            const double x =
                di.lo + di.length() * k / double(kDerivativeSamples - 1);
            const double d = br.deriv(x);
            if (k == 0) sign = d >= 0 ? 1.0 : -1.0;
            if (d * sign <= 0.0)
                throw ConfigError("branch " + pair_str(bs.target, bs.domain) +
                                  " is not strictly monotone");
            dmax = std::max(dmax, std::abs(d));
            dmin = std::min(dmin, std::abs(d));
        }
        if (dmax >= 1.0)
            throw ExpansionError("branch " + pair_str(bs.target, bs.domain) +
                                 " has sampled |y'| = " + std::to_string(dmax) +
                                 " >= 1");
        lambda_raw = std::max(lambda_raw, dmax);

        // Range: the image must stay inside the closure of the target.
        const double tol = 1e-9 * ti.length();
        if (br.image_lo() < ti.lo - tol || br.image_hi() > ti.hi + tol)
            throw RangeError("branch " + pair_str(bs.target, bs.domain) +
                             " image escapes its target interval");

        m.adj_[bs.target * n + bs.domain] = 1;
        m.branch_index_[bs.target * n + bs.domain] =
            static_cast<int>(m.branches_.size());
        m.on_domain_[bs.domain].push_back(static_cast<int>(m.branches_.size()));
        m.branches_.push_back(br);
    }
    if (m.branches_.empty()) throw ConfigError("map spec has no branches");
    m.lambda_ = std::min(lambda_raw * kSafetyFactor, 0.5 * (1.0 + lambda_raw));
    m.c_exp_ = 1.0;

    // Within each target interval the branch images must tile it: disjoint
    // interiors, no coverage gaps (T would be undefined there).
    for (int i = 0; i < n; ++i) {
        std::vector<const Branch*> into;
        for (const auto& br : m.branches_)
            if (br.target() == i) into.push_back(&br);
        if (into.empty())
            throw RangeError("interval " + std::to_string(i) +
                             " is not covered by any branch image");
        std::sort(into.begin(), into.end(), [](const Branch* a, const Branch* b) {
            return a->image_lo() < b->image_lo();
        });
        const Interval& iv = m.intervals_[i];
        const double tol = 1e-9 * iv.length();
        if (into.front()->image_lo() > iv.lo + tol ||
            into.back()->image_hi() < iv.hi - tol)
            throw RangeError("branch images do not cover interval " +
                             std::to_string(i));
        for (std::size_t k = 0; k + 1 < into.size(); ++k) {
            const double gap = into[k + 1]->image_lo() - into[k]->image_hi();
            if (gap < -tol)
                throw OverlapError("branch images overlap inside interval " +
                                   std::to_string(i));
            if (gap > tol)
                throw RangeError("coverage gap inside interval " +
                                 std::to_string(i));
        }
    }

    // Topological mixing: some A^k must be entrywise positive, k <= N^2.
    std::vector<unsigned char> p(m.adj_);
    m.mixing_n_ = 0;
    for (int k = 1; k <= n * n; ++k) {
        bool all = true;
        for (unsigned char v : p)
            if (!v) {
                all = false;
                break;
            }
        if (all) {
            m.mixing_n_ = k;
            break;
        }
        std::vector<unsigned char> q(static_cast<std::size_t>(n) * n, 0);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) {
                if (!p[a * n + c]) continue;
                for (int b = 0; b < n; ++b)
                    if (m.adj_[c * n + b]) q[a * n + b] = 1;
            }
        p.swap(q);
    }
    if (m.mixing_n_ == 0)
        throw MixingError("no power of the transition matrix up to N^2 is "
                          "entrywise positive");

    // Row gluing: full transition matrix plus value continuity of each
    // branch row at interior partition boundaries.
    m.rows_glue_ = true;
    for (unsigned char v : m.adj_)
        if (!v) m.rows_glue_ = false;
    if (m.rows_glue_) {
        for (int i = 0; i < n && m.rows_glue_; ++i)
            for (int j = 0; j + 1 < n && m.rows_glue_; ++j) {
                const Branch& left = m.branch(i, j);
                const Branch& right = m.branch(i, j + 1);
                const double xl = m.intervals_[j].hi;
                const double xr = m.intervals_[j + 1].lo;
                if (std::abs(xr - xl) > 1e-12) {
                    m.rows_glue_ = false;  // geometric gap: rows cannot glue
                    break;
                }
                if (std::abs(left.eval(xl) - right.eval(xr)) >
                    1e-9 * m.total_length_)
                    m.rows_glue_ = false;
            }
    }
    return m;
}

const Branch& MarkovMap::branch(int i, int j) const {
    const int idx = branch_index_[i * interval_count() + j];
    if (idx < 0)
        throw DomainError("no branch for symbol pair " + pair_str(i, j));
    return branches_[idx];
}

int MarkovMap::locate(double x) const {
    for (int i = 0; i < interval_count(); ++i)
        if (intervals_[i].contains_closed(x)) return i;
    throw DomainError("point " + std::to_string(x) +
                      " lies in no interval closure");
}

const Branch& MarkovMap::branch_through(double x) const {
    const int i = locate(x);
    const Branch* best = nullptr;
    double best_d = 1e300;
    for (const auto& br : branches_) {
        if (br.target() != i) continue;
        double d = 0.0;
        if (x < br.image_lo()) d = br.image_lo() - x;
        if (x > br.image_hi()) d = x - br.image_hi();
        if (d < best_d) {
            best_d = d;
            best = &br;
        }
    }
    if (!best || best_d > 1e-6 * total_length_)
        throw DomainError("no branch image contains " + std::to_string(x));
    return *best;
}

double MarkovMap::forward(double x) const {
    const Branch& br = branch_through(x);
    const Interval& dom = intervals_[br.domain()];
    // Solve y(u) = x for u in the closure of the domain interval.
    double lo = dom.lo, hi = dom.hi;
    double u = 0.5 * (lo + hi);
    const bool increasing = br.deriv(u) > 0.0;
    const double xtol = 1e-13 * std::max(1.0, std::abs(hi - lo));
    for (int it = 0; it < 100; ++it) {
        const double f = br.eval(u) - x;
        if (std::abs(f) < 1e-15) break;
        // Maintain the bisection bracket.
        if ((f > 0.0) == increasing)
            hi = u;
        else
            lo = u;
        const double d = br.deriv(u);
        double next = u - f / d;
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) < xtol) {
            u = next;
            break;
        }
        u = next;
    }
    return std::clamp(u, dom.lo, dom.hi);
}

std::pair<double, double> apply_word(const MarkovMap& map,
                                     const BranchWord& word, double x) {
    if (word.symbols.empty()) return {x, 1.0};
    const int last = word.last();
    if (last < 0 || last >= map.interval_count())
        throw WordMismatchError("word symbol out of range");
    if (!map.interval(last).contains_closed(x))
        throw DomainError("point outside the word's domain interval");
    double z = x, d = 1.0;
    for (int k = word.depth() - 1; k >= 0; --k) {
        const int i = word.symbols[k], j = word.symbols[k + 1];
        if (!map.admissible(i, j))
            throw WordMismatchError("inadmissible symbol pair " + pair_str(i, j));
        const Branch& br = map.branch(i, j);
        d *= br.deriv(z);
        z = br.eval(z);
    }
    return {z, d};
}

double birkhoff_sum(const MarkovMap& map,
                    const std::function<double(double)>& f,
                    const BranchWord& word, double x) {
    if (word.depth() == 0) return 0.0;
    const int last = word.last();
    if (!map.interval(last).contains_closed(x))
        throw DomainError("point outside the word's domain interval");
    // z_k = y_{i_k i_{k+1}}(z_{k+1}) with z_n = x; the orbit points of
    // y(x) under T are exactly z_0, ..., z_{n-1}.
    double z = x, sum = 0.0;
    for (int k = word.depth() - 1; k >= 0; --k) {
        const int i = word.symbols[k], j = word.symbols[k + 1];
        if (!map.admissible(i, j))
            throw WordMismatchError("inadmissible symbol pair " + pair_str(i, j));
        z = map.branch(i, j).eval(z);
        sum += f(z);
    }
    return sum;
}

double geometric_potential(const MarkovMap& map, double x) {
    const Branch& br = map.branch_through(x);
    const double u = map.forward(x);
    // phi(x) = -log|T'(x)| = log|y'(T x)| for the branch through x.
    return std::log(std::abs(br.deriv(u)));
}

RoofFunction::RoofFunction(std::function<double(double)> evaluator,
                           double lipschitz_constant, double infimum,
                           std::string name)
    : eval_(std::move(evaluator)),
      lip_(lipschitz_constant),
      inf_(infimum),
      name_(std::move(name)) {
    if (!(inf_ > 0.0))
        throw ConfigError("roof infimum must be positive");
    if (lip_ < 0.0) throw ConfigError("roof Lipschitz constant must be >= 0");
}

double RoofFunction::validate(const MarkovMap& map,
                              int samples_per_interval) const {
    double sup = 0.0;
    for (const auto& iv : map.intervals()) {
        double prev_x = iv.lo, prev_v = eval_(iv.lo);
        for (int k = 0; k < samples_per_interval; ++k) {
            const double x =
                iv.lo + iv.length() * k / double(samples_per_interval - 1);
            const double v = eval_(x);
            if (v < inf_ - 1e-12)
                throw ConfigError("roof dips below its declared infimum");
            sup = std::max(sup, v);
            if (k > 0) {
                const double q = std::abs(v - prev_v) / (x - prev_x);
                if (q > lip_ * 1.001 + 1e-12)
                    throw ConfigError(
                        "roof difference quotient exceeds the declared "
                        "Lipschitz constant");
            }
            prev_x = x;
            prev_v = v;
        }
    }
    return sup;
}

double roof_sup(const MarkovMap& map, const RoofFunction& r,
                int samples_per_interval) {
    double sup = 0.0;
    for (const auto& iv : map.intervals())
        for (int k = 0; k < samples_per_interval; ++k) {
            const double x =
                iv.lo + iv.length() * k / double(samples_per_interval - 1);
            sup = std::max(sup, r(x));
        }
    return sup;
}

} // namespace semiflow

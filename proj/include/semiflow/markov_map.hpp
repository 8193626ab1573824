#pragma once

// Expanding Markov interval maps configured by their inverse branches.
//
// A map is a finite family of disjoint open intervals I_i together with
// one strictly monotone contracting inverse branch y_ij : I_j -> I_i per
// admissible symbol pair. The forward map T is recovered by inverting a
// branch; the transfer-operator modules only ever touch the branches.

#include <functional>
#include <string>
#include <vector>

#include "semiflow/errors.hpp"

namespace semiflow {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
    bool contains_closed(double x) const { return x >= lo && x <= hi; }
};

enum class BranchFamily { Affine, Perturbed };

/// Description of one inverse branch y_ij. The affine family is
/// y(x) = scale*x + shift; the perturbed family post-composes the affine
/// base with t -> t + eps*t*(1-t) rescaled to the branch image, which
/// keeps closed-form derivatives while making the geometric potential
/// non-constant.
struct BranchSpec {
    int target = 0;  // i: branch image lies in I_i
    int domain = 0;  // j: branch is defined on I_j
    BranchFamily family = BranchFamily::Affine;
    double scale = 0.0;
    double shift = 0.0;
    double eps = 0.0;  // perturbation strength (Perturbed only)
};

struct MapSpec {
    std::vector<Interval> intervals;
    std::vector<BranchSpec> branches;
    double alpha = 0.5;  // Holder exponent
    std::string name;
};

class Branch {
public:
    Branch(const BranchSpec& spec, const Interval& target_iv,
           const Interval& domain_iv);

    double eval(double x) const;
    double deriv(double x) const;

    int target() const { return target_; }
    int domain() const { return domain_; }
    double image_lo() const { return img_lo_; }
    double image_hi() const { return img_hi_; }

private:
    int target_, domain_;
    BranchFamily family_;
    double scale_, shift_, eps_;
    double img_lo_, img_hi_;  // closure of y(I_j)
};

/// A finite admissible symbol sequence (i_0, ..., i_n). The associated
/// inverse branch of T^n is y_{i0 i1} o ... o y_{i(n-1) in}, defined on
/// I_{in} and mapping into the closure of I_{i0}. A word with fewer than
/// two symbols acts as the identity.
struct BranchWord {
    std::vector<int> symbols;
    int depth() const {
        return symbols.size() < 2 ? 0 : static_cast<int>(symbols.size()) - 1;
    }
    int first() const { return symbols.front(); }
    int last() const { return symbols.back(); }
};

class MarkovMap {
public:
    static MarkovMap build(const MapSpec& spec);

    int interval_count() const { return static_cast<int>(intervals_.size()); }
    const std::vector<Interval>& intervals() const { return intervals_; }
    const Interval& interval(int i) const { return intervals_[i]; }
    double alpha() const { return alpha_; }
    const std::string& name() const { return name_; }

    bool admissible(int i, int j) const { return adj_[i * interval_count() + j] != 0; }
    /// Branch y_ij, or throws DomainError when (i, j) is not admissible.
    const Branch& branch(int i, int j) const;
    const std::vector<Branch>& branches() const { return branches_; }
    /// Indices into branches() of the branches defined on I_j.
    const std::vector<int>& branches_on(int j) const { return on_domain_[j]; }

    /// Estimated contraction constant: sup |y'| over all branches times a
    /// 1.01 safety factor for between-node maxima.
    double lambda() const { return lambda_; }
    double expansion_prefactor() const { return c_exp_; }
    /// Minimal n with A^n entrywise positive.
    int mixing_power() const { return mixing_n_; }

    /// Index of the interval whose closure contains x (smallest index on
    /// shared endpoints); throws DomainError when x lies in no closure.
    int locate(double x) const;
    /// Total length of the union of the intervals.
    double total_length() const { return total_length_; }
    /// Leftmost and rightmost points of the domain.
    double hull_lo() const { return intervals_.front().lo; }
    double hull_hi() const { return intervals_.back().hi; }

    /// Forward map T(x), computed by Newton iteration (with bisection
    /// fallback) on the inverse branch through x. Tolerance 1e-13.
    double forward(double x) const;

    /// The branch whose image contains x (the branch inverted by T at x).
    const Branch& branch_through(double x) const;

    /// True when every symbol pair is admissible and each branch row
    /// glues continuously across interior partition boundaries, so that
    /// the row maps x -> y_{i, locate(x)}(x) are continuous on the hull.
    bool rows_glue() const { return rows_glue_; }

private:
    MarkovMap() = default;

    std::vector<Interval> intervals_;
    std::vector<Branch> branches_;
    std::vector<std::vector<int>> on_domain_;
    std::vector<int> branch_index_;  // i*N+j -> index or -1
    std::vector<unsigned char> adj_;
    double alpha_ = 0.5;
    double lambda_ = 0.0;
    double c_exp_ = 1.0;
    int mixing_n_ = 0;
    double total_length_ = 0.0;
    bool rows_glue_ = false;
    std::string name_;
};

/// Evaluates the word's composed inverse branch and its derivative at x.
/// Throws DomainError when x is outside the closure of I_{last}, and
/// WordMismatchError when consecutive symbols are not admissible.
std::pair<double, double> apply_word(const MarkovMap& map,
                                     const BranchWord& word, double x);

/// Birkhoff sum f_n(y(x)) = sum_{k=0}^{n-1} f(T^k y(x)) along the word,
/// evaluated from the intermediate branch compositions (no forward map).
double birkhoff_sum(const MarkovMap& map,
                    const std::function<double(double)>& f,
                    const BranchWord& word, double x);

/// Geometric potential phi(x) = -log|T'(x)|.
double geometric_potential(const MarkovMap& map, double x);

/// Positive roof function with known Lipschitz data.
class RoofFunction {
public:
    RoofFunction(std::function<double(double)> evaluator,
                 double lipschitz_constant, double infimum,
                 std::string name = "");

    double operator()(double x) const { return eval_(x); }
    double lipschitz() const { return lip_; }
    double infimum() const { return inf_; }
    const std::string& name() const { return name_; }

    /// Samples r over the map's intervals and checks positivity against
    /// the declared infimum and difference quotients against the declared
    /// Lipschitz constant (within 0.1% slack). Returns the sampled sup.
    double validate(const MarkovMap& map, int samples_per_interval = 512) const;

private:
    std::function<double(double)> eval_;
    double lip_;
    double inf_;
    std::string name_;
};

/// Sampled sup of r over the map domain.
double roof_sup(const MarkovMap& map, const RoofFunction& r,
                int samples_per_interval = 512);

} // namespace semiflow

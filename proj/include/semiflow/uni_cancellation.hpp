#pragma once

// Oscillation diagnostics for the roof cocycle: branch-pair Birkhoff
// differences R_{y1,y2} = r_n o y1 - r_n o y2, the weak-UNI witness
// search, the telescoping-coboundary cohomology test, the pi/(3|b|)
// partition construction along a witness, and the measured cancellation
// set of L_ib^n.

#include <cstdint>
#include <string>
#include <vector>

#include "semiflow/grid_function.hpp"
#include "semiflow/markov_map.hpp"
#include "semiflow/transfer_operator.hpp"

namespace semiflow {

/// R_{y1,y2}(x) for two literal branch words of equal depth sharing the
/// domain interval. Throws WordMismatchError otherwise.
double branch_pair_R(const MarkovMap& map, const RoofFunction& roof,
                     const BranchWord& w1, const BranchWord& w2, double x);

/// A depth-n pair of inverse-branch selections together with the two
/// points achieving oscillation D = |R(x1) - R(x2)|. rows1/rows2 hold
/// the leading n symbols; in glued mode the final symbol is the interval
/// of the evaluation point, so the selection is defined on the whole
/// hull (branch rows of a fully connected map glue continuously across
/// the partition). In literal mode both words end in domain_interval.
struct OscillationWitness {
    int depth = 0;
    std::vector<int> rows1, rows2;
    bool glued = false;
    int domain_interval = -1;
    double x1 = 0.0, x2 = 0.0;  // x1 < x2
    double d = 0.0;
    double domain_lo = 0.0, domain_hi = 0.0;
};

/// R of a witness's selection pair at any x of its domain.
double witness_R(const MarkovMap& map, const RoofFunction& roof,
                 const OscillationWitness& w, double x);

/// Searches selection pairs at the given depth (random sample up to
/// `budget` pairs when the pair count exceeds it) with endpoint-plus-
/// midpoint probes per interval, then refines the best point pair by
/// coordinate golden-section. A zero-oscillation witness is a valid
/// return.
OscillationWitness find_uni_witness(const MarkovMap& map,
                                    const RoofFunction& roof, int depth,
                                    std::size_t budget = 20000,
                                    std::uint64_t seed = 1u);

enum class CohomologyVerdict { NotCohomologous, LikelyCohomologous,
                               Inconclusive };

std::string to_string(CohomologyVerdict v);

struct CohomologyReport {
    CohomologyVerdict verdict = CohomologyVerdict::Inconclusive;
    double best_d = 0.0;
    int best_depth = 0;
    OscillationWitness witness;
    double coboundary_deviation = 0.0;
    double threshold = 0.0;
    std::vector<std::pair<int, double>> d_by_depth;
};

/// Two-pronged verdict: (i) max witness D over depths up to max_depth;
/// (ii) deviation from local constancy of r - h o T + h, where h is the
/// truncated telescoping function along a fixed periodic branch tail.
/// threshold <= 0 selects the default 1e-3 * |r|_Lip (with a small
/// positive floor so constant roofs are classified correctly).
CohomologyReport cohomology_verdict(const MarkovMap& map,
                                    const RoofFunction& roof, int max_depth,
                                    double threshold = 0.0,
                                    std::size_t budget = 20000,
                                    std::uint64_t seed = 1u);

struct PartitionPoints {
    double b = 0.0;
    double step = 0.0;                 // signed pi/(3|b|) toward R(x2)
    std::vector<double> points;        // x'_k, strictly increasing in k
    std::vector<double> r_values;      // R(x'_k)
    double gap_bound = 0.0;            // pi |x2-x1| / (D |b|)
    std::vector<int> well_spaced;      // k with x'_{k+1}-x'_k <= gap_bound
};

/// Solves R(x'_k) = R(x1) + k * pi/(3|b|) (oriented toward R(x2)) by
/// monotone-segment bisection along [x1, x2]. Throws
/// InsufficientOscillationError when D|b| is too small for 3 points.
PartitionPoints partition_points(const MarkovMap& map, const RoofFunction& roof,
                                 const OscillationWitness& witness, double b);

struct CancellationMeasure {
    int n_iter = 0;
    std::vector<double> delta_grid;
    std::vector<double> measure;   // mu_phi{ |L^n h| <= (1-delta)|h|_inf }
    double flat_fraction = 0.0;    // mass left above the smallest delta
};

/// Applies L_ib^n_iter to h and measures the SRB mass of the
/// cancellation sets over a delta grid. Throws HypothesisError when h
/// violates |h|_alpha <= 2 C3 |b|^alpha |h|_inf.
CancellationMeasure cancellation_set_measure(
    const MarkovMap& map, const Potential& pot, const SrbMeasure& srb,
    const RoofFunction& roof, double b, const GridFunction& h, int n_iter,
    const BNormContext& ctx,
    std::vector<double> delta_grid = {0.001, 0.003, 0.01, 0.03, 0.1});

/// Least depth n with 4 C3 C8^alpha lambda^(alpha n) |x1-x2|^alpha
/// pi^(alpha-1) <= D^alpha / 12 (reported, not enforced; guides the
/// cancellation-set iteration count).
int scale_condition_depth(double alpha, double c3, double c8, double lambda,
                          const OscillationWitness& witness);

} // namespace semiflow

#pragma once

// The H-plane-line consistency test random walk and its diagnostics.
//
// Degenerate draws are resampled: (t, t') again while h_i = 0, and h'_i
// again while h'_i lies in F*h_i (at P_0: while h'_0 lies in F*h_0). The
// per-plane resample counts are kept in the transcript.

#include <cstdint>
#include <optional>
#include <vector>

#include "rlcc/geometry.hpp"
#include "rlcc/rational.hpp"
#include "rlcc/reed_muller.hpp"
#include "rlcc/stats.hpp"
#include "rlcc/word.hpp"

namespace rlcc {

struct WalkTranscript {
  Point start;
  std::vector<PlaneRep> planes;  // P_0 .. P_t
  std::vector<LineRep> lines;    // l_1 .. l_t (lines[i-1] is l_i)
  // Index i-1 holds the draw made in step i.
  std::vector<FieldElem> s, s_prime, t, t_prime;
  std::vector<std::uint32_t> resamples;  // resamples[i]: resample events while forming P_i
  std::uint64_t resample_count = 0;

  unsigned steps() const { return static_cast<unsigned>(lines.size()); }
};

WalkTranscript walk_sample(const FieldCtx& ctx, unsigned m, const Point& x, unsigned steps, Rng& rng);
// Uniform point of the last plane.
Point walk_endpoint(const FieldCtx& ctx, const WalkTranscript& walk, Rng& rng);

struct CtrwResult {
  bool accept = true;
  WalkTranscript walk;
  std::optional<unsigned> failed_plane;
};

CtrwResult ctrw_accept(const RmWord& word, const Point& x, unsigned steps, Rng& rng,
                       LowDegreeMode mode = LowDegreeMode::exact, std::uint64_t q_s = 0);
// Runs the plane predicates of a given transcript.
CtrwResult ctrw_check(const RmWord& word, WalkTranscript walk, Rng& rng,
                      LowDegreeMode mode = LowDegreeMode::exact, std::uint64_t q_s = 0);

struct PredicateDistance {
  unsigned index = 0;  // 0: point predicate at P_0; i >= 1: line predicate at P_i
  Rational lower;      // certified lower bound on dist_A(w|P, RM|P)
  Rational upper;      // certified upper bound
  bool exact = false;
  bool violated = false;   // lower >= alpha
  bool ambiguous = false;  // lower < alpha <= upper
};

struct RobustVerdict {
  bool violated = false;
  std::optional<unsigned> witness;
  bool ambiguous = false;
  std::vector<PredicateDistance> distances;
};

enum class CertifyMethod { automatic, brute_force, planted };

// Brute force needs |F|^{C(d+2,2)} within budget; planted needs `word` to be
// a PlantedWord over the codeword of c_star. Ambiguous predicates count as
// not violated.
RobustVerdict robust_violation_check(const RmWord& word, const RmPoly& c_star, const WalkTranscript& walk,
                                     const Rational& alpha, CertifyMethod method = CertifyMethod::automatic,
                                     bool short_circuit = true, std::uint64_t budget = kBruteForceBudget);

struct ProportionReport {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double se = 0.0;
  Interval wilson;
  double bound = 0.0;
  bool pass = false;
};

ProportionReport make_upper_report(std::uint64_t hits, std::uint64_t trials, double bound);
ProportionReport make_lower_report(std::uint64_t hits, std::uint64_t trials, double bound);

struct ResampleStats {
  std::vector<std::uint64_t> events;         // total resample events per plane index
  std::vector<std::uint64_t> trials_hit;     // trials with at least one resample per plane index
  std::uint64_t trials = 0;
  Rational p0_exact;                         // (p-1)/(p^m-1)
  double per_step_bound = 0.0;               // 3/|F|
  bool pass = false;                         // steps i >= 1 within bound + 3 se

  void merge(const WalkTranscript& walk);
  void finish(const FieldCtx& ctx, unsigned m);
};

struct MixingReport {
  ProportionReport hit;  // Pr[z_end corrupted] vs delta + 2/|H|
  Rational bound_exact;
  ResampleStats resamples;
};

// Start points are uniform; each trial adds a targeted flip at its start.
MixingReport mixing_exp(const RmParams& params, const PointCorruption& corruption, const Rational& delta,
                        unsigned steps, std::uint64_t trials, std::uint64_t seed, unsigned threads);

enum class SampleMode { exhaustive, sampled };

struct MatrixReport {
  std::uint32_t p = 0;
  unsigned m = 0;
  SampleMode mode = SampleMode::exhaustive;
  std::uint64_t pairs = 0;
  std::uint64_t singular = 0;
  Rational singular_exact;   // 1 - prod (1 - p^-i)
  Rational series_sum;        // sum p^-i
  Rational bound;            // 2/p
  std::uint64_t product_min_hits = 0;
  std::uint64_t product_max_hits = 0;
  std::uint64_t cells = 0;
  bool uniform_exact = false;
  ChiSquareResult chi2;
  bool pass = false;
};

MatrixReport matrix_product_check(std::uint32_t p, unsigned m, SampleMode mode, std::uint64_t samples = 0,
                                  std::uint64_t seed = 0, std::uint64_t budget = 10'000'000);

struct LineSamplingRow {
  Rational epsilon;
  std::uint64_t deviations = 0;  // pairs with |fraction - mu| > epsilon
  std::uint64_t total = 0;
  Rational tail;                 // exact in exhaustive mode
  Rational bound;                // mu / (|F| eps^2)
  double se = 0.0;
  bool pass = false;
};

struct LineSamplingReport {
  SampleMode mode = SampleMode::exhaustive;
  Rational mu;
  std::vector<LineSamplingRow> rows;
  bool pass = false;
};

// `set` flags points of F^2 by point code. Exhaustive over all (x, y) when
// |F| <= 16 unless forced sampled.
LineSamplingReport line_sampling_exp(const FieldCtx& ctx, const std::vector<bool>& set,
                                     const std::vector<Rational>& epsilons,
                                     std::optional<SampleMode> mode = std::nullopt, std::uint64_t samples = 0,
                                     std::uint64_t seed = 0);

struct EventsReport {
  std::uint64_t trials = 0;
  std::uint64_t f0_trials = 0;              // trials where P_0 has >= (rho - 2 alpha) n^2 nonzeros
  std::vector<std::uint64_t> all_f;         // index i: trials (given F_0) with F_1..F_i
  std::vector<std::uint64_t> eps_hits;      // index i: trials with F_1..F_{i-1} and E_i
  std::vector<std::uint64_t> line_fail;     // index i: F_0..F_{i-1} held and l_i below 2 alpha n
  std::vector<std::uint64_t> line_den;      // index i: F_0..F_{i-1} held
  std::vector<double> epsilon;              // eps_i estimates
  double lhs = 0.0;                         // Pr[F_1 .. F_t]
  double rhs = 0.0;                         // (1 - 4/|F|)^t - sum eps_i
  double lhs_se = 0.0;
  bool peel_pass = false;
  bool line_pass = false;
};

// Nonzeros are counted relative to the base codeword, i.e. as corrupted points.
EventsReport events_exp(const RmParams& params, const PointCorruption& corruption, const Rational& alpha,
                        unsigned steps, std::uint64_t trials, std::uint64_t seed, unsigned threads);

struct SoundnessReport {
  std::uint64_t trials = 0;
  std::uint64_t violated = 0;
  std::uint64_t ambiguous = 0;
  std::vector<std::uint64_t> witness;  // histogram by predicate index
  Rational sigma;                      // theorem value
  ProportionReport freq;
  ResampleStats resamples;
};

// Fixed word: c_star plus noise at rate delta; each trial flips its uniform
// start point and walks m steps.
SoundnessReport soundness_exp(const RmParams& params, const RmPoly& c_star, const Rational& delta,
                              std::uint64_t noise_seed, const Rational& alpha, unsigned steps,
                              std::uint64_t trials, std::uint64_t seed, unsigned threads,
                              CertifyMethod method = CertifyMethod::automatic);

// (1 - 4/|F|)^m - (delta + 2/|H|) / (rho - 2 alpha)
Rational sigma_rw(std::uint64_t n, std::uint32_t p, unsigned m, const Rational& rho, const Rational& delta,
                  const Rational& alpha);
Rational endpoint_bound(const Rational& delta, std::uint32_t p);

}  // namespace rlcc

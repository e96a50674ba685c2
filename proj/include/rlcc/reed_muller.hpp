#pragma once

// Reed-Muller code RM_F(m, d) in coefficient form.
//
// Monomials are ordered graded-lexicographically: by total degree, then by
// the exponent tuple compared lexicographically, ascending. For bivariate
// polynomials Q(t, s) the tuple is (deg_t, deg_s), so the order starts
// 1, s, t, s^2, t*s, t^2, ...

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rlcc/field.hpp"
#include "rlcc/geometry.hpp"
#include "rlcc/rational.hpp"
#include "rlcc/rng.hpp"

namespace rlcc {

class RmError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct Monomial {
  std::array<std::uint16_t, Point::kMaxDim> e{};
  unsigned total = 0;
};

std::vector<Monomial> monomial_basis(unsigned m, unsigned d);
// Position of (deg_t, deg_s) in the bivariate graded-lex order.
std::size_t bivariate_index(unsigned deg_t, unsigned deg_s);

struct RmParams {
  FieldCtx ctx;
  unsigned m = 0;
  unsigned d = 0;
  std::uint64_t k = 0;
  Rational rho;

  // Requires 1 <= m <= 8 and d < n.
  static RmParams make(const FieldCtx& ctx, unsigned m, unsigned d);
  std::uint64_t n() const { return ctx.n(); }
  // Message length of the bivariate code RM_F(2, d).
  std::uint64_t k2() const { return binomial(d + 2, 2); }
};

struct RmPoly {
  std::vector<FieldElem> coeffs;
};

RmPoly encode(const RmParams& params, std::span<const FieldElem> message);
RmPoly random_poly(const RmParams& params, Rng& rng);

// Direct evaluation by powers; reference implementation.
FieldElem evaluate(const RmParams& params, const RmPoly& poly, const Point& x);

// Evaluation with per-term discrete logs and digit-wise accumulation of the
// sum. Immutable after construction; safe to share across threads.
class PolyEvaluator {
 public:
  PolyEvaluator(const RmParams& params, const RmPoly& poly);

  FieldElem operator()(const Point& x) const;
  const RmParams& params() const { return params_; }
  const RmPoly& poly() const { return poly_; }

 private:
  FieldElem eval_slow(const Point& x) const;

  RmParams params_;
  RmPoly poly_;
  std::vector<Monomial> basis_;
  bool fast_ = false;
  // Fast path data.
  std::vector<std::uint32_t> term_log_;   // log of coefficient, nonzero terms only
  std::vector<std::uint16_t> term_exp_;   // m exponents per nonzero term
  std::vector<std::uint32_t> ext_exp_;    // exp table over [0, (m+1)*order)
  std::vector<std::uint64_t> packed_;     // code -> coefficient digits in lanes
  unsigned lane_bits_ = 0;
  std::uint64_t flush_every_ = 0;
};

std::vector<FieldElem> evaluation_table(const RmParams& params, const RmPoly& poly);

// Bivariate helpers; coeffs has length C(d+2, 2) in graded-lex order.
FieldElem evaluate_bivariate(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> coeffs,
                             FieldElem t, FieldElem s);
// All n^2 values in plane grid order (index j*n + k holds Q(elem(j), elem(k))).
std::vector<FieldElem> bivariate_grid(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> coeffs);

// Tensor interpolation on the node grid {0..d} x {0..d} (integer codes).
class PlaneInterpolator {
 public:
  PlaneInterpolator(const FieldCtx& ctx, unsigned d);

  // node_values[j*(d+1) + k] = value at (elem(j), elem(k)). Returns the
  // bivariate coefficients when no monomial above total degree d is needed.
  std::optional<std::vector<FieldElem>> fit(std::span<const FieldElem> node_values) const;
  // Univariate: values at nodes 0..d -> coefficients of degree 0..d.
  std::vector<FieldElem> fit_univariate(std::span<const FieldElem> node_values) const;

  unsigned d() const { return d_; }

 private:
  FieldCtx ctx_;
  unsigned d_;
  std::vector<FieldElem> vinv_;  // (d+1)x(d+1), row a gives coefficient of x^a
};

std::vector<FieldElem> restrict_to_plane(const PolyEvaluator& eval, const PlaneRep& plane);
// As above without the rank check: the bivariate Q(t,s) = f(a + t*u + s*v).
std::vector<FieldElem> restrict_parameterized(const PolyEvaluator& eval, const Point& anchor,
                                              const Point& dir1, const Point& dir2);

enum class LowDegreeMode { exact, sampled };

struct LowDegreeResult {
  bool low_degree = false;
  std::vector<FieldElem> coeffs;  // fitted coefficients when low_degree
};

using GridReader = std::function<FieldElem(std::uint64_t grid_index)>;

// Exact mode checks all n^2 points; sampled mode checks the fit and then
// q_s uniform points, so it can accept non-members (one-sided error).
LowDegreeResult is_low_degree_on_plane(const FieldCtx& ctx, unsigned d, const GridReader& read,
                                       LowDegreeMode mode = LowDegreeMode::exact,
                                       std::uint64_t q_s = 0, Rng* rng = nullptr);
LowDegreeResult is_low_degree_on_plane(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> values,
                                       LowDegreeMode mode = LowDegreeMode::exact,
                                       std::uint64_t q_s = 0, Rng* rng = nullptr);

// |{i in A : x_i != y_i}| / (2|A|) + |{i : x_i != y_i}| / (2 len).
Rational dist_weighted(std::span<const FieldElem> x, std::span<const FieldElem> y,
                       std::span<const std::uint64_t> A);
Rational hamming_fraction(std::span<const FieldElem> x, std::span<const FieldElem> y);

enum class AugmentKind { point, line };

// Plane word followed by a tail of n^2 symbols, each a repetition of a base
// symbol: the selected point (point type) or n copies of a line restriction
// (line type, tail index c*n + j reads line position j).
class AugmentedWord {
 public:
  static AugmentedWord at_point(std::vector<FieldElem> base, std::uint64_t n, std::uint64_t point_index);
  static AugmentedWord at_line(std::vector<FieldElem> base, std::uint64_t n,
                               std::vector<std::uint64_t> line_indices);
  // The line Line(anchor, dir1) of the plane: grid column k = 0.
  static AugmentedWord at_anchor_line(std::vector<FieldElem> base, std::uint64_t n);

  AugmentKind kind() const { return kind_; }
  std::uint64_t n() const { return n_; }
  std::uint64_t size() const { return 2 * n_ * n_; }
  const std::vector<FieldElem>& base() const { return base_; }
  std::uint64_t resolve(std::uint64_t i) const;
  FieldElem operator[](std::uint64_t i) const { return base_[resolve(i)]; }
  std::vector<FieldElem> materialize() const;
  // Same selector applied to another plane word.
  AugmentedWord with_base(std::vector<FieldElem> base) const;
  // Base indices whose weight is doubled: the point, or the line.
  std::vector<std::uint64_t> selector() const;

 private:
  AugmentKind kind_ = AugmentKind::point;
  std::uint64_t n_ = 0;
  std::vector<FieldElem> base_;
  std::uint64_t point_ = 0;
  std::vector<std::uint64_t> line_;
};

// Base index read by tail coordinate `tail` (0 <= tail < n^2).
inline std::uint64_t anchor_line_base_index(std::uint64_t n, std::uint64_t tail) { return (tail % n) * n; }

struct NearestResult {
  std::vector<FieldElem> coeffs;
  Rational distance;
};

constexpr std::uint64_t kBruteForceBudget = 10'000'000;

// Exact minimiser over all |F|^{C(d+2,2)} bivariate polynomials. With A empty
// the metric is relative Hamming distance, otherwise dist_A.
NearestResult nearest_codeword_bruteforce(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> values,
                                          std::span<const std::uint64_t> A = {},
                                          std::uint64_t budget = kBruteForceBudget);
// Plain Hamming distance from an augmented word to the augmented language
// with the same selector.
NearestResult nearest_augmented_bruteforce(const FieldCtx& ctx, unsigned d, const AugmentedWord& word,
                                           std::uint64_t budget = kBruteForceBudget);

}  // namespace rlcc

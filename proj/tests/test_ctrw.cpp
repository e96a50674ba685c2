#include "doctest.h"

#include "rlcc/ctrw.hpp"

using namespace rlcc;

namespace {

RmParams preset(std::uint32_t p, unsigned m, unsigned d) { return RmParams::make(FieldCtx::make(p, m), m, d); }

std::shared_ptr<const RmWord> codeword(const RmParams& params, Rng& rng) {
  return std::make_shared<const CodewordWord>(params, random_poly(params, rng));
}

}  // namespace

TEST_CASE("walk transcript invariants") {
  const auto params = preset(2, 3, 1);
  const auto& f = params.ctx;
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Point x = sample_point(f, 3, rng);
    const auto w = walk_sample(f, 3, x, 3, rng);
    REQUIRE(w.planes.size() == 4);
    REQUIRE(w.lines.size() == 3);
    REQUIRE(w.planes[0].anchor == x);
    REQUIRE(w.planes[0].is_h_plane());
    for (unsigned i = 1; i <= 3; ++i) {
      const auto& prev = w.planes[i - 1];
      const auto& cur = w.planes[i];
      REQUIRE(plane_coordinates(f, prev, w.lines[i - 1].anchor));
      REQUIRE(cur.anchor == w.lines[i - 1].anchor);
      REQUIRE(cur.dir1 == w.lines[i - 1].dir);
      REQUIRE(cur.dir1 == axpy(f, scale(f, w.t[i - 1], prev.dir1), w.t_prime[i - 1], prev.dir2));
      REQUIRE(cur.anchor == axpy(f, axpy(f, prev.anchor, w.s[i - 1], prev.dir1), w.s_prime[i - 1], prev.dir2));
      REQUIRE(is_h_vector(f, cur.dir2));
      REQUIRE(is_rank2(f, cur.dir1, cur.dir2));
    }
  }
  Rng a(99), b(99);
  const Point x = Point::zero(3);
  const auto wa = walk_sample(f, 3, x, 3, a);
  const auto wb = walk_sample(f, 3, x, 3, b);
  for (unsigned i = 0; i < 4; ++i) CHECK(format_plane(wa.planes[i]) == format_plane(wb.planes[i]));
}

TEST_CASE("P_0 resample rate at p=2, m=2") {
  // Oracle: among ordered pairs of nonzero vectors of GF(2)^2, 3 of 9 are equal.
  const auto f = FieldCtx::make(2, 2);
  ResampleStats stats;
  Rng rng(8);
  const std::uint64_t trials = 20000;
  for (std::uint64_t i = 0; i < trials; ++i) stats.merge(walk_sample(f, 2, sample_point(f, 2, rng), 2, rng));
  stats.finish(f, 2);
  CHECK(stats.p0_exact == Rational(1, 3));
  const double est = proportion(stats.trials_hit[0], trials);
  CHECK(std::abs(est - 1.0 / 3) <= 3 * std::sqrt(1.0 / 3 * 2 / 3 / trials));
}

TEST_CASE("ctrw accepts codewords") {
  for (auto params : {preset(2, 3, 1), preset(3, 3, 4)}) {
    Rng rng(17);
    for (int rep = 0; rep < 30; ++rep) {
      const auto w = codeword(params, rng);
      REQUIRE(ctrw_accept(*w, sample_point(params.ctx, params.m, rng), params.m, rng).accept);
    }
    const TableWord zero(params, std::vector<FieldElem>(point_space_size(params.ctx, params.m)));
    CHECK(ctrw_accept(zero, Point::zero(params.m), params.m, rng).accept);
    const auto w = codeword(params, rng);
    CHECK(ctrw_accept(*w, Point::zero(params.m), params.m, rng, LowDegreeMode::sampled, 20).accept);
  }
}

TEST_CASE("ctrw rejects a walk through a randomized plane") {
  const auto params = preset(3, 3, 4);
  const auto& f = params.ctx;
  Rng rng(23);
  auto base = codeword(params, rng);
  int rejected = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    auto walk = walk_sample(f, 3, sample_point(f, 3, rng), 3, rng);
    PointCorruption c(f, 3);
    c.add_plane_blot(walk.planes[2], rng.next());
    const PlantedWord w(base, c);
    const auto r = ctrw_check(w, walk, rng);
    rejected += !r.accept;
    if (!r.accept) REQUIRE(*r.failed_plane <= 2);
  }
  CHECK(rejected >= 999);
}

TEST_CASE("robust check: clean words are never violated") {
  const auto params = preset(2, 2, 1);
  Rng rng(5);
  const Rational alpha = params.rho / 8;
  for (int rep = 0; rep < 20; ++rep) {
    const auto poly = random_poly(params, rng);
    const CodewordWord w(params, poly);
    const auto walk = walk_sample(params.ctx, 2, sample_point(params.ctx, 2, rng), 2, rng);
    const auto v = robust_violation_check(w, poly, walk, alpha, CertifyMethod::brute_force, false);
    REQUIRE(!v.violated);
    REQUIRE(!v.witness);
    for (const auto& d : v.distances) REQUIRE(d.upper == 0);
  }
  const auto big = preset(17, 3, 32);
  const auto poly = random_poly(big, rng);
  auto base = std::make_shared<const CodewordWord>(big, poly);
  const PlantedWord clean(base, PointCorruption(big.ctx, 3));
  const auto walk = walk_sample(big.ctx, 3, sample_point(big.ctx, 3, rng), 3, rng);
  const auto v = robust_violation_check(clean, poly, walk, big.rho / 8);
  CHECK(!v.violated);
  CHECK(v.distances.size() == 4);
  CHECK_THROWS(robust_violation_check(*base, poly, walk, big.rho / 8));
}

TEST_CASE("robust check: one wrong point makes P_0 alpha-far on GF(8)^3, d=1") {
  const auto params = preset(2, 3, 1);
  Rng rng(41);
  const Rational alpha = params.rho / 8;
  for (int rep = 0; rep < 20; ++rep) {
    const auto poly = random_poly(params, rng);
    auto base = std::make_shared<const CodewordWord>(params, poly);
    const Point x = sample_point(params.ctx, 3, rng);
    PointCorruption c(params.ctx, 3);
    c.add_targeted(x);
    const PlantedWord w(base, c);
    const auto walk = walk_sample(params.ctx, 3, x, 3, rng);
    const auto exact = robust_violation_check(w, poly, walk, alpha, CertifyMethod::brute_force, false);
    REQUIRE(exact.distances[0].lower >= alpha);
    REQUIRE(exact.witness == 0u);
    const auto planted = robust_violation_check(w, poly, walk, alpha, CertifyMethod::planted, false);
    for (unsigned i = 0; i < 4; ++i) {
      REQUIRE(planted.distances[i].lower <= exact.distances[i].lower);
      REQUIRE(planted.distances[i].upper >= exact.distances[i].upper);
    }
  }
}

TEST_CASE("planted bounds bracket the exact distance under noise") {
  const auto params = preset(2, 3, 1);
  Rng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    const auto poly = random_poly(params, rng);
    auto base = std::make_shared<const CodewordWord>(params, poly);
    PointCorruption c(params.ctx, 3);
    c.set_noise(Rational(rep % 4, 10), rng.next());
    const Point x = sample_point(params.ctx, 3, rng);
    c.add_targeted(x);
    const PlantedWord w(base, c);
    const auto walk = walk_sample(params.ctx, 3, x, 3, rng);
    const auto exact = robust_violation_check(w, poly, walk, Rational(1, 10), CertifyMethod::brute_force, false);
    const auto planted = robust_violation_check(w, poly, walk, Rational(1, 10), CertifyMethod::planted, false);
    for (unsigned i = 0; i < 4; ++i) {
      REQUIRE(planted.distances[i].lower <= exact.distances[i].lower);
      REQUIRE(exact.distances[i].lower <= planted.distances[i].upper);
    }
  }
}

TEST_CASE("robust check is invariant under subtracting the codeword") {
  for (auto params : {preset(2, 2, 1), preset(2, 3, 1)}) {
    const auto& f = params.ctx;
    Rng rng(13);
    const auto total = point_space_size(f, params.m);
    const RmPoly zero{std::vector<FieldElem>(params.k)};
    for (int rep = 0; rep < 20; ++rep) {
      const auto poly = random_poly(params, rng);
      const auto clean = evaluation_table(params, poly);
      std::vector<FieldElem> w(total), diff(total);
      for (std::uint64_t i = 0; i < total; ++i) {
        w[i] = rng.below(4) == 0 ? sample_elem(f, rng) : clean[i];
        diff[i] = f.sub(w[i], clean[i]);
      }
      const TableWord tw(params, w), td(params, diff);
      const auto walk = walk_sample(f, params.m, sample_point(f, params.m, rng), params.m, rng);
      const auto a = robust_violation_check(tw, poly, walk, params.rho / 8, CertifyMethod::brute_force, false);
      const auto b = robust_violation_check(td, zero, walk, params.rho / 8, CertifyMethod::brute_force, false);
      REQUIRE(a.violated == b.violated);
      REQUIRE(a.witness == b.witness);
      for (unsigned i = 0; i < a.distances.size(); ++i) REQUIRE(a.distances[i].lower == b.distances[i].lower);
    }
  }
}

TEST_CASE("mixing extremes") {
  const auto params = preset(2, 3, 1);
  PointCorruption none(params.ctx, 3);
  const auto r0 = mixing_exp(params, none, 0, 3, 500, 1, 2);
  // The start point itself counts, so only z_end == x hits.
  CHECK(r0.hit.hits <= 40);
  PointCorruption all(params.ctx, 3);
  all.set_noise(1, 2);
  const auto r1 = mixing_exp(params, all, 1, 3, 500, 1, 2);
  CHECK(r1.hit.hits == 500);
  CHECK(r0.resamples.trials == 500);
}

TEST_CASE("mixing at moderate parameters respects delta + 2/|H|") {
  const auto params = preset(3, 3, 4);
  PointCorruption c(params.ctx, 3);
  c.set_noise(Rational(1, 10), 4);
  const auto r = mixing_exp(params, c, Rational(1, 10), 3, 5000, 9, 2);
  CHECK(r.hit.pass);
  CHECK(r.bound_exact == Rational(1, 10) + Rational(2, 3));
  CHECK(r.resamples.pass);
}

TEST_CASE("matrix product claim exhaustively at p=2, m=2") {
  const auto r = matrix_product_check(2, 2, SampleMode::exhaustive);
  // Oracle: a 2x2 matrix over GF(2) is invertible iff ad - bc is odd.
  std::uint64_t inv = 0;
  for (unsigned a = 0; a < 2; ++a)
    for (unsigned b = 0; b < 2; ++b)
      for (unsigned c = 0; c < 2; ++c)
        for (unsigned d = 0; d < 2; ++d) inv += (a * d + b * c) % 2;
  CHECK(inv == 6);
  CHECK(r.pairs == 256);
  CHECK(r.singular == (16 - inv) * 16);
  CHECK(r.product_min_hits == 6);
  CHECK(r.product_max_hits == 6);
  CHECK(r.uniform_exact);
  CHECK(r.singular_exact == Rational(10, 16));
  CHECK(r.series_sum == Rational(3, 4));
  CHECK(r.bound == 1);
  CHECK(r.pass);
  CHECK_THROWS(matrix_product_check(3, 3, SampleMode::exhaustive));
}

TEST_CASE("matrix product claim sampled at p=3, m=2") {
  const auto r = matrix_product_check(3, 2, SampleMode::sampled, 200000, 5);
  CHECK(r.chi2.p_value > 1e-3);
  CHECK(r.singular_exact == Rational(1) - Rational(2, 3) * Rational(8, 9));
  CHECK(r.pass);
}

TEST_CASE("line sampling tail on GF(8)^2") {
  const auto f = FieldCtx::make(2, 3);
  const std::vector<Rational> eps{Rational(1, 8), Rational(1, 4), Rational(1, 2)};
  const auto empty = line_sampling_exp(f, std::vector<bool>(64, false), eps);
  const auto full = line_sampling_exp(f, std::vector<bool>(64, true), eps);
  for (const auto& r : empty.rows) CHECK(r.deviations == 0);
  for (const auto& r : full.rows) CHECK(r.deviations == 0);
  std::vector<bool> set(64, false);
  Rng rng(2);
  for (int placed = 0; placed < 16;) {
    const auto i = rng.below(64);
    if (!set[i]) set[i] = true, ++placed;
  }
  const auto r = line_sampling_exp(f, set, eps);
  CHECK(r.mode == SampleMode::exhaustive);
  CHECK(r.mu == Rational(1, 4));
  CHECK(r.rows[1].bound == Rational(1, 2));
  CHECK(r.rows[1].total == 4096);
  CHECK(r.pass);
  const auto mc = line_sampling_exp(f, set, eps, SampleMode::sampled, 20000, 3);
  CHECK(mc.pass);
}

TEST_CASE("event bookkeeping at GF(27)^3") {
  const auto params = preset(3, 3, 4);
  std::vector<bool> first(27, false);
  for (unsigned i = 0; i < 18; ++i) first[i] = true;
  PointCorruption c(params.ctx, 3);
  c.set_coordinate_blot(first, 6);
  const auto r = events_exp(params, c, params.rho / 8, 3, 3000, 12, 2);
  CHECK(r.f0_trials > 1000);
  CHECK(r.peel_pass);
  CHECK(r.line_pass);
}

TEST_CASE("soundness constants at |F| = 17^3, d = 32") {
  const auto params = preset(17, 3, 32);
  const Rational delta(1, 10);
  const Rational sigma = sigma_rw(params.n(), 17, 3, params.rho, delta, params.rho / 8);
  CHECK(to_decimal(sigma, 6) == "0.705461");
  CHECK(to_decimal(endpoint_bound(delta, 17), 6) == "0.217647");
}

TEST_CASE("soundness experiment at moderate parameters") {
  const auto params = preset(3, 3, 4);
  Rng rng(31);
  const auto poly = random_poly(params, rng);
  const auto r = soundness_exp(params, poly, Rational(1, 20), 8, params.rho / 8, 3, 300, 4, 2);
  CHECK(r.trials == 300);
  CHECK(r.freq.pass);
}

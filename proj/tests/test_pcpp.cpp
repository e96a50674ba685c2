#include "doctest.h"

#include <cstdio>

#include "rlcc/pcpp.hpp"
#include "rlcc/stats.hpp"

using namespace rlcc;

namespace {

std::vector<FieldElem> coeffs_from_index(const FieldCtx& f, std::uint64_t idx, std::uint64_t k2) {
  std::vector<FieldElem> out(k2);
  for (auto& c : out) {
    c = f.elem(idx % f.n());
    idx /= f.n();
  }
  return out;
}

SymbolReader reader_of(const CanonicalProof& proof) {
  return [&proof](std::uint64_t i) { return proof.symbols[i]; };
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PcppParams::make(1, 0, 9, Rational(1, 8)), PcppError);
  CHECK_THROWS_AS(PcppParams::make(1, 1, 8, Rational(1, 8)), PcppError);
  CHECK_THROWS_AS(PcppParams::make(1, 1, 9, Rational(0)), PcppError);
  const auto p = PcppParams::make(1, 2, 9, Rational(1, 8));
  CHECK(p.k2 == 3);
  CHECK(p.L() == 27);
  CHECK(p.verifier_queries() == 2 * (4 + 3));
}

TEST_CASE("canonical proofs are always accepted on GF(4), d = 1") {
  const auto f = FieldCtx::make(2, 2);
  const auto params = PcppParams::make(1, 3, 9, Rational(1, 8));
  Rng rng(3);
  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    const auto coeffs = coeffs_from_index(f, idx, params.k2);
    const auto grid = bivariate_grid(f, 1, coeffs);
    for (const auto& member : {AugmentedWord::at_point(grid, 4, idx % 16), AugmentedWord::at_anchor_line(grid, 4)}) {
      const auto proof = canonical_proof(f, params, member);
      REQUIRE(proof.symbols == proof_from_coeffs(params, coeffs).symbols);
      for (int rep = 0; rep < 20; ++rep) {
        const auto res = verify_proximity(f, params, AugmentedView::of(member), reader_of(proof), rng);
        REQUIRE(res.accept);
        REQUIRE(res.word_queries == 2 * params.q_v);
        REQUIRE(res.proof_queries == params.q_v * (2 + params.k2));
      }
    }
  }
}

TEST_CASE("non-members have no canonical proof") {
  const auto f = FieldCtx::make(2, 2);
  const auto params = PcppParams::make(1, 1, 9, Rational(1, 8));
  auto grid = bivariate_grid(f, 1, std::vector<FieldElem>{FieldElem{1}, FieldElem{2}, FieldElem{3}});
  grid[5] = f.add(grid[5], FieldCtx::one());
  CHECK_THROWS_AS(canonical_proof(f, params, AugmentedWord::at_point(grid, 4, 0)), PcppError);
}

TEST_CASE("anchored view matches the anchor-line word") {
  const auto f = FieldCtx::make(2, 3);
  Rng rng(8);
  std::vector<FieldElem> grid(64);
  for (auto& v : grid) v = sample_elem(f, rng);
  const auto word = AugmentedWord::at_anchor_line(grid, 8);
  const auto view = AugmentedView::anchored(AugmentKind::line, 8, [&](std::uint64_t g) { return grid[g]; });
  for (std::uint64_t i = 0; i < word.size(); ++i) REQUIRE(view[i] == word[i]);
}

TEST_CASE("proof symbol correction on GF(8) with one corrupted copy") {
  const auto f = FieldCtx::make(2, 3);
  const auto params = PcppParams::make(1, 1, 9, Rational(1, 8));
  REQUIRE(params.L() == 27);
  Rng rng(21);
  std::uint64_t returned = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<FieldElem> coeffs(3);
    for (auto& c : coeffs) c = sample_elem(f, rng);
    const auto grid = bivariate_grid(f, 1, coeffs);
    auto proof = proof_from_coeffs(params, coeffs);
    const std::uint64_t bad = rng.below(params.R);
    for (std::uint64_t c = 0; c < params.k2; ++c) {
      auto& s = proof.symbols[bad * params.k2 + c];
      s = f.add(s, FieldCtx::one());
    }
    const auto view = AugmentedView::anchored(AugmentKind::point, 8, [&](std::uint64_t g) { return grid[g]; });
    const std::uint64_t offset = rng.below(params.L());
    const auto sc = correct_proof_symbol(f, params, view, reader_of(proof), offset, rng);
    REQUIRE(sc.strict_majority);
    REQUIRE(sc.queries == params.R - 1 + sc.verify.word_queries + sc.verify.proof_queries);
    if (sc.symbol) {
      ++returned;
      REQUIRE(*sc.symbol == coeffs[offset % params.k2]);
    }
  }
  // One round rejects when check (a) or (b) touches the bad copy: 2/9 + 7/9 * 1/9.
  const double p_accept = 1.0 - (2.0 / 9 + 7.0 / 81);
  CHECK(std::abs(proportion(returned, 300) - p_accept) <= 4 * std::sqrt(p_accept * (1 - p_accept) / 300));
}

TEST_CASE("far acceptance decreases with repetitions") {
  const auto f = FieldCtx::make(2, 2);
  const Rational rho_prox(1, 16);
  std::vector<double> acc;
  for (unsigned q = 1; q <= 4; ++q) {
    const auto step = pcpp_far_acceptance(f, PcppParams::make(1, q, 9, rho_prox), 600, 77, 1);
    CHECK(step.families.size() == 6);
    for (const auto& fam : step.families) CHECK(fam.min_distance >= rho_prox);
    acc.push_back(step.max_acceptance);
  }
  for (std::size_t i = 1; i < acc.size(); ++i) {
    const double se = std::sqrt(0.25 / 600);
    CHECK(acc[i] <= acc[i - 1] + 3 * se);
  }
  CHECK(acc.back() < acc.front());
}

TEST_CASE("calibration and its sidecar") {
  const auto f = FieldCtx::make(2, 2);
  const auto cal = calibrate_pcpp(f, 1, 9, Rational(1, 16), 400, 5, 12, 1);
  REQUIRE(cal.q_v.has_value());
  CHECK(cal.sigma_pcpp <= 0.5);
  CHECK(cal.honest_accepted == cal.honest_trials);
  CHECK(cal.steps.size() == *cal.q_v);
  for (std::size_t i = 0; i + 1 < cal.steps.size(); ++i) CHECK_FALSE(cal.steps[i].meets_target);

  const auto back = calibration_from_json(calibration_to_json(cal));
  CHECK(back.key_hash == cal.key_hash);
  CHECK(back.q_v == cal.q_v);
  CHECK(back.sigma_pcpp == doctest::Approx(cal.sigma_pcpp));
  CHECK(back.rho_prox == cal.rho_prox);
  REQUIRE(back.steps.size() == cal.steps.size());
  CHECK(back.steps.back().families.size() == cal.steps.back().families.size());

  const std::string path = "test_calibration_sidecar.json";
  save_calibration(path, cal);
  CHECK(load_calibration(path, cal.key_hash).has_value());
  CHECK_FALSE(load_calibration(path, cal.key_hash ^ 1).has_value());
  CHECK(cal.key_hash != calibration_key(f, 1, 9, Rational(1, 16), 400, 6));
  std::remove(path.c_str());
}

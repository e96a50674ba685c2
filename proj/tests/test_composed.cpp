#include "doctest.h"

#include "rlcc/composed.hpp"

using namespace rlcc;

namespace {

struct Fixture {
  RmParams rm;
  ComposedLayout layout;
  RmPoly poly;
  std::shared_ptr<const CanonicalComposed> word;
};

Fixture fixture(std::uint32_t p, unsigned m, unsigned d, unsigned q_v, std::uint64_t seed) {
  const auto ctx = FieldCtx::make(p, m);
  const auto rm = RmParams::make(ctx, m, d);
  const auto layout = ComposedLayout::build(rm, PcppParams::make(d, q_v, 9, rm.rho / 8));
  Rng rng(seed);
  auto poly = random_poly(rm, rng);
  auto word = std::make_shared<const CanonicalComposed>(layout, poly);
  return {rm, layout, poly, word};
}

Address random_address(const ComposedLayout& L, Rng& rng) {
  const Address hi = rng.next();
  const Address a = (hi << 64) | rng.next();
  return a % L.n_total();
}

bool same_plane(const PlaneRep& a, const PlaneRep& b) {
  return a.anchor == b.anchor && a.dir1 == b.dir1 && a.dir2 == b.dir2;
}

}  // namespace

TEST_CASE("layout sizes at the small presets") {
  const auto t1 = fixture(2, 2, 1, 3, 1).layout;
  CHECK(t1.point_keys() == 256);
  CHECK(t1.line_keys() == 320);
  CHECK(t1.b_actual() == 576);
  CHECK(t1.r() == 972);
  CHECK(t1.n_total() == 31104);
  CHECK(t1.b_count() == 2 * 16 * 16 * 16);

  const auto t2 = fixture(2, 3, 1, 3, 1).layout;
  CHECK(t2.projective() == 73);
  CHECK(t2.point_keys() == 32768);
  CHECK(t2.line_keys() == 299008);
  CHECK(t2.b_actual() == 331776);
  CHECK(t2.r() == 17496);
  CHECK(t2.n_total() == 17915904);
  CHECK(t2.rm_end() == Address{17496} * 512);
  CHECK(t2.point_end() == t2.rm_end() + Address{32768} * 27);
}

TEST_CASE("large layout needs 128-bit addresses") {
  const auto ctx = FieldCtx::make(17, 3);
  const auto rm = RmParams::make(ctx, 3, 32);
  const auto L = ComposedLayout::build(rm, PcppParams::make(32, 3, 9, rm.rho / 8));
  CHECK(L.line_keys() > Address{~std::uint64_t{0}});
  CHECK(parse_address(address_to_string(L.n_total() - 1)) == L.n_total() - 1);
  CHECK_THROWS(L.decode(L.n_total()));
  const auto big = FieldCtx::make(2, 8);
  CHECK_THROWS_AS(ComposedLayout::build(RmParams::make(big, 8, 1), PcppParams::make(1, 1, 9, Rational(1, 8))),
                  std::overflow_error);
}

TEST_CASE("address text round trip") {
  CHECK(address_to_string(0) == "0");
  CHECK(parse_address("340282366920938463463374607431768211455") == ~Address{0});
  CHECK_THROWS(parse_address("340282366920938463463374607431768211456"));
  CHECK_THROWS(parse_address("12a"));
  CHECK_THROWS(parse_address(""));
}

TEST_CASE("decode and encode are inverse") {
  const auto L = fixture(2, 3, 1, 3, 2).layout;
  Rng rng(4);
  std::vector<Address> addrs = {0, L.rm_end() - 1, L.rm_end(), L.point_end() - 1, L.point_end(), L.n_total() - 1};
  for (int i = 0; i < 20000; ++i) addrs.push_back(random_address(L, rng));
  for (const Address a : addrs) {
    const auto d = L.decode(a);
    const Address back = d.region == Region::rm ? L.rm_address(d.copy, d.point)
                                                : L.proof_address(d.region, d.key, d.offset);
    REQUIRE(back == a);
  }
  CHECK(L.decode(L.rm_end() - 1).region == Region::rm);
  CHECK(L.decode(L.rm_end()).region == Region::point_proof);
  CHECK(L.decode(L.point_end()).region == Region::line_proof);
  CHECK_THROWS(L.rm_address(L.r(), 0));
  CHECK_THROWS(L.proof_address(Region::line_proof, L.line_keys(), 0));
}

TEST_CASE("every key decodes to a plane that re-encodes to it") {
  for (auto [p, m] : {std::pair{2u, 2u}, {3u, 2u}}) {
    const auto L = fixture(p, m, 1, 1, 3).layout;
    const auto& ctx = L.rm().ctx;
    for (Region region : {Region::point_proof, Region::line_proof}) {
      const Address keys = region == Region::point_proof ? L.point_keys() : L.line_keys();
      for (Address key = 0; key < keys; ++key) {
        const PlaneRep pl = L.plane_of_key(region, key);
        KeyedPlane keyed;
        keyed.plane = pl;
        REQUIRE(is_h_vector(ctx, pl.dir2));
        if (region == Region::point_proof) {
          REQUIRE(is_h_vector(ctx, pl.dir1));
          REQUIRE(L.point_key(keyed) == key);
        } else {
          REQUIRE(L.line_key(keyed) == key);
        }
      }
    }
  }
}

TEST_CASE("walk planes map to keys of the same plane") {
  const auto L = fixture(2, 3, 1, 3, 5).layout;
  const auto& ctx = L.rm().ctx;
  Rng rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    const auto walk = walk_sample(ctx, 3, sample_point(ctx, 3, rng), 3, rng);
    for (unsigned j = 0; j <= 3; ++j) {
      const auto region = j == 0 ? ProofRegion::point : ProofRegion::line;
      const auto keyed = canonical_plane_key(ctx, walk.planes[j], region);
      const Address key = j == 0 ? L.point_key(keyed) : L.line_key(keyed);
      REQUIRE(same_plane(L.plane_of_key(j == 0 ? Region::point_proof : Region::line_proof, key), keyed.plane));
    }
  }
}

TEST_CASE("lazy and materialised words agree") {
  const auto fx = fixture(2, 2, 1, 3, 7);
  const auto table = TableComposed::materialize(*fx.word);
  for (std::uint64_t a = 0; a < fx.layout.n_total(); ++a) REQUIRE(table.read(a) == fx.word->read(a));

  const auto t2 = fixture(2, 3, 1, 3, 8);
  const auto big = TableComposed::materialize(*t2.word);
  Rng rng(9);
  for (int i = 0; i < 5000; ++i) {
    const Address a = random_address(t2.layout, rng);
    REQUIRE(big.read(a) == t2.word->read(a));
  }
}

TEST_CASE("honest words are corrected everywhere") {
  const auto fx = fixture(2, 2, 1, 3, 10);
  Rng rng(11);
  for (std::uint64_t a = 0; a < fx.layout.n_total(); ++a) {
    const auto trace = correct(*fx.word, a, rng);
    REQUIRE(trace.rejected_by == -1);
    REQUIRE(trace.output.has_value());
    REQUIRE(*trace.output == fx.word->read(a));
  }
  const auto t2 = fixture(2, 3, 1, 3, 12);
  for (int i = 0; i < 500; ++i) {
    const Address a = random_address(t2.layout, rng);
    const auto trace = correct(*t2.word, a, rng);
    REQUIRE(trace.output.has_value());
    REQUIRE(*trace.output == t2.word->read(a));
    REQUIRE(trace.walk.steps() == 3);
  }
}

TEST_CASE("overlay reads and exact accounting") {
  const auto fx = fixture(2, 2, 1, 3, 13);
  const auto& L = fx.layout;
  CorruptionOverlay ov;
  ov.targeted.push_back({5, std::nullopt});
  ov.targeted.push_back({L.rm_end() + 3, FieldElem{2}});
  ov.proof_blots.push_back({Region::line_proof, 17, 99});
  ov.add_region_noise(Region::point_proof, Rational(1, 10), 7);
  PointCorruption pc(L.rm().ctx, 2);
  pc.set_noise(Rational(1, 20), 3);
  ov.rm = pc;
  CHECK_FALSE(ov.empty());
  const CorruptedComposed w(fx.word, ov);
  std::uint64_t rm = 0, pp = 0, lp = 0;
  for (std::uint64_t a = 0; a < L.n_total(); ++a) {
    const bool c = w.corrupted(a);
    REQUIRE((w.read(a) != fx.word->read(a)) == c);
    if (!c) continue;
    const auto region = L.decode(a).region;
    (region == Region::rm ? rm : region == Region::point_proof ? pp : lp) += 1;
  }
  for (std::uint64_t o = 0; o < L.pcpp().L(); ++o) CHECK(w.corrupted(L.proof_address(Region::line_proof, 17, o)));
  CHECK(lp == L.pcpp().L());
  CHECK(w.corrupted(5));
  const auto acc = w.accounting();
  CHECK(acc.exact);
  CHECK(acc.rm == rm);
  CHECK(acc.point_proof == pp);
  CHECK(acc.line_proof == lp);
  CHECK(acc.fraction == doctest::Approx(double(rm + pp + lp) / 31104));
  const double pp_len = 256.0 * 27;
  CHECK(std::abs(pp / pp_len - 0.1) < 4 * std::sqrt(0.09 / pp_len));
}

TEST_CASE("a point flipped in every copy is never returned") {
  const auto fx = fixture(2, 2, 1, 3, 14);
  const auto& L = fx.layout;
  const auto& ctx = L.rm().ctx;
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Point x = sample_point(ctx, 2, rng);
    PointCorruption pc(ctx, 2);
    pc.add_targeted(x);
    CorruptionOverlay ov;
    ov.rm = pc;
    const CorruptedComposed w(fx.word, ov);
    const Address a = L.rm_address(rng.below(L.r()), point_code(ctx, x));
    for (int t = 0; t < 20; ++t) {
      const auto trace = correct_rm(w, a, rng);
      REQUIRE_FALSE(trace.output.has_value());
      REQUIRE(trace.rejected_by == 0);
    }
  }
}

TEST_CASE("a blotted proof is mostly rejected") {
  const auto fx = fixture(2, 2, 1, 3, 16);
  const auto& L = fx.layout;
  Rng rng(17);
  std::uint64_t aborts = 0, trials = 0;
  for (Address key = 0; key < L.point_keys(); key += 7) {
    CorruptionOverlay ov;
    ov.proof_blots.push_back({Region::point_proof, key, splitmix64(key)});
    const CorruptedComposed w(fx.word, ov);
    const auto trace = correct_proof(w, L.proof_address(Region::point_proof, key, 1), rng);
    ++trials;
    aborts += !trace.output.has_value();
    if (trace.output) CHECK(trace.rejected_by == -1);
  }
  CHECK(aborts >= 0.9 * trials);
}

TEST_CASE("block-length sweep") {
  const auto rows = block_length_sweep({{17, 2, 0}, {17, 3, 0}});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.d == r.n / 4);
    CHECK(r.b_actual <= r.b_count);
    CHECK(r.n_actual <= r.n_count);
    CHECK(r.n_count <= r.n_count_bound + r.nm);
    CHECK(r.queries_composed == (r.m + 3) * r.q_pcpp);
  }
  CHECK(rows[1].exponent_count < rows[0].exponent_count);
  CHECK(rows[1].exponent_actual < rows[0].exponent_actual);
  const auto t1 = block_length_report(RmParams::make(FieldCtx::make(2, 2), 2, 1),
                                      PcppParams::make(1, 3, 9, Rational(1, 8)));
  CHECK(t1.n_actual == 31104);
}

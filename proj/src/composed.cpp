#include "rlcc/composed.hpp"

#include <cmath>
#include <stdexcept>

namespace rlcc {

std::string address_to_string(Address a) {
  if (a == 0) return "0";
  std::string out;
  while (a > 0) {
    out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(a % 10)));
    a /= 10;
  }
  return out;
}

Address parse_address(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty address");
  Address out = 0;
  const Address limit = ~Address{0};
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("address must be a decimal integer: " + text);
    const unsigned digit = static_cast<unsigned>(c - '0');
    if (out > (limit - digit) / 10) throw std::out_of_range("address overflows 128 bits");
    out = out * 10 + digit;
  }
  return out;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::rm: return "rm";
    case Region::point_proof: return "point_proof";
    case Region::line_proof: return "line_proof";
  }
  return "?";
}

namespace {

Address narrow(const BigInt& v) {
  static const BigInt limit = BigInt(1) << 128;
  if (v < 0 || v >= limit) throw std::overflow_error("composed length does not fit in 128 bits");
  const BigInt mask = (BigInt(1) << 64) - 1;
  const auto lo = static_cast<std::uint64_t>(v & mask);
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  return (Address{hi} << 64) | lo;
}

BigInt big_pow(std::uint64_t b, unsigned e) {
  BigInt out = 1;
  for (unsigned i = 0; i < e; ++i) out *= b;
  return out;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) { return (a + b - 1) / b; }

// Normalised directions (first nonzero coordinate 1) grouped by the lead
// position; within a group the trailing coordinates are in lexicographic order.
Address projective_index(const FieldCtx& ctx, const Point& v) {
  const std::uint64_t n = ctx.n();
  Address offset = 0;
  unsigned lead = 0;
  while (lead < v.dim && v[lead].is_zero()) {
    Address block = 1;
    for (unsigned j = lead + 1; j < v.dim; ++j) block *= n;
    offset += block;
    ++lead;
  }
  if (lead == v.dim || v[lead] != FieldCtx::one()) throw GeometryError("direction is not normalised");
  Address tail = 0;
  for (unsigned j = lead + 1; j < v.dim; ++j) tail = tail * n + v[j].code;
  return offset + tail;
}

Point projective_from_index(const FieldCtx& ctx, unsigned m, Address idx) {
  const std::uint64_t n = ctx.n();
  Point out = Point::zero(m);
  for (unsigned lead = 0; lead < m; ++lead) {
    Address block = 1;
    for (unsigned j = lead + 1; j < m; ++j) block *= n;
    if (idx >= block) {
      idx -= block;
      continue;
    }
    out[lead] = FieldCtx::one();
    for (unsigned j = m; j-- > lead + 1;) {
      out[j] = ctx.elem(static_cast<std::uint64_t>(idx % n));
      idx /= n;
    }
    return out;
  }
  throw std::out_of_range("projective index out of range");
}

}  // namespace

ComposedLayout ComposedLayout::build(const RmParams& rm, const PcppParams& pcpp) {
  if (pcpp.d != rm.d) throw std::invalid_argument("proof system degree differs from the code degree");
  const std::uint64_t n = rm.n();
  ComposedLayout L;
  L.rm_ = rm;
  L.pcpp_ = pcpp;
  const BigInt nm = big_pow(n, rm.m);
  const BigInt hm = big_pow(rm.ctx.p(), rm.m);
  if (nm >= BigInt(1) << 63) throw std::overflow_error("n^m does not fit in 64 bits");
  L.nm_ = nm.convert_to<std::uint64_t>();
  L.hm_ = hm.convert_to<std::uint64_t>();
  const BigInt proj = (nm - 1) / (n - 1);
  const BigInt point_keys = nm * hm * hm;
  const BigInt line_keys = nm * proj * hm;
  const BigInt b = point_keys + line_keys;
  BigInt r = ceil_div(b * pcpp.L(), nm);
  if (r < 1) r = 1;
  if (r >= BigInt(1) << 64) throw std::overflow_error("repetition count does not fit in 64 bits");
  const BigInt total = r * nm + b * pcpp.L();
  L.proj_ = narrow(proj);
  L.point_keys_ = narrow(point_keys);
  L.line_keys_ = narrow(line_keys);
  L.r_ = r.convert_to<std::uint64_t>();
  L.n_ = narrow(total);
  L.rm_end_ = narrow(r * nm);
  L.point_end_ = narrow(r * nm + point_keys * pcpp.L());
  return L;
}

BigInt ComposedLayout::b_count() const {
  const std::uint64_t n = rm_.n();
  return BigInt(2) * BigInt(nm_) * BigInt(hm_) * BigInt(hm_) * BigInt(n) * BigInt(n);
}

DecodedAddress ComposedLayout::decode(Address a) const {
  if (a >= n_) throw std::out_of_range("address beyond the block length");
  DecodedAddress out;
  if (a < rm_end_) {
    out.region = Region::rm;
    out.copy = static_cast<std::uint64_t>(a / nm_);
    out.point = static_cast<std::uint64_t>(a % nm_);
    return out;
  }
  const Address L = pcpp_.L();
  const Address rel = a < point_end_ ? a - rm_end_ : a - point_end_;
  out.region = a < point_end_ ? Region::point_proof : Region::line_proof;
  out.key = rel / L;
  out.offset = static_cast<std::uint64_t>(rel % L);
  return out;
}

Address ComposedLayout::rm_address(std::uint64_t copy, std::uint64_t point) const {
  if (copy >= r_ || point >= nm_) throw std::out_of_range("RM copy or point out of range");
  return Address{copy} * nm_ + point;
}

Address ComposedLayout::proof_address(Region region, Address key, std::uint64_t offset) const {
  if (offset >= pcpp_.L()) throw std::out_of_range("proof offset out of range");
  if (region == Region::point_proof) {
    if (key >= point_keys_) throw std::out_of_range("point key out of range");
    return rm_end_ + key * pcpp_.L() + offset;
  }
  if (region == Region::line_proof) {
    if (key >= line_keys_) throw std::out_of_range("line key out of range");
    return point_end_ + key * pcpp_.L() + offset;
  }
  throw std::invalid_argument("not a proof region");
}

Address ComposedLayout::point_key(const KeyedPlane& keyed) const {
  const auto& ctx = rm_.ctx;
  const Address anchor = point_code(ctx, keyed.plane.anchor);
  return (anchor * hm_ + h_vector_code(ctx, keyed.plane.dir1)) * hm_ + h_vector_code(ctx, keyed.plane.dir2);
}

Address ComposedLayout::line_key(const KeyedPlane& keyed) const {
  const auto& ctx = rm_.ctx;
  const Address anchor = point_code(ctx, keyed.plane.anchor);
  return (anchor * proj_ + projective_index(ctx, keyed.plane.dir1)) * hm_ + h_vector_code(ctx, keyed.plane.dir2);
}

PlaneRep ComposedLayout::plane_of_key(Region region, Address key) const {
  const auto& ctx = rm_.ctx;
  const unsigned m = rm_.m;
  const Point dir2 = h_vector_from_code(ctx, m, static_cast<std::uint64_t>(key % hm_));
  key /= hm_;
  if (region == Region::point_proof) {
    if (key >= Address{nm_} * hm_) throw std::out_of_range("point key out of range");
    const Point dir1 = h_vector_from_code(ctx, m, static_cast<std::uint64_t>(key % hm_));
    const Point anchor = point_from_code(ctx, m, static_cast<std::uint64_t>(key / hm_));
    return make_plane(ctx, anchor, dir1, dir2);
  }
  if (region != Region::line_proof) throw std::invalid_argument("not a proof region");
  if (key >= Address{nm_} * proj_) throw std::out_of_range("line key out of range");
  const Point dir1 = projective_from_index(ctx, m, key % proj_);
  const Point anchor = point_from_code(ctx, m, static_cast<std::uint64_t>(key / proj_));
  return make_plane(ctx, anchor, dir1, dir2);
}

CanonicalComposed::CanonicalComposed(ComposedLayout layout, const RmPoly& poly, std::size_t cache_limit)
    : layout_(std::move(layout)), eval_(layout_.rm(), poly), cache_limit_(cache_limit) {}

std::shared_ptr<const std::vector<FieldElem>> CanonicalComposed::proof_coeffs(Region region, Address key) const {
  const auto id = std::make_pair(static_cast<std::uint8_t>(region), key);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  }
  const PlaneRep plane = layout_.plane_of_key(region, key);
  auto coeffs = std::make_shared<const std::vector<FieldElem>>(
      restrict_parameterized(eval_, plane.anchor, plane.dir1, plane.dir2));
  std::lock_guard lock(mutex_);
  if (cache_.size() >= cache_limit_) cache_.clear();
  return cache_.emplace(id, std::move(coeffs)).first->second;
}

FieldElem CanonicalComposed::read(Address a) const {
  const auto d = layout_.decode(a);
  if (d.region == Region::rm) return eval_(point_from_code(layout_.rm().ctx, layout_.rm().m, d.point));
  return (*proof_coeffs(d.region, d.key))[d.offset % layout_.pcpp().k2];
}

TableComposed TableComposed::materialize(const ComposedWord& word) {
  const auto& L = word.layout();
  if (L.n_total() > kMaxSymbols) throw std::invalid_argument("composed word too long to materialise");
  const auto total = static_cast<std::uint64_t>(L.n_total());
  std::vector<FieldElem> table(total);
  const auto* canonical = dynamic_cast<const CanonicalComposed*>(&word);
  if (canonical == nullptr) {
    for (std::uint64_t a = 0; a < total; ++a) table[a] = word.read(a);
    return TableComposed(L, std::move(table));
  }
  const auto values = evaluation_table(L.rm(), canonical->evaluator().poly());
  const std::uint64_t nm = L.points();
  for (std::uint64_t c = 0; c < L.r(); ++c) std::copy(values.begin(), values.end(), table.begin() + c * nm);
  const std::uint64_t len = L.pcpp().L();
  const std::uint64_t k2 = L.pcpp().k2;
  for (Region region : {Region::point_proof, Region::line_proof}) {
    const Address keys = region == Region::point_proof ? L.point_keys() : L.line_keys();
    for (Address key = 0; key < keys; ++key) {
      const PlaneRep plane = L.plane_of_key(region, key);
      const auto coeffs = restrict_parameterized(canonical->evaluator(), plane.anchor, plane.dir1, plane.dir2);
      const auto start = static_cast<std::uint64_t>(L.proof_address(region, key, 0));
      for (std::uint64_t o = 0; o < len; ++o) table[start + o] = coeffs[o % k2];
    }
  }
  return TableComposed(L, std::move(table));
}

namespace {

std::uint64_t rate_threshold(const Rational& rate) {
  if (rate < 0 || rate > 1) throw std::invalid_argument("noise rate must lie in [0, 1]");
  const BigInt scaled =
      boost::multiprecision::numerator(rate) * (BigInt(1) << 64) / boost::multiprecision::denominator(rate);
  return scaled >= (BigInt(1) << 64) ? ~std::uint64_t{0} : scaled.convert_to<std::uint64_t>();
}

}  // namespace

void CorruptionOverlay::add_region_noise(Region region, const Rational& delta, std::uint64_t seed) {
  RegionNoise rn;
  rn.region = region;
  rn.delta = delta;
  rn.seed = seed;
  rn.threshold = rate_threshold(delta);
  region_noise.push_back(rn);
}

void CorruptionOverlay::set_bad_copies(const Rational& rate, std::uint64_t seed) {
  bad_copy_threshold = rate_threshold(rate);
  bad_copy_seed = seed;
  bad_copy_rate = rate;
}

bool CorruptionOverlay::bad_copy(std::uint64_t copy) const {
  if (bad_copy_threshold == 0) return false;
  return bad_copy_threshold == ~std::uint64_t{0} || splitmix64(bad_copy_seed ^ splitmix64(copy)) < bad_copy_threshold;
}

bool CorruptionOverlay::empty() const {
  return (!rm || rm->empty()) && targeted.empty() && region_noise.empty() && proof_blots.empty() &&
         bad_copy_threshold == 0;
}

CorruptedComposed::CorruptedComposed(std::shared_ptr<const ComposedWord> base, CorruptionOverlay overlay)
    : base_(std::move(base)), overlay_(std::move(overlay)) {}

namespace {

std::uint64_t address_hash(std::uint64_t seed, Address a) {
  return splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(a)) ^ static_cast<std::uint64_t>(a >> 64));
}

FieldElem replace(const FieldCtx& ctx, std::uint64_t h, FieldElem original) {
  const std::uint64_t n = ctx.n();
  const std::uint64_t shift = 1 + splitmix64(h ^ 0xa5a5a5a5a5a5a5a5ull) % (n - 1);
  return ctx.elem((original.code + shift) % n);
}

}  // namespace

std::optional<FieldElem> CorruptedComposed::overlay_value(Address a, FieldElem original) const {
  const auto& L = layout();
  const auto& ctx = L.rm().ctx;
  for (const auto& [addr, value] : overlay_.targeted) {
    if (addr != a) continue;
    if (value && *value != original) return *value;
    return ctx.add(original, FieldCtx::one());
  }
  const auto d = L.decode(a);
  if (d.region == Region::rm && overlay_.bad_copy(d.copy)) {
    return replace(ctx, address_hash(overlay_.bad_copy_seed, a), original);
  }
  if (d.region == Region::rm && overlay_.rm) {
    const Point x = point_from_code(ctx, L.rm().m, d.point);
    if (overlay_.rm->corrupted(x, d.copy)) return overlay_.rm->apply(x, original, d.copy);
  }
  if (d.region != Region::rm) {
    for (const auto& b : overlay_.proof_blots) {
      if (b.region == d.region && b.key == d.key) return replace(ctx, splitmix64(b.seed ^ d.offset), original);
    }
  }
  for (const auto& rn : overlay_.region_noise) {
    if (rn.region != d.region) continue;
    const std::uint64_t h = address_hash(rn.seed, a);
    if (rn.threshold == ~std::uint64_t{0} || h < rn.threshold) return replace(ctx, h, original);
  }
  return std::nullopt;
}

FieldElem CorruptedComposed::read(Address a) const {
  const FieldElem orig = base_->read(a);
  return overlay_value(a, orig).value_or(orig);
}

bool CorruptedComposed::corrupted(Address a) const {
  // Every overlay replacement differs from the original, so any base symbol
  // decides membership; the zero symbol avoids a base read.
  return overlay_value(a, FieldCtx::zero()).has_value();
}

CorruptionAccounting CorruptedComposed::accounting() const {
  const auto& L = layout();
  CorruptionAccounting out;
  const double total = static_cast<double>(L.n_total());
  const double rm_len = static_cast<double>(L.rm_end());
  if (L.n_total() <= TableComposed::kMaxSymbols) {
    out.exact = true;
    const auto n = static_cast<std::uint64_t>(L.n_total());
    for (std::uint64_t a = 0; a < n; ++a) {
      if (!corrupted(a)) continue;
      if (a < L.rm_end()) {
        out.rm += 1;
      } else if (a < L.point_end()) {
        out.point_proof += 1;
      } else {
        out.line_proof += 1;
      }
    }
  } else {
    const double len = static_cast<double>(L.pcpp().L());
    if (overlay_.rm) {
      out.rm += to_double(overlay_.rm->noise_rate()) * rm_len +
                static_cast<double>(overlay_.rm->targeted_count()) * static_cast<double>(L.r());
    }
    out.rm += to_double(overlay_.bad_copy_rate) * rm_len;
    for (const auto& rn : overlay_.region_noise) {
      const double size = rn.region == Region::rm            ? rm_len
                          : rn.region == Region::point_proof ? static_cast<double>(L.point_keys()) * len
                                                             : static_cast<double>(L.line_keys()) * len;
      (rn.region == Region::rm ? out.rm : rn.region == Region::point_proof ? out.point_proof : out.line_proof) +=
          to_double(rn.delta) * size;
    }
    for (const auto& b : overlay_.proof_blots) (b.region == Region::point_proof ? out.point_proof : out.line_proof) += len;
    for (const auto& t : overlay_.targeted) {
      const auto d = L.decode(t.first);
      (d.region == Region::rm ? out.rm : d.region == Region::point_proof ? out.point_proof : out.line_proof) += 1;
    }
  }
  out.fraction = (out.rm + out.point_proof + out.line_proof) / total;
  out.rm_fraction = out.rm / rm_len;
  return out;
}

namespace {

struct KeyCheck {
  bool accept = true;
  std::uint64_t queries = 0;
};

AugmentedView key_view(const ComposedWord& word, std::uint64_t copy, AugmentKind kind, const PlaneRep& plane) {
  const auto& L = word.layout();
  const auto& ctx = L.rm().ctx;
  const std::uint64_t n = ctx.n();
  return AugmentedView::anchored(kind, n, [&word, &L, &ctx, copy, plane, n](std::uint64_t g) {
    const Point y = plane_point(ctx, plane, ctx.elem(g / n), ctx.elem(g % n));
    return word.read(L.rm_address(copy, point_code(ctx, y)));
  });
}

SymbolReader key_proof(const ComposedWord& word, Region region, Address key) {
  const auto& L = word.layout();
  return [&word, &L, region, key](std::uint64_t off) { return word.read(L.proof_address(region, key, off)); };
}

KeyCheck verify_key(const ComposedWord& word, std::uint64_t copy, Region region, Address key, const PlaneRep& plane,
                    Rng& rng) {
  const auto& L = word.layout();
  const auto kind = region == Region::point_proof ? AugmentKind::point : AugmentKind::line;
  const auto res = verify_proximity(L.rm().ctx, L.pcpp(), key_view(word, copy, kind, plane),
                                    key_proof(word, region, key), rng);
  return {res.accept, res.word_queries + res.proof_queries};
}

// Runs the predicates of a fresh walk from x; returns the rejecting index.
std::optional<int> verify_walk(const ComposedWord& word, std::uint64_t copy, const Point& x, Rng& rng,
                               CorrectionTrace& trace) {
  const auto& L = word.layout();
  const auto& ctx = L.rm().ctx;
  const unsigned m = L.rm().m;
  trace.walk = walk_sample(ctx, m, x, m, rng);
  for (unsigned j = 0; j <= m; ++j) {
    const bool point = j == 0;
    const auto keyed = canonical_plane_key(ctx, trace.walk.planes[j], point ? ProofRegion::point : ProofRegion::line);
    const Region region = point ? Region::point_proof : Region::line_proof;
    const Address key = point ? L.point_key(keyed) : L.line_key(keyed);
    const auto check = verify_key(word, copy, region, key, keyed.plane, rng);
    trace.queries += check.queries;
    if (!check.accept) return static_cast<int>(j);
  }
  return std::nullopt;
}

}  // namespace

CorrectionTrace correct_rm(const ComposedWord& word, Address i, Rng& rng) {
  const auto& L = word.layout();
  const auto d = L.decode(i);
  if (d.region != Region::rm) throw std::out_of_range("address is not in the RM region");
  const auto& ctx = L.rm().ctx;
  CorrectionTrace trace;
  trace.x = point_from_code(ctx, L.rm().m, d.point);
  trace.copy = rng.below(L.r());
  if (const auto rejected = verify_walk(word, trace.copy, trace.x, rng, trace)) {
    trace.rejected_by = *rejected;
    return trace;
  }
  trace.output = word.read(L.rm_address(trace.copy, d.point));
  ++trace.queries;
  return trace;
}

CorrectionTrace correct_proof(const ComposedWord& word, Address i, Rng& rng) {
  const auto& L = word.layout();
  const auto d = L.decode(i);
  if (d.region == Region::rm) throw std::out_of_range("address is not in a proof region");
  const auto& ctx = L.rm().ctx;
  CorrectionTrace trace;
  trace.copy = rng.below(L.r());
  const PlaneRep plane = L.plane_of_key(d.region, d.key);
  const auto own = verify_key(word, trace.copy, d.region, d.key, plane, rng);
  trace.queries += own.queries;
  if (!own.accept) {
    trace.rejected_by = -2;
    return trace;
  }
  trace.x = plane_point(ctx, plane, sample_elem(ctx, rng), sample_elem(ctx, rng));
  if (const auto rejected = verify_walk(word, trace.copy, trace.x, rng, trace)) {
    trace.rejected_by = *rejected;
    return trace;
  }
  const auto kind = d.region == Region::point_proof ? AugmentKind::point : AugmentKind::line;
  const auto sc = correct_proof_symbol(ctx, L.pcpp(), key_view(word, trace.copy, kind, plane),
                                       key_proof(word, d.region, d.key), d.offset, rng);
  trace.queries += sc.queries;
  trace.output = sc.symbol;
  if (!sc.symbol) trace.rejected_by = -3;
  return trace;
}

CorrectionTrace correct(const ComposedWord& word, Address i, Rng& rng) {
  return word.layout().decode(i).region == Region::rm ? correct_rm(word, i, rng) : correct_proof(word, i, rng);
}

BlockLengthReport block_length_report(const RmParams& rm, const PcppParams& pcpp) {
  BlockLengthReport r;
  r.p = rm.ctx.p();
  r.m = rm.m;
  r.d = rm.d;
  r.n = rm.n();
  r.k = rm.k;
  r.k2 = pcpp.k2;
  r.L = pcpp.L();
  r.nm = big_pow(r.n, rm.m);
  const BigInt hm = big_pow(r.p, rm.m);
  const BigInt proj = (r.nm - 1) / (r.n - 1);
  r.point_keys = r.nm * hm * hm;
  r.line_keys = r.nm * proj * hm;
  r.b_actual = r.point_keys + r.line_keys;
  r.b_count = BigInt(2) * r.nm * hm * hm * BigInt(r.n) * BigInt(r.n);
  r.r_actual = std::max(BigInt(1), ceil_div(r.b_actual * r.L, r.nm));
  r.n_actual = r.r_actual * r.nm + r.b_actual * r.L;
  r.r_count = std::max(BigInt(1), ceil_div(r.b_count * r.L, r.nm));
  r.n_count = r.r_count * r.nm + r.b_count * r.L;
  r.n_count_bound = r.nm + 2 * r.b_count * r.L;
  r.rho = rm.rho;
  r.distance_bound = rm.rho / 2;
  const double logk = std::log(static_cast<double>(r.k));
  r.rate = static_cast<double>(r.k) / r.n_actual.convert_to<double>();
  r.exponent_actual = std::log(r.n_actual.convert_to<double>()) / logk;
  r.exponent_count = std::log(r.n_count.convert_to<double>()) / logk;
  r.q_pcpp = pcpp.verifier_queries();
  r.queries_composed = (rm.m + 3) * r.q_pcpp;
  return r;
}

std::vector<BlockLengthReport> block_length_sweep(
    const std::vector<std::tuple<std::uint32_t, unsigned, unsigned>>& grid, unsigned R, unsigned q_v) {
  std::vector<BlockLengthReport> out;
  for (const auto& [p, m, d_in] : grid) {
    const auto ctx = FieldCtx::make(p, m);
    const unsigned d = d_in ? d_in : static_cast<unsigned>(ctx.n() / 4);
    const auto rm = RmParams::make(ctx, m, d);
    out.push_back(block_length_report(rm, PcppParams::make(d, q_v, R, rm.rho / 8)));
  }
  return out;
}

}  // namespace rlcc

#include "rlcc/word.hpp"

#include <cmath>

namespace rlcc {

PointPacker::PointPacker(const FieldCtx& ctx, unsigned m) : ctx_(ctx), m_(m), p_(ctx.p()) {
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < p_) ++bits;
  lane_bits_ = bits + 2;
  lanes_per_word_ = 64 / lane_bits_;
  const unsigned lanes = m * ctx.m();
  words_ = (lanes + lanes_per_word_ - 1) / lanes_per_word_;
  for (unsigned l = 0; l < lanes_per_word_; ++l) {
    add_const_ |= ((std::uint64_t{1} << (lane_bits_ - 1)) - p_) << (l * lane_bits_);
    high_mask_ |= std::uint64_t{1} << (l * lane_bits_ + lane_bits_ - 1);
  }
}

PointPacker::Packed PointPacker::pack(const Point& x) const {
  if (!supported()) throw std::logic_error("point packing needs more than 8 words");
  Packed out{};
  const unsigned fm = ctx_.m();
  for (unsigned i = 0; i < m_; ++i) {
    std::uint64_t code = x[i].code;
    for (unsigned j = 0; j < fm; ++j) {
      const unsigned lane = i * fm + j;
      out[lane / lanes_per_word_] |= (code % p_) << ((lane % lanes_per_word_) * lane_bits_);
      code /= p_;
    }
  }
  return out;
}

PointCorruption::PointCorruption(const FieldCtx& ctx, unsigned m) : ctx_(ctx), m_(m), packer_(ctx, m) {}

void PointCorruption::add_targeted(const Point& x, std::optional<FieldElem> value) {
  if (value) ctx_.elem(value->code);
  targeted_.emplace_back(x, value);
}

void PointCorruption::set_noise(const Rational& delta, std::uint64_t seed, std::uint64_t copy) {
  if (delta < 0 || delta > 1) throw std::invalid_argument("noise rate must lie in [0, 1]");
  if (!packer_.supported()) throw std::invalid_argument("noise needs packable points (m^2 digits too wide)");
  noise_ = delta > 0;
  noise_seed_ = seed;
  noise_key_ = copy_key(copy);
  // threshold = floor(delta * 2^64), saturated.
  const BigInt scaled = boost::multiprecision::numerator(delta) * (BigInt(1) << 64) /
                        boost::multiprecision::denominator(delta);
  threshold_ = scaled >= (BigInt(1) << 64) ? ~std::uint64_t{0} : scaled.convert_to<std::uint64_t>();
}

void PointCorruption::set_coordinate_blot(std::vector<bool> first_coord, std::uint64_t seed) {
  if (first_coord.size() != ctx_.n()) throw std::invalid_argument("blot set must have one flag per element");
  blot_coords_ = std::move(first_coord);
  blot_seed_ = seed;
}

void PointCorruption::add_plane_blot(const PlaneRep& plane, std::uint64_t seed) {
  if (!is_rank2(ctx_, plane.dir1, plane.dir2)) throw GeometryError("plane has rank < 2");
  plane_blots_.emplace_back(plane, seed);
}

bool PointCorruption::empty() const {
  return targeted_.empty() && !noise_ && blot_coords_.empty() && plane_blots_.empty();
}

std::uint64_t PointCorruption::copy_key(std::uint64_t copy) const { return derive_seed(noise_seed_, copy, 0x6e6f697365ull); }

std::uint64_t PointCorruption::noise_hash(const Point& x, std::uint64_t key) const {
  return PointPacker::fingerprint(packer_.pack(x), packer_.words(), key);
}

bool PointCorruption::noise_hit(const Point& x, std::uint64_t key) const {
  if (!noise_) return false;
  if (threshold_ == ~std::uint64_t{0}) return true;
  return noise_hash(x, key) < threshold_;
}

FieldElem PointCorruption::replacement(std::uint64_t h, FieldElem original) const {
  const std::uint64_t n = ctx_.n();
  const std::uint64_t shift = 1 + splitmix64(h ^ 0xa5a5a5a5a5a5a5a5ull) % (n - 1);
  return FieldElem{static_cast<std::uint32_t>((original.code + shift) % n)};
}

bool PointCorruption::corrupted_keyed(const Point& x, std::uint64_t key) const {
  for (const auto& t : targeted_) {
    if (t.first == x) return true;
  }
  for (const auto& b : plane_blots_) {
    if (plane_coordinates(ctx_, b.first, x)) return true;
  }
  if (!blot_coords_.empty() && blot_coords_[x[0].code]) return true;
  return noise_hit(x, key);
}

FieldElem PointCorruption::apply_keyed(const Point& x, FieldElem original, std::uint64_t key) const {
  for (const auto& t : targeted_) {
    if (t.first != x) continue;
    if (t.second && *t.second != original) return *t.second;
    return ctx_.add(original, FieldCtx::one());
  }
  for (const auto& b : plane_blots_) {
    if (plane_coordinates(ctx_, b.first, x)) {
      return replacement(splitmix64(b.second ^ point_code(ctx_, x)), original);
    }
  }
  if (!blot_coords_.empty() && blot_coords_[x[0].code]) {
    return replacement(splitmix64(blot_seed_ ^ point_code(ctx_, x)), original);
  }
  if (noise_) {
    const std::uint64_t h = noise_hash(x, key);
    if (threshold_ == ~std::uint64_t{0} || h < threshold_) return replacement(h, original);
  }
  return original;
}

Rational PointCorruption::noise_rate() const {
  if (!noise_) return Rational(0);
  if (threshold_ == ~std::uint64_t{0}) return Rational(1);
  return Rational(BigInt(threshold_), BigInt(1) << 64);
}

PlaneCount PointCorruption::count_on_plane_slow(const PlaneRep& plane) const {
  const auto pts = plane_points(ctx_, plane);
  const std::uint64_t n = ctx_.n();
  PlaneCount out;
  for (std::uint64_t i = 0; i < pts.size(); ++i) {
    if (!corrupted(pts[i])) continue;
    ++out.plane;
    if (i % n == 0) ++out.line;
  }
  return out;
}

PlaneCount PointCorruption::count_on_plane(const PlaneRep& plane) const {
  if (!is_rank2(ctx_, plane.dir1, plane.dir2)) throw GeometryError("plane has rank < 2");
  if (!plane_blots_.empty() || !blot_coords_.empty()) return count_on_plane_slow(plane);
  PlaneCount out;
  if (noise_) {
    const std::uint64_t n = ctx_.n();
    const std::uint64_t p = ctx_.p();
    std::vector<std::uint8_t> carry(n, 0);
    for (std::uint64_t k = 1; k < n; ++k) {
      std::uint64_t v = k;
      std::uint8_t c = 0;
      while (v % p == 0) {
        v /= p;
        ++c;
      }
      carry[k] = c;
    }
    // Step vectors: moving from code k-1 to k adds sum_{i <= carry[k]} p^i * dir.
    std::vector<PointPacker::Packed> U, V;
    Point su = Point::zero(m_), sv = Point::zero(m_);
    std::uint64_t beta = 1;
    for (unsigned i = 0; i < ctx_.m(); ++i, beta *= p) {
      const FieldElem b{static_cast<std::uint32_t>(beta)};
      su = axpy(ctx_, su, b, plane.dir1);
      sv = axpy(ctx_, sv, b, plane.dir2);
      U.push_back(packer_.pack(su));
      V.push_back(packer_.pack(sv));
    }
    const auto A = packer_.pack(plane.anchor);
    const std::uint64_t key = noise_key_;
    const std::uint64_t thr = threshold_;
    const bool all = thr == ~std::uint64_t{0};
    if (packer_.words() == 1) {
      std::uint64_t row = A[0];
      for (std::uint64_t j = 0; j < n; ++j) {
        if (j > 0) row = packer_.add_word(row, U[carry[j]][0]);
        std::uint64_t x = row;
        if (all || splitmix64(key ^ x) < thr) {
          ++out.line;
          ++out.plane;
        }
        std::uint64_t hits = 0;
        for (std::uint64_t k = 1; k < n; ++k) {
          x = packer_.add_word(x, V[carry[k]][0]);
          hits += splitmix64(key ^ x) < thr;
        }
        out.plane += all ? n - 1 : hits;
      }
    } else {
      const unsigned words = packer_.words();
      auto row = A;
      for (std::uint64_t j = 0; j < n; ++j) {
        if (j > 0) row = packer_.add(row, U[carry[j]]);
        auto x = row;
        if (all || PointPacker::fingerprint(x, words, key) < thr) {
          ++out.line;
          ++out.plane;
        }
        for (std::uint64_t k = 1; k < n; ++k) {
          x = packer_.add(x, V[carry[k]]);
          out.plane += all || PointPacker::fingerprint(x, words, key) < thr;
        }
      }
    }
  }
  // Targeted points not already counted by the noise.
  for (std::size_t i = 0; i < targeted_.size(); ++i) {
    const Point& x = targeted_[i].first;
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) dup = dup || targeted_[j].first == x;
    if (dup || noise_hit(x, noise_key_)) continue;
    const auto ts = plane_coordinates(ctx_, plane, x);
    if (!ts) continue;
    ++out.plane;
    if (ts->second.is_zero()) ++out.line;
  }
  return out;
}

TableWord::TableWord(const RmParams& params, std::vector<FieldElem> table) : params_(params), table_(std::move(table)) {
  if (table_.size() != point_space_size(params_.ctx, params_.m)) throw std::invalid_argument("table must have n^m entries");
}

std::vector<FieldElem> materialize(const RmWord& word) {
  const auto& params = word.params();
  const std::uint64_t total = point_space_size(params.ctx, params.m);
  std::vector<FieldElem> out(total);
  for (std::uint64_t c = 0; c < total; ++c) out[c] = word.at(point_from_code(params.ctx, params.m, c));
  return out;
}

std::vector<FieldElem> restrict_word(const RmWord& word, const PlaneRep& plane) {
  std::vector<FieldElem> out;
  const auto pts = plane_points(word.params().ctx, plane);
  out.reserve(pts.size());
  for (const auto& x : pts) out.push_back(word.at(x));
  return out;
}

}  // namespace rlcc

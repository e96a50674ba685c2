#pragma once

// Words over F^m: lazy codewords, tables, and planted corruptions.
//
// A corruption always replaces a symbol by a different one, so "corrupted"
// and "differs from the base codeword" coincide. Pseudorandom noise is a
// keyed hash of the point's packed digit representation, which lets a plane
// be scanned by SWAR additions instead of field arithmetic.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rlcc/geometry.hpp"
#include "rlcc/rational.hpp"
#include "rlcc/reed_muller.hpp"

namespace rlcc {

// The m^2 GF(p)-digits of a point, one lane per digit (lane i*m' + j holds
// digit j of coordinate i, m' = [F:H]), lanes of ceil(log2 p) + 2 bits.
class PointPacker {
 public:
  static constexpr unsigned kMaxWords = 8;
  using Packed = std::array<std::uint64_t, kMaxWords>;

  PointPacker(const FieldCtx& ctx, unsigned m);

  bool supported() const { return words_ <= kMaxWords; }
  unsigned words() const { return words_; }
  unsigned lane_bits() const { return lane_bits_; }

  Packed pack(const Point& x) const;
  Packed add(const Packed& a, const Packed& b) const {
    Packed out{};
    for (unsigned w = 0; w < words_; ++w) out[w] = add_word(a[w], b[w]);
    return out;
  }
  std::uint64_t add_word(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t s = a + b;
    const std::uint64_t ge = (s + add_const_) & high_mask_;
    return s - (ge >> (lane_bits_ - 1)) * p_;
  }
  // Keyed fingerprint of a packed point.
  static std::uint64_t fingerprint(const Packed& x, unsigned words, std::uint64_t key) {
    std::uint64_t h = key;
    for (unsigned w = 0; w < words; ++w) h = splitmix64(h ^ x[w]);
    return h;
  }

 private:
  FieldCtx ctx_;
  unsigned m_;
  std::uint64_t p_;
  unsigned lane_bits_;
  unsigned lanes_per_word_;
  unsigned words_;
  std::uint64_t add_const_ = 0;  // per lane 2^(w-1) - p
  std::uint64_t high_mask_ = 0;  // per lane bit w-1
};

struct PlaneCount {
  std::uint64_t plane = 0;  // corrupted points on the plane
  std::uint64_t line = 0;   // corrupted points on the anchor line (grid column k = 0)
};

class PointCorruption {
 public:
  PointCorruption(const FieldCtx& ctx, unsigned m);

  // Replace x by `value` (must differ from the base) or, if omitted, by base + 1.
  void add_targeted(const Point& x, std::optional<FieldElem> value = std::nullopt);
  // Each point independently (by a keyed hash) with probability delta; the
  // replacement is uniform among the other |F| - 1 symbols.
  void set_noise(const Rational& delta, std::uint64_t seed, std::uint64_t copy = 0);
  // Corrupt every point whose first coordinate lies in `first_coord` (indexed by code).
  void set_coordinate_blot(std::vector<bool> first_coord, std::uint64_t seed);
  // Corrupt every point of a plane.
  void add_plane_blot(const PlaneRep& plane, std::uint64_t seed);

  bool empty() const;
  bool corrupted(const Point& x) const { return corrupted_keyed(x, noise_key_); }
  FieldElem apply(const Point& x, FieldElem original) const { return apply_keyed(x, original, noise_key_); }
  // Same corruption with the noise re-keyed for another copy index.
  bool corrupted(const Point& x, std::uint64_t copy) const { return corrupted_keyed(x, copy_key(copy)); }
  FieldElem apply(const Point& x, FieldElem original, std::uint64_t copy) const {
    return apply_keyed(x, original, copy_key(copy));
  }

  // Inclusion probability of the noise predicate (threshold / 2^64).
  Rational noise_rate() const;
  std::uint64_t targeted_count() const { return targeted_.size(); }

  // Corrupted points on a rank-2 plane; uses the packed scanner when the
  // corruption is noise plus targeted points, and enumeration otherwise.
  PlaneCount count_on_plane(const PlaneRep& plane) const;
  PlaneCount count_on_plane_slow(const PlaneRep& plane) const;

 private:
  std::uint64_t copy_key(std::uint64_t copy) const;
  std::uint64_t noise_hash(const Point& x, std::uint64_t key) const;
  bool noise_hit(const Point& x, std::uint64_t key) const;
  bool corrupted_keyed(const Point& x, std::uint64_t key) const;
  FieldElem apply_keyed(const Point& x, FieldElem original, std::uint64_t key) const;
  FieldElem replacement(std::uint64_t h, FieldElem original) const;

  FieldCtx ctx_;
  unsigned m_;
  PointPacker packer_;
  std::vector<std::pair<Point, std::optional<FieldElem>>> targeted_;
  bool noise_ = false;
  std::uint64_t noise_seed_ = 0;
  std::uint64_t noise_key_ = 0;
  std::uint64_t threshold_ = 0;
  std::vector<bool> blot_coords_;
  std::uint64_t blot_seed_ = 0;
  std::vector<std::pair<PlaneRep, std::uint64_t>> plane_blots_;
};

class RmWord {
 public:
  virtual ~RmWord() = default;
  virtual FieldElem at(const Point& x) const = 0;
  virtual const RmParams& params() const = 0;
};

class CodewordWord final : public RmWord {
 public:
  CodewordWord(const RmParams& params, const RmPoly& poly) : eval_(params, poly) {}
  FieldElem at(const Point& x) const override { return eval_(x); }
  const RmParams& params() const override { return eval_.params(); }
  const PolyEvaluator& evaluator() const { return eval_; }

 private:
  PolyEvaluator eval_;
};

class TableWord final : public RmWord {
 public:
  TableWord(const RmParams& params, std::vector<FieldElem> table);
  FieldElem at(const Point& x) const override { return table_[point_code(params_.ctx, x)]; }
  const RmParams& params() const override { return params_; }
  const std::vector<FieldElem>& table() const { return table_; }

 private:
  RmParams params_;
  std::vector<FieldElem> table_;
};

class PlantedWord final : public RmWord {
 public:
  PlantedWord(std::shared_ptr<const RmWord> base, PointCorruption corruption)
      : base_(std::move(base)), corruption_(std::move(corruption)) {}
  FieldElem at(const Point& x) const override { return corruption_.apply(x, base_->at(x)); }
  const RmParams& params() const override { return base_->params(); }
  const RmWord& base() const { return *base_; }
  const PointCorruption& corruption() const { return corruption_; }

 private:
  std::shared_ptr<const RmWord> base_;
  PointCorruption corruption_;
};

std::vector<FieldElem> materialize(const RmWord& word);
std::vector<FieldElem> restrict_word(const RmWord& word, const PlaneRep& plane);

}  // namespace rlcc

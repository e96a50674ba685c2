#pragma once

// The composed code: r repetitions of the RM codeword, then one canonical
// proof per point-predicate key, then one per line-predicate key.
//
// Point keys: (anchor in F^m, dir1 in H^m, dir2 in H^m), proved point = anchor.
// Line keys: (anchor in F^m, dir1 in F^m normalised, dir2 in H^m), proved
// line = Line(anchor, dir1). Every key value is enumerated, including pairs of
// directions that do not span a plane; their proofs still encode the
// parameterised restriction.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcc/ctrw.hpp"
#include "rlcc/pcpp.hpp"
#include "rlcc/word.hpp"

namespace rlcc {

using Address = unsigned __int128;

std::string address_to_string(Address a);
Address parse_address(const std::string& text);

enum class Region : std::uint8_t { rm = 0, point_proof = 1, line_proof = 2 };
const char* region_name(Region r);

struct DecodedAddress {
  Region region = Region::rm;
  std::uint64_t copy = 0;    // rm
  std::uint64_t point = 0;   // rm: point code
  Address key = 0;           // proof regions
  std::uint64_t offset = 0;  // proof regions: offset in [L]
};

class ComposedLayout {
 public:
  // Throws std::overflow_error when N does not fit in 128 bits.
  static ComposedLayout build(const RmParams& rm, const PcppParams& pcpp);

  const RmParams& rm() const { return rm_; }
  const PcppParams& pcpp() const { return pcpp_; }
  std::uint64_t points() const { return nm_; }       // n^m
  std::uint64_t h_vectors() const { return hm_; }    // p^m
  Address projective() const { return proj_; }       // (n^m - 1)/(n - 1)
  Address point_keys() const { return point_keys_; }
  Address line_keys() const { return line_keys_; }
  Address b_actual() const { return point_keys_ + line_keys_; }
  std::uint64_t r() const { return r_; }
  Address n_total() const { return n_; }
  Address rm_end() const { return rm_end_; }
  Address point_end() const { return point_end_; }
  BigInt b_count() const;  // 2 n^m |H|^{2m} n^2

  DecodedAddress decode(Address a) const;
  Address rm_address(std::uint64_t copy, std::uint64_t point) const;
  Address proof_address(Region region, Address key, std::uint64_t offset) const;

  // Key index of a keyed plane (canonical_plane_key output).
  Address point_key(const KeyedPlane& keyed) const;
  Address line_key(const KeyedPlane& keyed) const;
  PlaneRep plane_of_key(Region region, Address key) const;

 private:
  RmParams rm_;
  PcppParams pcpp_;
  std::uint64_t nm_ = 0;
  std::uint64_t hm_ = 0;
  Address proj_ = 0;
  Address point_keys_ = 0;
  Address line_keys_ = 0;
  std::uint64_t r_ = 0;
  Address n_ = 0;
  Address rm_end_ = 0;
  Address point_end_ = 0;
};

class ComposedWord {
 public:
  virtual ~ComposedWord() = default;
  virtual const ComposedLayout& layout() const = 0;
  virtual FieldElem read(Address a) const = 0;
  virtual std::string provenance() const = 0;
};

// The honest codeword, evaluated on demand; proofs are cached.
class CanonicalComposed final : public ComposedWord {
 public:
  CanonicalComposed(ComposedLayout layout, const RmPoly& poly, std::size_t cache_limit = 1 << 16);

  const ComposedLayout& layout() const override { return layout_; }
  FieldElem read(Address a) const override;
  std::string provenance() const override { return "canonical"; }

  const PolyEvaluator& evaluator() const { return eval_; }
  std::shared_ptr<const std::vector<FieldElem>> proof_coeffs(Region region, Address key) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint8_t, Address>& k) const {
      return splitmix64(splitmix64(static_cast<std::uint64_t>(k.second)) ^ static_cast<std::uint64_t>(k.second >> 64) ^
                        k.first);
    }
  };

  ComposedLayout layout_;
  PolyEvaluator eval_;
  std::size_t cache_limit_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::pair<std::uint8_t, Address>, std::shared_ptr<const std::vector<FieldElem>>, KeyHash>
      cache_;
};

class TableComposed final : public ComposedWord {
 public:
  static constexpr std::uint64_t kMaxSymbols = std::uint64_t{1} << 27;
  static TableComposed materialize(const ComposedWord& word);

  const ComposedLayout& layout() const override { return layout_; }
  FieldElem read(Address a) const override { return table_[static_cast<std::size_t>(a)]; }
  std::string provenance() const override { return "table"; }
  const std::vector<FieldElem>& table() const { return table_; }

 private:
  TableComposed(ComposedLayout layout, std::vector<FieldElem> table)
      : layout_(std::move(layout)), table_(std::move(table)) {}
  ComposedLayout layout_;
  std::vector<FieldElem> table_;
};

struct CorruptionOverlay {
  struct RegionNoise {
    Region region = Region::rm;
    Rational delta;
    std::uint64_t seed = 0;
    std::uint64_t threshold = 0;
  };
  struct ProofBlot {
    Region region = Region::point_proof;
    Address key = 0;
    std::uint64_t seed = 0;
  };

  // Applied to every RM copy, its noise keyed by the copy index.
  std::optional<PointCorruption> rm;
  std::vector<std::pair<Address, std::optional<FieldElem>>> targeted;
  std::vector<RegionNoise> region_noise;
  std::vector<ProofBlot> proof_blots;
  // Whole RM copies replaced symbol by symbol, each copy chosen with the given rate.
  std::uint64_t bad_copy_threshold = 0;
  std::uint64_t bad_copy_seed = 0;
  Rational bad_copy_rate{0};

  void add_region_noise(Region region, const Rational& delta, std::uint64_t seed);
  void set_bad_copies(const Rational& rate, std::uint64_t seed);
  bool bad_copy(std::uint64_t copy) const;
  bool empty() const;
};

struct CorruptionAccounting {
  bool exact = false;
  // Exact counts, or expected counts when the word is not materialisable.
  double rm = 0.0;
  double point_proof = 0.0;
  double line_proof = 0.0;
  double fraction = 0.0;  // over the whole block
  double rm_fraction = 0.0;
};

class CorruptedComposed final : public ComposedWord {
 public:
  CorruptedComposed(std::shared_ptr<const ComposedWord> base, CorruptionOverlay overlay);

  const ComposedLayout& layout() const override { return base_->layout(); }
  FieldElem read(Address a) const override;
  std::string provenance() const override { return "corrupted(" + base_->provenance() + ")"; }

  bool corrupted(Address a) const;
  const ComposedWord& base() const { return *base_; }
  const CorruptionOverlay& overlay() const { return overlay_; }
  CorruptionAccounting accounting() const;

 private:
  std::optional<FieldElem> overlay_value(Address a, FieldElem original) const;
  std::shared_ptr<const ComposedWord> base_;
  CorruptionOverlay overlay_;
};

struct CorrectionTrace {
  std::optional<FieldElem> output;  // nullopt is the abort symbol
  std::uint64_t copy = 0;
  Point x;                          // queried point (RM) or walk start (proof)
  int rejected_by = -1;             // -1 none; 0..m walk predicate; -2 own proof; -3 symbol corrector
  std::uint64_t queries = 0;
  WalkTranscript walk;
};

// Local correction of an RM-region address.
CorrectionTrace correct_rm(const ComposedWord& word, Address i, Rng& rng);
// Local correction of a proof-region address.
CorrectionTrace correct_proof(const ComposedWord& word, Address i, Rng& rng);
// Dispatches on the region.
CorrectionTrace correct(const ComposedWord& word, Address i, Rng& rng);

struct BlockLengthReport {
  std::uint32_t p = 0;
  unsigned m = 0;
  unsigned d = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t k2 = 0;
  std::uint64_t L = 0;
  BigInt nm;
  BigInt point_keys;
  BigInt line_keys;
  BigInt b_actual;
  BigInt b_count;
  BigInt r_actual;
  BigInt n_actual;        // r n^m + B_actual L
  BigInt r_count;
  BigInt n_count;         // r' n^m + B_count L
  BigInt n_count_bound;   // n^m + 2 B_count L
  Rational rho;
  Rational distance_bound;  // rho / 2
  double rate = 0.0;        // k / N_actual
  double exponent_actual = 0.0;
  double exponent_count = 0.0;
  std::uint64_t q_pcpp = 0;          // measured verifier queries
  std::uint64_t queries_composed = 0;  // (m + 3) q_pcpp
};

BlockLengthReport block_length_report(const RmParams& rm, const PcppParams& pcpp);
// p = 17, m in {2, 3}, d = floor(n/4) unless given.
std::vector<BlockLengthReport> block_length_sweep(const std::vector<std::tuple<std::uint32_t, unsigned, unsigned>>& grid,
                                                  unsigned R = 9, unsigned q_v = 1);

}  // namespace rlcc

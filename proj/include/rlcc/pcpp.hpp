#pragma once

// Stand-in proof of proximity for the augmented plane languages.
//
// The canonical proof of a member is R copies of the graded-lex coefficient
// vector of its bivariate polynomial Q. A verifier round reads
//   (a) one coefficient position in two distinct copies,
//   (b) one plane point against Q from a random copy,
//   (c) one tail coordinate against the same copy.
// Word queries per round: 2. Proof queries per round: 2 + C(d+2,2).

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlcc/rational.hpp"
#include "rlcc/reed_muller.hpp"

namespace rlcc {

class PcppError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PcppParams {
  unsigned d = 0;
  std::uint64_t k2 = 0;
  unsigned q_v = 1;
  unsigned R = 9;
  Rational rho_prox;

  // Requires q_v >= 1, R >= 3 odd, 0 < rho_prox < 1.
  static PcppParams make(unsigned d, unsigned q_v, unsigned R, const Rational& rho_prox);
  std::uint64_t L() const { return R * k2; }
  std::uint64_t queries_per_round() const { return 2 + 2 + k2; }
  std::uint64_t verifier_queries() const { return q_v * queries_per_round(); }
};

using SymbolReader = std::function<FieldElem(std::uint64_t)>;

// Read access to an augmented plane word of length 2n^2 through its base
// plane word (grid order); tail symbols are resolved to base symbols.
struct AugmentedView {
  AugmentKind kind = AugmentKind::point;
  std::uint64_t n = 0;
  std::uint64_t point_index = 0;     // point type
  std::vector<std::uint64_t> line;   // line type: base index of line position j
  SymbolReader base;

  std::uint64_t size() const { return 2 * n * n; }
  std::uint64_t resolve(std::uint64_t i) const;
  FieldElem operator[](std::uint64_t i) const { return base(resolve(i)); }

  static AugmentedView of(const AugmentedWord& word);
  // Plane word in grid order with the anchor point (grid index 0) or the
  // anchor line (grid column 0) selected.
  static AugmentedView anchored(AugmentKind kind, std::uint64_t n, SymbolReader base);
};

struct CanonicalProof {
  std::vector<FieldElem> symbols;  // R * k2
};

CanonicalProof proof_from_coeffs(const PcppParams& params, std::span<const FieldElem> coeffs);
// Throws PcppError unless the word lies in the augmented language.
CanonicalProof canonical_proof(const FieldCtx& ctx, const PcppParams& params, const AugmentedWord& member);

struct VerifyResult {
  bool accept = true;
  std::uint64_t word_queries = 0;
  std::uint64_t proof_queries = 0;
  std::optional<unsigned> failed_round;
  char failed_check = 0;  // 'a', 'b' or 'c'
};

VerifyResult verify_proximity(const FieldCtx& ctx, const PcppParams& params, const AugmentedView& word,
                              const SymbolReader& proof, Rng& rng);

struct SymbolCorrection {
  std::optional<FieldElem> symbol;  // nullopt is the abort symbol
  bool strict_majority = false;
  VerifyResult verify;
  std::uint64_t queries = 0;
};

SymbolCorrection correct_proof_symbol(const FieldCtx& ctx, const PcppParams& params, const AugmentedView& word,
                                      const SymbolReader& proof, std::uint64_t offset, Rng& rng);

struct FamilyAcceptance {
  std::string name;
  AugmentKind kind = AugmentKind::point;
  std::uint64_t accepted = 0;
  std::uint64_t trials = 0;
  Rational min_distance;  // smallest certified lower bound among the instances
};

struct CalibrationStep {
  unsigned q_v = 0;
  double max_acceptance = 0.0;
  std::vector<FamilyAcceptance> families;
  bool meets_target = false;
};

struct CalibrationResult {
  std::string field;
  unsigned d = 0;
  unsigned R = 0;
  Rational rho_prox;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::optional<unsigned> q_v;        // smallest q_v meeting the target
  double sigma_pcpp = 0.0;            // max family acceptance at q_v
  std::uint64_t honest_accepted = 0;  // honest pairs accepted at q_v
  std::uint64_t honest_trials = 0;
  std::vector<CalibrationStep> steps;
  std::uint64_t key_hash = 0;
};

// Far instances are planted around a random bivariate polynomial whose
// canonical proof is supplied; distances are certified by brute force when
// the enumeration fits the budget and by the planted bounds otherwise.
// Searches q_v = 1, 2, ... up to q_cap for acceptance <= 1/2 - 3 se.
CalibrationResult calibrate_pcpp(const FieldCtx& ctx, unsigned d, unsigned R, const Rational& rho_prox,
                                 std::uint64_t trials, std::uint64_t seed, unsigned q_cap, unsigned threads);

// Acceptance of every far family at a fixed q_v.
CalibrationStep pcpp_far_acceptance(const FieldCtx& ctx, const PcppParams& params, std::uint64_t trials,
                                    std::uint64_t seed, unsigned threads);

std::uint64_t calibration_key(const FieldCtx& ctx, unsigned d, unsigned R, const Rational& rho_prox,
                              std::uint64_t trials, std::uint64_t seed);
std::string calibration_to_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const std::string& text);
// Returns the stored result when the sidecar exists and its key matches.
std::optional<CalibrationResult> load_calibration(const std::string& path, std::uint64_t key);
void save_calibration(const std::string& path, const CalibrationResult& result);

}  // namespace rlcc

#pragma once

// Arithmetic in the tower GF(p) = H ⊂ F = GF(p^m).
//
// Elements of F are stored by their integer code
//
//   code(e) = sum_i coeffs[i] * p^i,
//
// where coeffs is the residue-class representative modulo the irreducible,
// low degree first. The subfield H embeds as the codes [0, p).

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rlcc {

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FieldElem {
  std::uint32_t code = 0;

  constexpr bool is_zero() const { return code == 0; }
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

enum class ArithOp { add, sub, mul, inv, neg };

// m×m matrix over GF(p); row i holds the coefficient vector of coordinate i.
struct HMatrix {
  unsigned m = 0;
  std::vector<std::uint32_t> entries;  // row-major

  std::uint32_t at(unsigned row, unsigned col) const { return entries[row * m + col]; }
  std::uint32_t& at(unsigned row, unsigned col) { return entries[row * m + col]; }
  friend bool operator==(const HMatrix&, const HMatrix&) = default;
};

class FieldCtx {
 public:
  static constexpr unsigned kMaxDegree = 8;
  static constexpr std::uint32_t kMaxPrime = 1u << 20;
  static constexpr std::uint64_t kMaxOrder = std::uint64_t{1} << 32;
  // Log/Zech tables are built below this size; larger fields use schoolbook arithmetic.
  static constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 20;

  // Builds GF(p^m). Without an explicit irreducible the lexicographically
  // smallest monic irreducible of degree m is selected.
  static FieldCtx make(std::uint32_t p, unsigned m,
                       std::optional<std::vector<std::uint32_t>> irreducible = std::nullopt);

  // Parses `p^m/c0,c1,...,cm` (irreducible coefficients low degree first).
  static FieldCtx parse(std::string_view descriptor);
  std::string descriptor() const;

  std::uint32_t p() const { return p_; }
  unsigned m() const { return m_; }
  std::uint64_t n() const { return n_; }
  std::span<const std::uint32_t> irreducible() const;

  FieldElem elem(std::uint64_t code) const;
  static constexpr FieldElem zero() { return {0}; }
  static constexpr FieldElem one() { return {1}; }

  FieldElem add(FieldElem a, FieldElem b) const {
    if (p_ == 2) return {a.code ^ b.code};
    if (log_ == nullptr) return add_slow(a, b);
    if (a.code == 0) return b;
    if (b.code == 0) return a;
    const std::uint32_t la = log_[a.code];
    const std::uint32_t lb = log_[b.code];
    const std::uint32_t k = lb >= la ? lb - la : lb + order_ - la;
    const std::uint32_t z = zech_[k];
    if (z == kNoLog) return {0};
    return {exp_[la + z]};
  }

  FieldElem neg(FieldElem a) const {
    if (p_ == 2) return a;
    if (neg_ == nullptr) return neg_slow(a);
    return {neg_[a.code]};
  }

  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }

  FieldElem mul(FieldElem a, FieldElem b) const {
    if (log_ == nullptr) return mul_slow(a, b);
    if (a.code == 0 || b.code == 0) return {0};
    return {exp_[log_[a.code] + log_[b.code]]};
  }

  // Throws FieldError on zero.
  FieldElem inv(FieldElem a) const;
  FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }
  FieldElem pow(FieldElem a, std::uint64_t e) const;

  // Discrete log helpers; only available when tables are built.
  bool has_tables() const { return log_ != nullptr; }
  std::uint32_t log_of(FieldElem a) const { return log_[a.code]; }
  FieldElem exp_of(std::uint64_t e) const { return {exp_[e % order_]}; }
  std::uint32_t multiplicative_order() const { return order_; }

  std::vector<std::uint32_t> coeffs(FieldElem a) const;
  FieldElem from_coeffs(std::span<const std::uint32_t> coeffs) const;
  // Coefficient of X^i in a; precomputed when tables are built.
  std::uint32_t coeff(FieldElem a, unsigned i) const;

  FieldElem embed_h(std::uint32_t a) const;
  bool in_h(FieldElem a) const { return a.code < p_; }

  friend bool operator==(const FieldCtx& a, const FieldCtx& b);

 private:
  struct Impl;
  static constexpr std::uint32_t kNoLog = 0xffffffffu;

  FieldElem add_slow(FieldElem a, FieldElem b) const;
  FieldElem neg_slow(FieldElem a) const;
  FieldElem mul_slow(FieldElem a, FieldElem b) const;

  std::shared_ptr<const Impl> impl_;
  std::uint32_t p_ = 0;
  unsigned m_ = 0;
  std::uint64_t n_ = 0;
  std::uint32_t order_ = 0;
  const std::uint32_t* log_ = nullptr;
  const std::uint32_t* exp_ = nullptr;
  const std::uint32_t* zech_ = nullptr;
  const std::uint32_t* neg_ = nullptr;
};

FieldElem elem_arith(const FieldCtx& ctx, ArithOp op, FieldElem a,
                     std::optional<FieldElem> b = std::nullopt);

std::vector<FieldElem> lift_h_vector(const FieldCtx& ctx, std::span<const std::uint32_t> v);

HMatrix matrix_rep(const FieldCtx& ctx, std::span<const FieldElem> x);
std::vector<FieldElem> matrix_decode(const FieldCtx& ctx, const HMatrix& mat);

bool is_prime(std::uint64_t v);
// `poly` is a coefficient vector over GF(p), low degree first, leading coefficient last.
bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> poly);
std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, unsigned m);

}  // namespace rlcc

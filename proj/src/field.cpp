#include "rlcc/field.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace rlcc {

namespace {

using Poly = std::vector<std::uint64_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t mod) {
  std::uint64_t r = 1 % mod;
  base %= mod;
  while (e > 0) {
    if (e & 1) r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * base) % mod);
    base = static_cast<std::uint64_t>((static_cast<unsigned __int128>(base) * base) % mod);
    e >>= 1;
  }
  return r;
}

// Remainder of a modulo monic-or-not b over GF(p).
Poly poly_mod(Poly a, const Poly& b, std::uint64_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  const std::uint64_t lead_inv = pow_mod(b.back(), p - 2, p);
  while (a.size() >= b.size()) {
    const std::uint64_t factor = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) {
      a[shift + i] = (a[shift + i] + (p - factor) * b[i]) % p;
    }
    trim(a);
  }
  return a;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q * q <= v; ++q) {
    if (v % q == 0) {
      out.push_back(q);
      while (v % q == 0) v /= q;
    }
  }
  if (v > 1) out.push_back(v);
  return out;
}

}  // namespace

struct FieldCtx::Impl {
  std::vector<std::uint32_t> irreducible;  // m+1 entries, monic
  std::vector<std::uint64_t> p_pow;        // p^i for i <= m
  std::vector<std::uint32_t> log;
  std::vector<std::uint32_t> exp;
  std::vector<std::uint32_t> zech;
  std::vector<std::uint32_t> neg;
};

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t q = 2; q * q <= v; ++q) {
    if (v % q == 0) return false;
  }
  return true;
}

bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> poly) {
  if (poly.size() < 2 || poly.back() == 0) return false;
  const unsigned deg = static_cast<unsigned>(poly.size() - 1);
  if (deg == 1) return true;
  Poly f(poly.begin(), poly.end());
  for (auto& c : f) c %= p;
  // A reducible polynomial has a monic factor of degree <= deg/2.
  for (unsigned k = 1; k <= deg / 2; ++k) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < k; ++i) count *= p;
    for (std::uint64_t code = 0; code < count; ++code) {
      Poly g(k + 1, 0);
      std::uint64_t c = code;
      for (unsigned i = 0; i < k; ++i) {
        g[i] = c % p;
        c /= p;
      }
      g[k] = 1;
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> smallest_irreducible(std::uint32_t p, unsigned m) {
  std::uint64_t count = 1;
  for (unsigned i = 0; i < m; ++i) count *= p;
  for (std::uint64_t code = 0; code < count; ++code) {
    std::vector<std::uint32_t> f(m + 1, 0);
    std::uint64_t c = code;
    for (unsigned i = 0; i < m; ++i) {
      f[i] = static_cast<std::uint32_t>(c % p);
      c /= p;
    }
    f[m] = 1;
    if (is_irreducible(p, f)) return f;
  }
  throw FieldError("no irreducible polynomial found");
}

FieldCtx FieldCtx::make(std::uint32_t p, unsigned m,
                        std::optional<std::vector<std::uint32_t>> irreducible) {
  if (!is_prime(p)) throw FieldError("p = " + std::to_string(p) + " is not prime");
  if (p > kMaxPrime) throw FieldError("p exceeds 2^20");
  if (m < 2 || m > kMaxDegree) throw FieldError("extension degree must lie in [2, 8]");
  std::uint64_t n = 1;
  for (unsigned i = 0; i < m; ++i) {
    n *= p;
    if (n > kMaxOrder) throw FieldError("field order exceeds 2^32");
  }

  auto impl = std::make_shared<Impl>();
  if (irreducible) {
    auto f = *irreducible;
    if (f.size() != m + 1) throw FieldError("irreducible must have exactly m+1 coefficients");
    for (auto c : f) {
      if (c >= p) throw FieldError("irreducible coefficient out of range");
    }
    if (f.back() != 1) throw FieldError("irreducible must be monic");
    if (!is_irreducible(p, f)) throw FieldError("supplied polynomial is reducible");
    impl->irreducible = std::move(f);
  } else {
    impl->irreducible = smallest_irreducible(p, m);
  }
  impl->p_pow.resize(m + 1);
  impl->p_pow[0] = 1;
  for (unsigned i = 1; i <= m; ++i) impl->p_pow[i] = impl->p_pow[i - 1] * p;

  FieldCtx ctx;
  ctx.p_ = p;
  ctx.m_ = m;
  ctx.n_ = n;
  ctx.order_ = static_cast<std::uint32_t>(n - 1);
  ctx.impl_ = impl;

  if (n <= kTableLimit) {
    // Primitive element: smallest code whose order is n-1.
    const auto factors = prime_factors(n - 1);
    std::uint32_t gen = 0;
    for (std::uint32_t g = 1; g < n; ++g) {
      bool ok = true;
      for (auto q : factors) {
        if (ctx.pow(FieldElem{g}, (n - 1) / q) == one()) {
          ok = false;
          break;
        }
      }
      if (ok) {
        gen = g;
        break;
      }
    }
    const std::uint32_t order = ctx.order_;
    impl->log.assign(n, kNoLog);
    impl->exp.assign(2 * static_cast<std::size_t>(order), 0);
    FieldElem cur = one();
    for (std::uint32_t e = 0; e < order; ++e) {
      impl->exp[e] = cur.code;
      impl->exp[e + order] = cur.code;
      impl->log[cur.code] = e;
      cur = ctx.mul_slow(cur, FieldElem{gen});
    }
    impl->neg.resize(n);
    for (std::uint32_t c = 0; c < n; ++c) impl->neg[c] = ctx.neg_slow(FieldElem{c}).code;
    impl->zech.resize(order);
    for (std::uint32_t k = 0; k < order; ++k) {
      const FieldElem s = ctx.add_slow(one(), FieldElem{impl->exp[k]});
      impl->zech[k] = s.is_zero() ? kNoLog : impl->log[s.code];
    }
    ctx.log_ = impl->log.data();
    ctx.exp_ = impl->exp.data();
    ctx.zech_ = impl->zech.data();
    ctx.neg_ = impl->neg.data();
  }
  return ctx;
}

FieldCtx FieldCtx::parse(std::string_view descriptor) {
  const auto caret = descriptor.find('^');
  const auto slash = descriptor.find('/');
  if (caret == std::string_view::npos) {
    throw FieldError("field descriptor must look like p^m or p^m/c0,...,cm");
  }
  auto parse_u = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw FieldError("bad integer '" + std::string(s) + "' in field descriptor");
    }
    return v;
  };
  const auto p = parse_u(descriptor.substr(0, caret));
  const auto m_str = slash == std::string_view::npos ? descriptor.substr(caret + 1)
                                                     : descriptor.substr(caret + 1, slash - caret - 1);
  const auto m = parse_u(m_str);
  if (p > kMaxPrime || m > kMaxDegree) throw FieldError("field descriptor out of range");
  std::optional<std::vector<std::uint32_t>> f;
  if (slash != std::string_view::npos) {
    std::vector<std::uint32_t> coeffs;
    std::string_view rest = descriptor.substr(slash + 1);
    while (true) {
      const auto comma = rest.find(',');
      coeffs.push_back(static_cast<std::uint32_t>(parse_u(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    f = std::move(coeffs);
  }
  return make(static_cast<std::uint32_t>(p), static_cast<unsigned>(m), std::move(f));
}

std::string FieldCtx::descriptor() const {
  std::ostringstream out;
  out << p_ << '^' << m_ << '/';
  for (std::size_t i = 0; i < impl_->irreducible.size(); ++i) {
    if (i) out << ',';
    out << impl_->irreducible[i];
  }
  return out.str();
}

std::span<const std::uint32_t> FieldCtx::irreducible() const { return impl_->irreducible; }

FieldElem FieldCtx::elem(std::uint64_t code) const {
  if (code >= n_) throw FieldError("element code " + std::to_string(code) + " out of range");
  return {static_cast<std::uint32_t>(code)};
}

std::vector<std::uint32_t> FieldCtx::coeffs(FieldElem a) const {
  std::vector<std::uint32_t> out(m_);
  std::uint32_t c = a.code;
  for (unsigned i = 0; i < m_; ++i) {
    out[i] = c % p_;
    c /= p_;
  }
  return out;
}

std::uint32_t FieldCtx::coeff(FieldElem a, unsigned i) const {
  return static_cast<std::uint32_t>((a.code / impl_->p_pow[i]) % p_);
}

FieldElem FieldCtx::from_coeffs(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() != m_) throw FieldError("coefficient vector must have length m");
  std::uint64_t code = 0;
  for (unsigned i = m_; i-- > 0;) {
    if (coeffs[i] >= p_) throw FieldError("coefficient out of range");
    code = code * p_ + coeffs[i];
  }
  return {static_cast<std::uint32_t>(code)};
}

FieldElem FieldCtx::add_slow(FieldElem a, FieldElem b) const {
  std::uint64_t code = 0;
  std::uint32_t x = a.code, y = b.code;
  for (unsigned i = 0; i < m_; ++i) {
    const std::uint64_t digit = (x % p_ + y % p_) % p_;
    code += digit * impl_->p_pow[i];
    x /= p_;
    y /= p_;
  }
  return {static_cast<std::uint32_t>(code)};
}

FieldElem FieldCtx::neg_slow(FieldElem a) const {
  std::uint64_t code = 0;
  std::uint32_t x = a.code;
  for (unsigned i = 0; i < m_; ++i) {
    const std::uint64_t digit = (p_ - x % p_) % p_;
    code += digit * impl_->p_pow[i];
    x /= p_;
  }
  return {static_cast<std::uint32_t>(code)};
}

FieldElem FieldCtx::mul_slow(FieldElem a, FieldElem b) const {
  const auto ca = coeffs(a);
  const auto cb = coeffs(b);
  Poly prod(2 * m_ - 1, 0);
  for (unsigned i = 0; i < m_; ++i) {
    if (ca[i] == 0) continue;
    for (unsigned j = 0; j < m_; ++j) {
      prod[i + j] = (prod[i + j] + static_cast<std::uint64_t>(ca[i]) * cb[j]) % p_;
    }
  }
  const auto& f = impl_->irreducible;
  // f is monic: X^m = -(f_0 + ... + f_{m-1} X^{m-1}).
  for (std::size_t k = prod.size(); k-- > m_;) {
    const std::uint64_t c = prod[k];
    if (c == 0) continue;
    prod[k] = 0;
    for (unsigned i = 0; i < m_; ++i) {
      prod[k - m_ + i] = (prod[k - m_ + i] + (p_ - c) * f[i]) % p_;
    }
  }
  std::uint64_t code = 0;
  for (unsigned i = m_; i-- > 0;) code = code * p_ + prod[i];
  return {static_cast<std::uint32_t>(code)};
}

FieldElem FieldCtx::inv(FieldElem a) const {
  if (a.is_zero()) throw FieldError("inversion of zero");
  if (log_ != nullptr) return {exp_[order_ - log_[a.code]]};
  return pow(a, n_ - 2);
}

FieldElem FieldCtx::pow(FieldElem a, std::uint64_t e) const {
  if (log_ != nullptr) {
    if (e == 0) return one();
    if (a.is_zero()) return zero();
    return {exp_[(static_cast<unsigned __int128>(log_[a.code]) * e) % order_]};
  }
  FieldElem r = one();
  FieldElem base = a;
  while (e > 0) {
    if (e & 1) r = mul_slow(r, base);
    base = mul_slow(base, base);
    e >>= 1;
  }
  return r;
}

FieldElem FieldCtx::embed_h(std::uint32_t a) const {
  if (a >= p_) throw FieldError("subfield scalar " + std::to_string(a) + " out of range");
  return {a};
}

bool operator==(const FieldCtx& a, const FieldCtx& b) {
  if (a.impl_ == b.impl_) return true;
  if (!a.impl_ || !b.impl_) return false;
  return a.p_ == b.p_ && a.m_ == b.m_ && a.impl_->irreducible == b.impl_->irreducible;
}

FieldElem elem_arith(const FieldCtx& ctx, ArithOp op, FieldElem a, std::optional<FieldElem> b) {
  auto need_b = [&]() {
    if (!b) throw FieldError("binary operation requires two operands");
    return *b;
  };
  switch (op) {
    case ArithOp::add: return ctx.add(a, need_b());
    case ArithOp::sub: return ctx.sub(a, need_b());
    case ArithOp::mul: return ctx.mul(a, need_b());
    case ArithOp::inv: return ctx.inv(a);
    case ArithOp::neg: return ctx.neg(a);
  }
  throw FieldError("unknown operation");
}

std::vector<FieldElem> lift_h_vector(const FieldCtx& ctx, std::span<const std::uint32_t> v) {
  std::vector<FieldElem> out;
  out.reserve(v.size());
  for (auto a : v) out.push_back(ctx.embed_h(a));
  return out;
}

HMatrix matrix_rep(const FieldCtx& ctx, std::span<const FieldElem> x) {
  const unsigned m = ctx.m();
  if (x.size() != m) throw FieldError("matrix_rep expects a point of F^m");
  HMatrix out{m, std::vector<std::uint32_t>(static_cast<std::size_t>(m) * m)};
  for (unsigned i = 0; i < m; ++i) {
    for (unsigned j = 0; j < m; ++j) out.at(i, j) = ctx.coeff(x[i], j);
  }
  return out;
}

std::vector<FieldElem> matrix_decode(const FieldCtx& ctx, const HMatrix& mat) {
  if (mat.m != ctx.m()) throw FieldError("matrix dimension mismatch");
  std::vector<FieldElem> out;
  out.reserve(mat.m);
  for (unsigned i = 0; i < mat.m; ++i) {
    out.push_back(ctx.from_coeffs(std::span(mat.entries).subspan(i * mat.m, mat.m)));
  }
  return out;
}

}  // namespace rlcc

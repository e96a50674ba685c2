#include "rlcc/reed_muller.hpp"

#include <algorithm>
#include <limits>

namespace rlcc {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw RmError("binomial overflow");
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<Monomial> monomial_basis(unsigned m, unsigned d) {
  if (m == 0 || m > Point::kMaxDim) throw RmError("monomial dimension must be in [1, 8]");
  if (d > std::numeric_limits<std::uint16_t>::max()) throw RmError("degree too large");
  const std::uint64_t k = binomial(d + m, m);
  if (k > 50'000'000) throw RmError("monomial basis too large");
  std::vector<Monomial> out;
  out.reserve(k);
  // Lexicographic enumeration, then a stable sort by total degree.
  Monomial cur;
  auto rec = [&](auto&& self, unsigned i) -> void {
    if (i == m) {
      out.push_back(cur);
      return;
    }
    for (unsigned e = 0; cur.total + e <= d; ++e) {
      cur.e[i] = static_cast<std::uint16_t>(e);
      cur.total += e;
      self(self, i + 1);
      cur.total -= e;
    }
    cur.e[i] = 0;
  };
  rec(rec, 0);
  std::stable_sort(out.begin(), out.end(),
                   [](const Monomial& a, const Monomial& b) { return a.total < b.total; });
  return out;
}

std::size_t bivariate_index(unsigned deg_t, unsigned deg_s) {
  const std::size_t total = deg_t + deg_s;
  return total * (total + 1) / 2 + deg_t;
}

RmParams RmParams::make(const FieldCtx& ctx, unsigned m, unsigned d) {
  if (m == 0 || m > Point::kMaxDim) throw RmError("RM dimension must be in [1, 8]");
  if (d >= ctx.n()) throw RmError("degree d must be smaller than |F|");
  RmParams out;
  out.ctx = ctx;
  out.m = m;
  out.d = d;
  out.k = binomial(d + m, m);
  out.rho = Rational(1) - Rational(d) / Rational(ctx.n());
  return out;
}

RmPoly encode(const RmParams& params, std::span<const FieldElem> message) {
  if (message.size() != params.k) throw RmError("message length must equal k");
  for (FieldElem e : message) params.ctx.elem(e.code);
  return RmPoly{std::vector<FieldElem>(message.begin(), message.end())};
}

RmPoly random_poly(const RmParams& params, Rng& rng) {
  RmPoly out;
  out.coeffs.resize(params.k);
  for (auto& c : out.coeffs) c = sample_elem(params.ctx, rng);
  return out;
}

FieldElem evaluate(const RmParams& params, const RmPoly& poly, const Point& x) {
  const auto& ctx = params.ctx;
  const auto basis = monomial_basis(params.m, params.d);
  FieldElem acc = FieldCtx::zero();
  for (std::size_t t = 0; t < basis.size(); ++t) {
    FieldElem term = poly.coeffs[t];
    for (unsigned i = 0; i < params.m && !term.is_zero(); ++i) {
      term = ctx.mul(term, ctx.pow(x[i], basis[t].e[i]));
    }
    acc = ctx.add(acc, term);
  }
  return acc;
}

PolyEvaluator::PolyEvaluator(const RmParams& params, const RmPoly& poly)
    : params_(params), poly_(poly), basis_(monomial_basis(params.m, params.d)) {
  if (poly_.coeffs.size() != params.k) throw RmError("polynomial length must equal k");
  const auto& ctx = params_.ctx;
  if (!ctx.has_tables()) return;
  const std::uint64_t order = ctx.multiplicative_order();
  const std::uint64_t limit = (params_.m + 1) * order;
  if (limit > (std::uint64_t{1} << 22)) return;
  if (ctx.p() != 2) {
    lane_bits_ = 64 / ctx.m();
    const std::uint64_t lane_max = lane_bits_ >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lane_bits_) - 1;
    flush_every_ = lane_max / (ctx.p() - 1);
    if (flush_every_ == 0) return;
    packed_.resize(ctx.n());
    for (std::uint64_t code = 0; code < ctx.n(); ++code) {
      std::uint64_t v = code;
      std::uint64_t packed = 0;
      for (unsigned i = 0; i < ctx.m(); ++i) {
        packed |= (v % ctx.p()) << (lane_bits_ * i);
        v /= ctx.p();
      }
      packed_[code] = packed;
    }
  }
  ext_exp_.resize(limit);
  for (std::uint64_t e = 0; e < limit; ++e) ext_exp_[e] = ctx.exp_of(e).code;
  for (std::size_t t = 0; t < basis_.size(); ++t) {
    if (poly_.coeffs[t].is_zero()) continue;
    term_log_.push_back(ctx.log_of(poly_.coeffs[t]));
    for (unsigned i = 0; i < params_.m; ++i) term_exp_.push_back(basis_[t].e[i]);
  }
  fast_ = true;
}

FieldElem PolyEvaluator::eval_slow(const Point& x) const {
  const auto& ctx = params_.ctx;
  const unsigned m = params_.m;
  const unsigned d = params_.d;
  std::vector<FieldElem> powers(static_cast<std::size_t>(m) * (d + 1));
  for (unsigned i = 0; i < m; ++i) {
    powers[i * (d + 1)] = FieldCtx::one();
    for (unsigned e = 1; e <= d; ++e) powers[i * (d + 1) + e] = ctx.mul(powers[i * (d + 1) + e - 1], x[i]);
  }
  FieldElem acc = FieldCtx::zero();
  for (std::size_t t = 0; t < basis_.size(); ++t) {
    FieldElem term = poly_.coeffs[t];
    for (unsigned i = 0; i < m && !term.is_zero(); ++i) term = ctx.mul(term, powers[i * (d + 1) + basis_[t].e[i]]);
    acc = ctx.add(acc, term);
  }
  return acc;
}

FieldElem PolyEvaluator::operator()(const Point& x) const {
  if (!fast_) return eval_slow(x);
  const auto& ctx = params_.ctx;
  const unsigned m = params_.m;
  const unsigned d = params_.d;
  const std::uint32_t order = ctx.multiplicative_order();
  const std::uint32_t limit = static_cast<std::uint32_t>(ext_exp_.size());

  constexpr std::size_t kStack = 1024;
  std::array<std::uint32_t, kStack> stack_buf;
  std::vector<std::uint32_t> heap_buf;
  std::uint32_t* powlog = stack_buf.data();
  const std::size_t stride = d + 1;
  if (m * stride > kStack) {
    heap_buf.resize(m * stride);
    powlog = heap_buf.data();
  }
  for (unsigned i = 0; i < m; ++i) {
    std::uint32_t* row = powlog + i * stride;
    row[0] = 0;
    if (x[i].is_zero()) {
      for (unsigned e = 1; e <= d; ++e) row[e] = limit;
      continue;
    }
    const std::uint32_t l = ctx.log_of(x[i]);
    for (unsigned e = 1; e <= d; ++e) {
      std::uint32_t v = row[e - 1] + l;
      if (v >= order) v -= order;
      row[e] = v;
    }
  }

  const std::size_t terms = term_log_.size();
  const std::uint16_t* ex = term_exp_.data();
  if (ctx.p() == 2) {
    std::uint32_t acc = 0;
    for (std::size_t t = 0; t < terms; ++t, ex += m) {
      std::uint32_t s = term_log_[t];
      for (unsigned i = 0; i < m; ++i) s += powlog[i * stride + ex[i]];
      if (s < limit) acc ^= ext_exp_[s];
    }
    return {acc};
  }

  const unsigned digits = ctx.m();
  std::array<std::uint64_t, FieldCtx::kMaxDegree> digit_sum{};
  const std::uint64_t lane_mask = (std::uint64_t{1} << lane_bits_) - 1;
  std::uint64_t acc = 0;
  std::uint64_t pending = 0;
  auto flush = [&] {
    for (unsigned i = 0; i < digits; ++i) digit_sum[i] += (acc >> (lane_bits_ * i)) & lane_mask;
    acc = 0;
    pending = 0;
  };
  for (std::size_t t = 0; t < terms; ++t, ex += m) {
    std::uint32_t s = term_log_[t];
    for (unsigned i = 0; i < m; ++i) s += powlog[i * stride + ex[i]];
    if (s >= limit) continue;
    acc += packed_[ext_exp_[s]];
    if (++pending == flush_every_) flush();
  }
  flush();
  std::uint64_t code = 0;
  for (unsigned i = digits; i-- > 0;) code = code * ctx.p() + digit_sum[i] % ctx.p();
  return {static_cast<std::uint32_t>(code)};
}

std::vector<FieldElem> evaluation_table(const RmParams& params, const RmPoly& poly) {
  const std::uint64_t total = point_space_size(params.ctx, params.m);
  const PolyEvaluator eval(params, poly);
  std::vector<FieldElem> out(total);
  for (std::uint64_t code = 0; code < total; ++code) out[code] = eval(point_from_code(params.ctx, params.m, code));
  return out;
}

namespace {

// Per-row univariate coefficients in s: u[b] = sum_a c[a][b] t^a.
void row_univariate(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> coeffs, FieldElem t,
                    std::vector<FieldElem>& u) {
  u.assign(d + 1, FieldCtx::zero());
  for (unsigned b = 0; b <= d; ++b) {
    FieldElem acc = FieldCtx::zero();
    for (unsigned a = d - b + 1; a-- > 0;) acc = ctx.add(ctx.mul(acc, t), coeffs[bivariate_index(a, b)]);
    u[b] = acc;
  }
}

FieldElem horner(const FieldCtx& ctx, std::span<const FieldElem> u, FieldElem s) {
  FieldElem acc = FieldCtx::zero();
  for (std::size_t b = u.size(); b-- > 0;) acc = ctx.add(ctx.mul(acc, s), u[b]);
  return acc;
}

}  // namespace

FieldElem evaluate_bivariate(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> coeffs, FieldElem t,
                             FieldElem s) {
  std::vector<FieldElem> u;
  row_univariate(ctx, d, coeffs, t, u);
  return horner(ctx, u, s);
}

std::vector<FieldElem> bivariate_grid(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> coeffs) {
  const std::uint64_t n = ctx.n();
  std::vector<FieldElem> out(n * n);
  std::vector<FieldElem> u;
  for (std::uint64_t j = 0; j < n; ++j) {
    row_univariate(ctx, d, coeffs, FieldElem{static_cast<std::uint32_t>(j)}, u);
    for (std::uint64_t k = 0; k < n; ++k) out[j * n + k] = horner(ctx, u, FieldElem{static_cast<std::uint32_t>(k)});
  }
  return out;
}

PlaneInterpolator::PlaneInterpolator(const FieldCtx& ctx, unsigned d) : ctx_(ctx), d_(d) {
  if (d + 1 > ctx.n()) throw RmError("d + 1 exceeds |F|: not enough interpolation nodes");
  const unsigned sz = d + 1;
  // Gauss-Jordan on [V | I] with V[j][a] = node_j^a.
  std::vector<FieldElem> aug(static_cast<std::size_t>(sz) * 2 * sz);
  auto at = [&](unsigned r, unsigned c) -> FieldElem& { return aug[static_cast<std::size_t>(r) * 2 * sz + c]; };
  for (unsigned j = 0; j < sz; ++j) {
    FieldElem pw = FieldCtx::one();
    for (unsigned a = 0; a < sz; ++a) {
      at(j, a) = pw;
      pw = ctx.mul(pw, FieldElem{j});
    }
    at(j, sz + j) = FieldCtx::one();
  }
  for (unsigned col = 0; col < sz; ++col) {
    unsigned piv = col;
    while (at(piv, col).is_zero()) ++piv;
    if (piv != col) {
      for (unsigned c = 0; c < 2 * sz; ++c) std::swap(at(piv, c), at(col, c));
    }
    const FieldElem inv = ctx.inv(at(col, col));
    for (unsigned c = 0; c < 2 * sz; ++c) at(col, c) = ctx.mul(at(col, c), inv);
    for (unsigned r = 0; r < sz; ++r) {
      if (r == col || at(r, col).is_zero()) continue;
      const FieldElem f = at(r, col);
      for (unsigned c = 0; c < 2 * sz; ++c) at(r, c) = ctx.sub(at(r, c), ctx.mul(f, at(col, c)));
    }
  }
  // V^{-1} maps node values to coefficients: coeff[a] = sum_j Vinv[a][j] value[j].
  vinv_.resize(static_cast<std::size_t>(sz) * sz);
  for (unsigned a = 0; a < sz; ++a) {
    for (unsigned j = 0; j < sz; ++j) vinv_[a * sz + j] = at(a, sz + j);
  }
}

std::vector<FieldElem> PlaneInterpolator::fit_univariate(std::span<const FieldElem> node_values) const {
  const unsigned sz = d_ + 1;
  std::vector<FieldElem> out(sz);
  for (unsigned a = 0; a < sz; ++a) {
    FieldElem acc = FieldCtx::zero();
    for (unsigned j = 0; j < sz; ++j) acc = ctx_.add(acc, ctx_.mul(vinv_[a * sz + j], node_values[j]));
    out[a] = acc;
  }
  return out;
}

std::optional<std::vector<FieldElem>> PlaneInterpolator::fit(std::span<const FieldElem> node_values) const {
  const unsigned sz = d_ + 1;
  // h[j][b]: interpolate each row along s.
  std::vector<FieldElem> h(static_cast<std::size_t>(sz) * sz);
  for (unsigned j = 0; j < sz; ++j) {
    const auto row = fit_univariate(node_values.subspan(static_cast<std::size_t>(j) * sz, sz));
    for (unsigned b = 0; b < sz; ++b) h[j * sz + b] = row[b];
  }
  std::vector<FieldElem> out(binomial(d_ + 2, 2));
  std::vector<FieldElem> col(sz);
  for (unsigned b = 0; b < sz; ++b) {
    for (unsigned j = 0; j < sz; ++j) col[j] = h[j * sz + b];
    const auto c = fit_univariate(col);
    for (unsigned a = 0; a < sz; ++a) {
      if (a + b > d_) {
        if (!c[a].is_zero()) return std::nullopt;
      } else {
        out[bivariate_index(a, b)] = c[a];
      }
    }
  }
  return out;
}

std::vector<FieldElem> restrict_parameterized(const PolyEvaluator& eval, const Point& anchor, const Point& dir1,
                                              const Point& dir2) {
  const auto& params = eval.params();
  const PlaneInterpolator interp(params.ctx, params.d);
  const unsigned sz = params.d + 1;
  std::vector<FieldElem> nodes(static_cast<std::size_t>(sz) * sz);
  const PlaneRep plane{anchor, dir1, dir2, {}};
  for (unsigned j = 0; j < sz; ++j) {
    for (unsigned k = 0; k < sz; ++k) nodes[j * sz + k] = eval(plane_point(params.ctx, plane, FieldElem{j}, FieldElem{k}));
  }
  auto fitted = interp.fit(nodes);
  if (!fitted) throw std::logic_error("restriction of a degree-d polynomial failed the degree check");
  return std::move(*fitted);
}

std::vector<FieldElem> restrict_to_plane(const PolyEvaluator& eval, const PlaneRep& plane) {
  if (!is_rank2(eval.params().ctx, plane.dir1, plane.dir2)) throw GeometryError("plane has rank < 2");
  return restrict_parameterized(eval, plane.anchor, plane.dir1, plane.dir2);
}

LowDegreeResult is_low_degree_on_plane(const FieldCtx& ctx, unsigned d, const GridReader& read, LowDegreeMode mode,
                                       std::uint64_t q_s, Rng* rng) {
  const PlaneInterpolator interp(ctx, d);
  const std::uint64_t n = ctx.n();
  const unsigned sz = d + 1;
  std::vector<FieldElem> nodes(static_cast<std::size_t>(sz) * sz);
  for (unsigned j = 0; j < sz; ++j) {
    for (unsigned k = 0; k < sz; ++k) nodes[j * sz + k] = read(j * n + k);
  }
  auto fitted = interp.fit(nodes);
  if (!fitted) return {};
  LowDegreeResult out;
  if (mode == LowDegreeMode::exact) {
    std::vector<FieldElem> u;
    for (std::uint64_t j = 0; j < n; ++j) {
      row_univariate(ctx, d, *fitted, FieldElem{static_cast<std::uint32_t>(j)}, u);
      for (std::uint64_t k = 0; k < n; ++k) {
        if (read(j * n + k) != horner(ctx, u, FieldElem{static_cast<std::uint32_t>(k)})) return {};
      }
    }
  } else {
    if (rng == nullptr) throw std::invalid_argument("sampled low-degree check needs an rng");
    for (std::uint64_t q = 0; q < q_s; ++q) {
      const std::uint64_t idx = rng->below(n * n);
      const FieldElem t{static_cast<std::uint32_t>(idx / n)};
      const FieldElem s{static_cast<std::uint32_t>(idx % n)};
      if (read(idx) != evaluate_bivariate(ctx, d, *fitted, t, s)) return {};
    }
  }
  out.low_degree = true;
  out.coeffs = std::move(*fitted);
  return out;
}

LowDegreeResult is_low_degree_on_plane(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> values,
                                       LowDegreeMode mode, std::uint64_t q_s, Rng* rng) {
  if (values.size() != ctx.n() * ctx.n()) throw std::invalid_argument("plane word must have n^2 symbols");
  return is_low_degree_on_plane(
      ctx, d, [values](std::uint64_t i) { return values[i]; }, mode, q_s, rng);
}

Rational dist_weighted(std::span<const FieldElem> x, std::span<const FieldElem> y, std::span<const std::uint64_t> A) {
  if (x.size() != y.size()) throw std::invalid_argument("dist_A: length mismatch");
  if (A.empty()) throw std::invalid_argument("dist_A: empty index set");
  std::uint64_t in_a = 0;
  for (auto i : A) {
    if (i >= x.size()) throw std::invalid_argument("dist_A: index out of range");
    in_a += x[i] != y[i];
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) total += x[i] != y[i];
  return Rational(in_a, 2 * A.size()) + Rational(total, 2 * x.size());
}

Rational hamming_fraction(std::span<const FieldElem> x, std::span<const FieldElem> y) {
  if (x.size() != y.size()) throw std::invalid_argument("distance: length mismatch");
  if (x.empty()) return Rational(0);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) total += x[i] != y[i];
  return Rational(total, x.size());
}

AugmentedWord AugmentedWord::at_point(std::vector<FieldElem> base, std::uint64_t n, std::uint64_t point_index) {
  if (base.size() != n * n) throw std::invalid_argument("plane word must have n^2 symbols");
  if (point_index >= n * n) throw std::invalid_argument("selected point lies outside the plane");
  AugmentedWord w;
  w.kind_ = AugmentKind::point;
  w.n_ = n;
  w.base_ = std::move(base);
  w.point_ = point_index;
  return w;
}

AugmentedWord AugmentedWord::at_line(std::vector<FieldElem> base, std::uint64_t n,
                                     std::vector<std::uint64_t> line_indices) {
  if (base.size() != n * n) throw std::invalid_argument("plane word must have n^2 symbols");
  if (line_indices.size() != n) throw std::invalid_argument("line must have n points");
  for (auto i : line_indices) {
    if (i >= n * n) throw std::invalid_argument("selected line leaves the plane");
  }
  AugmentedWord w;
  w.kind_ = AugmentKind::line;
  w.n_ = n;
  w.base_ = std::move(base);
  w.line_ = std::move(line_indices);
  return w;
}

AugmentedWord AugmentedWord::at_anchor_line(std::vector<FieldElem> base, std::uint64_t n) {
  std::vector<std::uint64_t> line(n);
  for (std::uint64_t j = 0; j < n; ++j) line[j] = j * n;
  return at_line(std::move(base), n, std::move(line));
}

std::uint64_t AugmentedWord::resolve(std::uint64_t i) const {
  const std::uint64_t nn = n_ * n_;
  if (i < nn) return i;
  if (i >= 2 * nn) throw std::out_of_range("augmented word index out of range");
  if (kind_ == AugmentKind::point) return point_;
  return line_[(i - nn) % n_];
}

std::vector<FieldElem> AugmentedWord::materialize() const {
  std::vector<FieldElem> out(size());
  for (std::uint64_t i = 0; i < size(); ++i) out[i] = (*this)[i];
  return out;
}

AugmentedWord AugmentedWord::with_base(std::vector<FieldElem> base) const {
  if (base.size() != base_.size()) throw std::invalid_argument("plane word must have n^2 symbols");
  AugmentedWord w = *this;
  w.base_ = std::move(base);
  return w;
}

std::vector<std::uint64_t> AugmentedWord::selector() const {
  if (kind_ == AugmentKind::point) return {point_};
  return line_;
}

namespace {

// Calls visit(coeffs, values) for every bivariate polynomial in counter order.
template <class Visit>
void enumerate_bivariate(const FieldCtx& ctx, unsigned d, std::uint64_t budget, Visit&& visit) {
  const std::uint64_t n = ctx.n();
  const std::size_t k2 = binomial(d + 2, 2);
  unsigned __int128 count = 1;
  for (std::size_t i = 0; i < k2; ++i) {
    count *= n;
    if (count > budget) throw RmError("brute-force enumeration exceeds budget");
  }
  std::vector<std::vector<FieldElem>> mono(k2);
  for (std::size_t b = 0; b < k2; ++b) {
    std::vector<FieldElem> unit(k2);
    unit[b] = FieldCtx::one();
    mono[b] = bivariate_grid(ctx, d, unit);
  }
  std::vector<FieldElem> coeffs(k2);
  std::vector<FieldElem> values(n * n);
  while (true) {
    visit(static_cast<const std::vector<FieldElem>&>(coeffs), static_cast<const std::vector<FieldElem>&>(values));
    std::size_t b = 0;
    for (; b < k2; ++b) {
      const FieldElem old = coeffs[b];
      const std::uint64_t next = (old.code + 1) % n;
      coeffs[b] = FieldElem{static_cast<std::uint32_t>(next)};
      const FieldElem delta = ctx.sub(coeffs[b], old);
      for (std::uint64_t i = 0; i < n * n; ++i) values[i] = ctx.add(values[i], ctx.mul(delta, mono[b][i]));
      if (next != 0) break;
    }
    if (b == k2) break;
  }
}

}  // namespace

NearestResult nearest_codeword_bruteforce(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> values,
                                          std::span<const std::uint64_t> A, std::uint64_t budget) {
  const std::uint64_t nn = ctx.n() * ctx.n();
  if (values.size() != nn) throw std::invalid_argument("plane word must have n^2 symbols");
  for (auto i : A) {
    if (i >= nn) throw std::invalid_argument("index set leaves the plane");
  }
  // Compare in the common denominator 2|A|*n^2 (or n^2 for the plain metric).
  NearestResult best;
  std::uint64_t best_score = std::numeric_limits<std::uint64_t>::max();
  enumerate_bivariate(ctx, d, budget, [&](const std::vector<FieldElem>& coeffs, const std::vector<FieldElem>& cw) {
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < nn; ++i) total += cw[i] != values[i];
    std::uint64_t score = total;
    if (!A.empty()) {
      std::uint64_t in_a = 0;
      for (auto i : A) in_a += cw[i] != values[i];
      score = in_a * nn + total * A.size();
    }
    if (score < best_score) {
      best_score = score;
      best.coeffs = coeffs;
    }
  });
  best.distance = A.empty() ? Rational(best_score, nn) : Rational(best_score, 2 * A.size() * nn);
  return best;
}

NearestResult nearest_augmented_bruteforce(const FieldCtx& ctx, unsigned d, const AugmentedWord& word,
                                           std::uint64_t budget) {
  const std::uint64_t nn = ctx.n() * ctx.n();
  if (word.n() != ctx.n()) throw std::invalid_argument("augmented word built over a different field");
  std::vector<std::uint64_t> weight(nn, 1);
  for (std::uint64_t i = nn; i < 2 * nn; ++i) ++weight[word.resolve(i)];
  NearestResult best;
  std::uint64_t best_score = std::numeric_limits<std::uint64_t>::max();
  enumerate_bivariate(ctx, d, budget, [&](const std::vector<FieldElem>& coeffs, const std::vector<FieldElem>& cw) {
    std::uint64_t score = 0;
    for (std::uint64_t i = 0; i < nn; ++i) score += (cw[i] != word.base()[i]) * weight[i];
    if (score < best_score) {
      best_score = score;
      best.coeffs = coeffs;
    }
  });
  best.distance = Rational(best_score, 2 * nn);
  return best;
}

}  // namespace rlcc

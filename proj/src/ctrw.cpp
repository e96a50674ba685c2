#include "rlcc/ctrw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlcc/parallel.hpp"

namespace rlcc {

namespace {

constexpr std::uint64_t kStreamMixing = 0x6d6978;
constexpr std::uint64_t kStreamEvents = 0x657674;
constexpr std::uint64_t kStreamSound = 0x736e64;
constexpr std::uint64_t kStreamLines = 0x6c6e73;

FieldElem plane_grid_value(const RmWord& word, const PlaneRep& plane, std::uint64_t grid) {
  const auto& ctx = word.params().ctx;
  const std::uint64_t n = ctx.n();
  return word.at(plane_point(ctx, plane, ctx.elem(grid / n), ctx.elem(grid % n)));
}

Rational pow_rational(const Rational& base, unsigned e) {
  Rational out = 1;
  for (unsigned i = 0; i < e; ++i) out *= base;
  return out;
}

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < e; ++i) out *= b;
  return out;
}

}  // namespace

WalkTranscript walk_sample(const FieldCtx& ctx, unsigned m, const Point& x, unsigned steps, Rng& rng) {
  if (x.dim != m) throw GeometryError("start point has the wrong dimension");
  WalkTranscript w;
  w.start = x;
  w.resamples.assign(steps + 1, 0);

  const Point h0 = sample_h_direction(ctx, m, rng);
  Point h0p = sample_h_direction(ctx, m, rng);
  while (!is_rank2(ctx, h0, h0p)) {
    ++w.resamples[0];
    h0p = sample_h_direction(ctx, m, rng);
  }
  w.planes.push_back(make_plane(ctx, x, h0, h0p));

  for (unsigned i = 1; i <= steps; ++i) {
    const PlaneRep& prev = w.planes.back();
    const FieldElem s = sample_elem(ctx, rng);
    const FieldElem sp = sample_elem(ctx, rng);
    const Point xi = axpy(ctx, axpy(ctx, prev.anchor, s, prev.dir1), sp, prev.dir2);
    FieldElem t = sample_elem(ctx, rng);
    FieldElem tp = sample_elem(ctx, rng);
    Point hi = axpy(ctx, scale(ctx, t, prev.dir1), tp, prev.dir2);
    while (hi.is_zero()) {
      ++w.resamples[i];
      t = sample_elem(ctx, rng);
      tp = sample_elem(ctx, rng);
      hi = axpy(ctx, scale(ctx, t, prev.dir1), tp, prev.dir2);
    }
    Point hip = sample_h_direction(ctx, m, rng);
    while (!is_rank2(ctx, hi, hip)) {
      ++w.resamples[i];
      hip = sample_h_direction(ctx, m, rng);
    }
    w.s.push_back(s);
    w.s_prime.push_back(sp);
    w.t.push_back(t);
    w.t_prime.push_back(tp);
    w.lines.push_back({xi, hi});
    w.planes.push_back(make_plane(ctx, xi, hi, hip));
  }
  for (auto r : w.resamples) w.resample_count += r;
  return w;
}

Point walk_endpoint(const FieldCtx& ctx, const WalkTranscript& walk, Rng& rng) {
  const FieldElem s = sample_elem(ctx, rng);
  const FieldElem sp = sample_elem(ctx, rng);
  return plane_point(ctx, walk.planes.back(), s, sp);
}

CtrwResult ctrw_check(const RmWord& word, WalkTranscript walk, Rng& rng, LowDegreeMode mode, std::uint64_t q_s) {
  const auto& params = word.params();
  CtrwResult out;
  for (unsigned i = 0; i < walk.planes.size(); ++i) {
    const PlaneRep& plane = walk.planes[i];
    const GridReader read = [&](std::uint64_t g) { return plane_grid_value(word, plane, g); };
    if (!is_low_degree_on_plane(params.ctx, params.d, read, mode, q_s, &rng).low_degree) {
      out.accept = false;
      out.failed_plane = i;
      break;
    }
  }
  out.walk = std::move(walk);
  return out;
}

CtrwResult ctrw_accept(const RmWord& word, const Point& x, unsigned steps, Rng& rng, LowDegreeMode mode,
                       std::uint64_t q_s) {
  const auto& params = word.params();
  auto walk = walk_sample(params.ctx, params.m, x, steps, rng);
  return ctrw_check(word, std::move(walk), rng, mode, q_s);
}

namespace {

const PlantedWord* planted_over(const RmWord& word, const RmPoly& c_star) {
  const auto* planted = dynamic_cast<const PlantedWord*>(&word);
  if (planted == nullptr) return nullptr;
  const auto* base = dynamic_cast<const CodewordWord*>(&planted->base());
  if (base == nullptr || base->evaluator().poly().coeffs != c_star.coeffs) return nullptr;
  return planted;
}

void classify(PredicateDistance& pd, const Rational& alpha) {
  pd.violated = pd.lower >= alpha;
  pd.ambiguous = !pd.violated && pd.upper >= alpha;
}

}  // namespace

RobustVerdict robust_violation_check(const RmWord& word, const RmPoly& c_star, const WalkTranscript& walk,
                                     const Rational& alpha, CertifyMethod method, bool short_circuit,
                                     std::uint64_t budget) {
  const auto& params = word.params();
  const auto& ctx = params.ctx;
  const std::uint64_t n = ctx.n();
  const std::uint64_t n2 = n * n;

  if (method == CertifyMethod::automatic) {
    bool fits = true;
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < params.k2() && fits; ++i) {
      if (total > budget / n) fits = false;
      total *= n;
    }
    method = fits ? CertifyMethod::brute_force : CertifyMethod::planted;
  }
  const PlantedWord* planted = nullptr;
  if (method == CertifyMethod::planted) {
    planted = planted_over(word, c_star);
    if (planted == nullptr) {
      throw std::invalid_argument("distance certification needs brute force within budget or a planted word over c_star");
    }
  }

  std::vector<std::uint64_t> line_sel(n);
  for (std::uint64_t j = 0; j < n; ++j) line_sel[j] = j * n;
  const std::vector<std::uint64_t> point_sel{0};

  RobustVerdict out;
  for (unsigned i = 0; i < walk.planes.size(); ++i) {
    const PlaneRep& plane = walk.planes[i];
    PredicateDistance pd;
    pd.index = i;
    if (method == CertifyMethod::brute_force) {
      const auto values = restrict_word(word, plane);
      const auto nearest =
          nearest_codeword_bruteforce(ctx, params.d, values, i == 0 ? std::span(point_sel) : std::span(line_sel), budget);
      pd.lower = pd.upper = nearest.distance;
      pd.exact = true;
    } else {
      const auto& corr = planted->corruption();
      const PlaneCount count = corr.count_on_plane(plane);
      Rational sel;
      if (i == 0) {
        sel = Rational(corr.corrupted(plane.anchor) ? 1 : 0, 2);
      } else {
        sel = Rational(static_cast<long long>(count.line), static_cast<long long>(2 * n));
      }
      const Rational mu(static_cast<long long>(count.plane), static_cast<long long>(n2));
      pd.upper = sel + mu / 2;
      pd.lower = std::min(pd.upper, Rational((params.rho - mu) / 2));
      pd.exact = pd.lower == pd.upper;
    }
    classify(pd, alpha);
    out.distances.push_back(pd);
    if (pd.violated && !out.violated) {
      out.violated = true;
      out.witness = i;
      if (short_circuit) break;
    }
  }
  if (!out.violated) {
    out.ambiguous = std::any_of(out.distances.begin(), out.distances.end(),
                                [](const PredicateDistance& d) { return d.ambiguous; });
  }
  return out;
}

ProportionReport make_upper_report(std::uint64_t hits, std::uint64_t trials, double bound) {
  ProportionReport r;
  r.hits = hits;
  r.trials = trials;
  r.estimate = proportion(hits, trials);
  r.se = standard_error(hits, trials);
  r.wilson = wilson_interval(hits, trials);
  r.bound = bound;
  r.pass = at_most_with_slack(hits, trials, bound);
  return r;
}

ProportionReport make_lower_report(std::uint64_t hits, std::uint64_t trials, double bound) {
  ProportionReport r = make_upper_report(hits, trials, bound);
  r.pass = at_least_with_slack(hits, trials, bound);
  return r;
}

void ResampleStats::merge(const WalkTranscript& walk) {
  if (events.size() < walk.resamples.size()) {
    events.resize(walk.resamples.size(), 0);
    trials_hit.resize(walk.resamples.size(), 0);
  }
  for (std::size_t i = 0; i < walk.resamples.size(); ++i) {
    events[i] += walk.resamples[i];
    trials_hit[i] += walk.resamples[i] > 0;
  }
  ++trials;
}

void ResampleStats::finish(const FieldCtx& ctx, unsigned m) {
  p0_exact = Rational(ctx.p() - 1, static_cast<long long>(ipow(ctx.p(), m) - 1));
  per_step_bound = 3.0 / static_cast<double>(ctx.n());
  pass = true;
  for (std::size_t i = 1; i < trials_hit.size(); ++i) {
    pass = pass && at_most_with_slack(trials_hit[i], trials, per_step_bound);
  }
}

Rational endpoint_bound(const Rational& delta, std::uint32_t p) { return delta + Rational(2, p); }

Rational sigma_rw(std::uint64_t n, std::uint32_t p, unsigned m, const Rational& rho, const Rational& delta,
                  const Rational& alpha) {
  const Rational walk = pow_rational(Rational(1) - Rational(4, static_cast<long long>(n)), m);
  return walk - endpoint_bound(delta, p) / (rho - 2 * alpha);
}

MixingReport mixing_exp(const RmParams& params, const PointCorruption& corruption, const Rational& delta,
                        unsigned steps, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  const auto& ctx = params.ctx;
  std::vector<std::uint8_t> hit(trials, 0);
  std::vector<WalkTranscript> walks(trials);
  parallel_for(trials, threads, [&](std::uint64_t i) {
    Rng rng(derive_seed(seed, i, kStreamMixing));
    const Point x = sample_point(ctx, params.m, rng);
    auto walk = walk_sample(ctx, params.m, x, steps, rng);
    const Point z = walk_endpoint(ctx, walk, rng);
    hit[i] = z == x || corruption.corrupted(z);
    walk.planes.clear();
    walk.lines.clear();
    walks[i] = std::move(walk);
  });
  MixingReport out;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    hits += hit[i];
    out.resamples.merge(walks[i]);
  }
  out.resamples.finish(ctx, params.m);
  out.bound_exact = endpoint_bound(delta, ctx.p());
  out.hit = make_upper_report(hits, trials, to_double(out.bound_exact));
  return out;
}

namespace {

unsigned rank_mod_p(std::vector<std::uint32_t> a, unsigned m, std::uint32_t p) {
  unsigned rank = 0;
  for (unsigned col = 0; col < m && rank < m; ++col) {
    unsigned piv = rank;
    while (piv < m && a[piv * m + col] == 0) ++piv;
    if (piv == m) continue;
    for (unsigned c = 0; c < m; ++c) std::swap(a[piv * m + c], a[rank * m + c]);
    std::uint32_t inv = 1;
    while (inv * static_cast<std::uint64_t>(a[rank * m + col]) % p != 1) ++inv;
    for (unsigned c = 0; c < m; ++c) a[rank * m + c] = static_cast<std::uint32_t>(std::uint64_t{a[rank * m + c]} * inv % p);
    for (unsigned r = 0; r < m; ++r) {
      if (r == rank || a[r * m + col] == 0) continue;
      const std::uint64_t f = a[r * m + col];
      for (unsigned c = 0; c < m; ++c) {
        a[r * m + c] = static_cast<std::uint32_t>((a[r * m + c] + (p - f) * a[rank * m + c]) % p);
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<std::uint32_t> digits_of(std::uint64_t code, unsigned count, std::uint32_t p) {
  std::vector<std::uint32_t> out(count);
  for (unsigned i = 0; i < count; ++i) {
    out[i] = static_cast<std::uint32_t>(code % p);
    code /= p;
  }
  return out;
}

// Product H*T through the field: sum_i t_i * h_i with h_i the i-th column
// of H and t_i the field element whose coefficients are row i of T. The
// integer product is computed as a cross-check.
std::uint64_t product_cell(const FieldCtx& ctx, unsigned m, const std::vector<std::uint32_t>& H,
                           const std::vector<std::uint32_t>& T) {
  const std::uint32_t p = ctx.p();
  Point y = Point::zero(m);
  for (unsigned i = 0; i < m; ++i) {
    const FieldElem ti = ctx.from_coeffs(std::span(T).subspan(i * m, m));
    Point hi = Point::zero(m);
    for (unsigned k = 0; k < m; ++k) hi[k] = ctx.embed_h(H[k * m + i]);
    y = axpy(ctx, y, ti, hi);
  }
  const HMatrix rep = matrix_rep(ctx, y.coords());
  std::uint64_t cell = 0;
  for (unsigned r = m; r-- > 0;) {
    for (unsigned c = m; c-- > 0;) {
      std::uint64_t v = 0;
      for (unsigned k = 0; k < m; ++k) v += std::uint64_t{H[r * m + k]} * T[k * m + c];
      if (v % p != rep.at(r, c)) throw std::logic_error("matrix representation disagrees with H*T");
      cell = cell * p + rep.at(r, c);
    }
  }
  return cell;
}

}  // namespace

MatrixReport matrix_product_check(std::uint32_t p, unsigned m, SampleMode mode, std::uint64_t samples,
                                  std::uint64_t seed, std::uint64_t budget) {
  const FieldCtx ctx = FieldCtx::make(p, m);
  MatrixReport out;
  out.p = p;
  out.m = m;
  out.mode = mode;
  const unsigned mm = m * m;
  const std::uint64_t matrices = ipow(p, mm);
  out.cells = matrices;

  Rational prod = 1;
  out.series_sum = 0;
  Rational pi = 1;
  for (unsigned i = 1; i <= m; ++i) {
    pi /= p;
    prod *= Rational(1) - pi;
    out.series_sum += pi;
  }
  out.singular_exact = Rational(1) - prod;
  out.bound = Rational(2, p);

  std::vector<std::uint64_t> hits(matrices, 0);
  if (mode == SampleMode::exhaustive) {
    if (matrices > budget / matrices) throw std::invalid_argument("exhaustive matrix enumeration exceeds budget");
    for (std::uint64_t hc = 0; hc < matrices; ++hc) {
      const auto H = digits_of(hc, mm, p);
      const bool invertible = rank_mod_p(H, m, p) == m;
      for (std::uint64_t tc = 0; tc < matrices; ++tc) {
        ++out.pairs;
        if (!invertible) {
          ++out.singular;
          continue;
        }
        ++hits[product_cell(ctx, m, H, digits_of(tc, mm, p))];
      }
    }
  } else {
    Rng rng(seed);
    for (std::uint64_t i = 0; i < samples; ++i) {
      const auto H = digits_of(rng.below(matrices), mm, p);
      const auto T = digits_of(rng.below(matrices), mm, p);
      ++out.pairs;
      if (rank_mod_p(H, m, p) != m) {
        ++out.singular;
        continue;
      }
      ++hits[product_cell(ctx, m, H, T)];
    }
  }
  const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end());
  out.product_min_hits = *lo;
  out.product_max_hits = *hi;
  out.uniform_exact = *lo == *hi;
  out.chi2 = chi_square_uniform(hits);

  const bool chain = out.series_sum <= out.bound;
  if (mode == SampleMode::exhaustive) {
    const Rational frac(static_cast<long long>(out.singular), static_cast<long long>(out.pairs));
    out.pass = out.uniform_exact && frac == out.singular_exact && frac <= out.series_sum && chain;
  } else {
    out.pass = out.chi2.p_value > 1e-3 && at_most_with_slack(out.singular, out.pairs, to_double(out.series_sum)) && chain;
  }
  return out;
}

LineSamplingReport line_sampling_exp(const FieldCtx& ctx, const std::vector<bool>& set,
                                     const std::vector<Rational>& epsilons, std::optional<SampleMode> mode,
                                     std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t n = ctx.n();
  const std::uint64_t n2 = n * n;
  if (set.size() != n2) throw std::invalid_argument("set must flag every point of F^2");
  LineSamplingReport out;
  out.mode = mode.value_or(n <= 16 ? SampleMode::exhaustive : SampleMode::sampled);
  const auto size = static_cast<std::uint64_t>(std::count(set.begin(), set.end(), true));
  out.mu = Rational(static_cast<long long>(size), static_cast<long long>(n2));

  // |c/n - |S|/n^2| > eps  <=>  |c*n - |S|| * den > num * n^2
  auto line_count = [&](const Point& x, const Point& y) {
    std::uint64_t c = 0;
    for (std::uint64_t t = 0; t < n; ++t) c += set[point_code(ctx, axpy(ctx, x, ctx.elem(t), y))];
    return c;
  };
  std::vector<std::uint64_t> counts;  // histogram of c over the examined pairs
  counts.assign(n + 1, 0);
  std::uint64_t total = 0;
  if (out.mode == SampleMode::exhaustive) {
    for (std::uint64_t xc = 0; xc < n2; ++xc) {
      const Point x = point_from_code(ctx, 2, xc);
      for (std::uint64_t yc = 0; yc < n2; ++yc) {
        ++counts[line_count(x, point_from_code(ctx, 2, yc))];
        ++total;
      }
    }
  } else {
    Rng rng(derive_seed(seed, 0, kStreamLines));
    for (std::uint64_t i = 0; i < samples; ++i) {
      const Point x = sample_point(ctx, 2, rng);
      const Point y = sample_point(ctx, 2, rng);
      ++counts[line_count(x, y)];
      ++total;
    }
  }

  out.pass = true;
  for (const Rational& eps : epsilons) {
    if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
    LineSamplingRow row;
    row.epsilon = eps;
    row.total = total;
    const BigInt num = boost::multiprecision::numerator(eps);
    const BigInt den = boost::multiprecision::denominator(eps);
    for (std::uint64_t c = 0; c <= n; ++c) {
      const long long diff = static_cast<long long>(c * n) - static_cast<long long>(size);
      if (BigInt(std::llabs(diff)) * den > num * BigInt(n2)) row.deviations += counts[c];
    }
    row.tail = total == 0 ? Rational(0) : Rational(BigInt(row.deviations), BigInt(total));
    row.bound = out.mu / (Rational(static_cast<long long>(n)) * eps * eps);
    row.se = standard_error(row.deviations, total);
    if (out.mode == SampleMode::exhaustive) {
      row.pass = row.tail <= row.bound;
    } else {
      row.pass = at_most_with_slack(row.deviations, total, to_double(row.bound));
    }
    out.pass = out.pass && row.pass;
    out.rows.push_back(row);
  }
  return out;
}

EventsReport events_exp(const RmParams& params, const PointCorruption& corruption, const Rational& alpha,
                        unsigned steps, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  const auto& ctx = params.ctx;
  const std::uint64_t n = ctx.n();
  const Rational plane_thr = (params.rho - 2 * alpha) * Rational(static_cast<long long>(n * n));
  const Rational line_thr = 2 * alpha * Rational(static_cast<long long>(n));

  // Per trial: bit 0 = F_0; then per step i bits for line_ok and plane_ok.
  std::vector<std::vector<std::uint8_t>> flags(trials);
  parallel_for(trials, threads, [&](std::uint64_t k) {
    Rng rng(derive_seed(seed, k, kStreamEvents));
    const Point x = sample_point(ctx, params.m, rng);
    const auto walk = walk_sample(ctx, params.m, x, steps, rng);
    auto& f = flags[k];
    f.resize(steps + 1);
    for (unsigned i = 0; i <= steps; ++i) {
      const PlaneCount c = corruption.count_on_plane(walk.planes[i]);
      const bool line_ok = Rational(static_cast<long long>(c.line)) >= line_thr;
      const bool plane_ok = Rational(static_cast<long long>(c.plane)) >= plane_thr;
      f[i] = static_cast<std::uint8_t>(line_ok | (plane_ok << 1));
    }
  });

  EventsReport out;
  out.trials = trials;
  out.all_f.assign(steps + 1, 0);
  out.eps_hits.assign(steps + 1, 0);
  out.line_fail.assign(steps + 1, 0);
  out.line_den.assign(steps + 1, 0);
  for (const auto& f : flags) {
    if (!(f[0] & 2)) continue;
    ++out.f0_trials;
    bool prefix = true;
    for (unsigned i = 1; i <= steps; ++i) {
      const bool line_ok = f[i] & 1;
      const bool plane_ok = f[i] & 2;
      if (prefix) {
        ++out.line_den[i];
        out.line_fail[i] += !line_ok;
        out.eps_hits[i] += line_ok && !plane_ok;
      }
      prefix = prefix && line_ok && plane_ok;
      out.all_f[i] += prefix;
    }
  }
  const double base = std::pow(1.0 - 4.0 / static_cast<double>(n), static_cast<double>(steps));
  double eps_sum = 0.0;
  out.epsilon.assign(steps + 1, 0.0);
  for (unsigned i = 1; i <= steps; ++i) {
    out.epsilon[i] = proportion(out.eps_hits[i], out.f0_trials);
    eps_sum += out.epsilon[i];
  }
  out.lhs = steps == 0 ? 1.0 : proportion(out.all_f[steps], out.f0_trials);
  out.lhs_se = steps == 0 ? 0.0 : standard_error(out.all_f[steps], out.f0_trials);
  out.rhs = base - eps_sum;
  out.peel_pass = out.f0_trials > 0 && (steps == 0 || at_least_with_slack(out.all_f[steps], out.f0_trials, out.rhs));
  out.line_pass = out.f0_trials > 0;
  for (unsigned i = 1; i <= steps; ++i) {
    if (out.line_den[i] == 0) continue;
    out.line_pass = out.line_pass && at_most_with_slack(out.line_fail[i], out.line_den[i], 4.0 / static_cast<double>(n));
  }
  return out;
}

SoundnessReport soundness_exp(const RmParams& params, const RmPoly& c_star, const Rational& delta,
                              std::uint64_t noise_seed, const Rational& alpha, unsigned steps,
                              std::uint64_t trials, std::uint64_t seed, unsigned threads, CertifyMethod method) {
  const auto& ctx = params.ctx;
  auto base = std::make_shared<const CodewordWord>(params, c_star);
  PointCorruption noise(ctx, params.m);
  noise.set_noise(delta, noise_seed);

  struct Trial {
    bool violated = false;
    bool ambiguous = false;
    unsigned witness = 0;
    std::vector<std::uint32_t> resamples;
  };
  std::vector<Trial> results(trials);
  parallel_for(trials, threads, [&](std::uint64_t k) {
    Rng rng(derive_seed(seed, k, kStreamSound));
    const Point x = sample_point(ctx, params.m, rng);
    PointCorruption corr = noise;
    corr.add_targeted(x);
    const PlantedWord word(base, std::move(corr));
    const auto walk = walk_sample(ctx, params.m, x, steps, rng);
    const auto verdict = robust_violation_check(word, c_star, walk, alpha, method, true);
    results[k] = {verdict.violated, verdict.ambiguous, verdict.witness.value_or(0), walk.resamples};
  });

  SoundnessReport out;
  out.trials = trials;
  out.witness.assign(steps + 1, 0);
  for (const auto& r : results) {
    if (r.violated) {
      ++out.violated;
      ++out.witness[r.witness];
    }
    out.ambiguous += r.ambiguous;
    WalkTranscript w;
    w.resamples = r.resamples;
    out.resamples.merge(w);
  }
  out.resamples.finish(ctx, params.m);
  out.sigma = sigma_rw(ctx.n(), ctx.p(), params.m, params.rho, delta, alpha);
  out.freq = make_lower_report(out.violated, trials, to_double(out.sigma));
  return out;
}

}  // namespace rlcc

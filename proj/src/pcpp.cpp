#include "rlcc/pcpp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rlcc/parallel.hpp"
#include "rlcc/stats.hpp"

namespace rlcc {

PcppParams PcppParams::make(unsigned d, unsigned q_v, unsigned R, const Rational& rho_prox) {
  if (q_v < 1) throw PcppError("q_v must be at least 1");
  if (R < 3 || R % 2 == 0) throw PcppError("R must be odd and at least 3");
  if (rho_prox <= 0 || rho_prox >= 1) throw PcppError("rho_prox must lie in (0, 1)");
  PcppParams p;
  p.d = d;
  p.k2 = binomial(d + 2, 2);
  p.q_v = q_v;
  p.R = R;
  p.rho_prox = rho_prox;
  return p;
}

std::uint64_t AugmentedView::resolve(std::uint64_t i) const {
  const std::uint64_t nn = n * n;
  if (i < nn) return i;
  if (i >= 2 * nn) throw std::out_of_range("augmented word index out of range");
  if (kind == AugmentKind::point) return point_index;
  return line[(i - nn) % n];
}

AugmentedView AugmentedView::of(const AugmentedWord& word) {
  AugmentedView v;
  v.kind = word.kind();
  v.n = word.n();
  const auto sel = word.selector();
  if (v.kind == AugmentKind::point) {
    v.point_index = sel.front();
  } else {
    v.line = sel;
  }
  v.base = [base = word.base()](std::uint64_t i) { return base[i]; };
  return v;
}

AugmentedView AugmentedView::anchored(AugmentKind kind, std::uint64_t n, SymbolReader base) {
  AugmentedView v;
  v.kind = kind;
  v.n = n;
  if (kind == AugmentKind::line) {
    v.line.resize(n);
    for (std::uint64_t j = 0; j < n; ++j) v.line[j] = anchor_line_base_index(n, j);
  }
  v.base = std::move(base);
  return v;
}

CanonicalProof proof_from_coeffs(const PcppParams& params, std::span<const FieldElem> coeffs) {
  if (coeffs.size() != params.k2) throw PcppError("coefficient vector has the wrong length");
  CanonicalProof proof;
  proof.symbols.reserve(params.L());
  for (unsigned r = 0; r < params.R; ++r) proof.symbols.insert(proof.symbols.end(), coeffs.begin(), coeffs.end());
  return proof;
}

CanonicalProof canonical_proof(const FieldCtx& ctx, const PcppParams& params, const AugmentedWord& member) {
  if (member.n() != ctx.n()) throw PcppError("augmented word does not match the field");
  const auto fit = is_low_degree_on_plane(ctx, params.d, member.base());
  if (!fit.low_degree) throw PcppError("word is not in the augmented language");
  return proof_from_coeffs(params, fit.coeffs);
}

namespace {

FieldElem eval_at_grid(const FieldCtx& ctx, unsigned d, std::span<const FieldElem> coeffs, std::uint64_t g) {
  const std::uint64_t n = ctx.n();
  return evaluate_bivariate(ctx, d, coeffs, ctx.elem(g / n), ctx.elem(g % n));
}

}  // namespace

VerifyResult verify_proximity(const FieldCtx& ctx, const PcppParams& params, const AugmentedView& word,
                              const SymbolReader& proof, Rng& rng) {
  const std::uint64_t n = word.n;
  const std::uint64_t nn = n * n;
  const std::uint64_t k2 = params.k2;
  VerifyResult out;
  std::vector<FieldElem> copy(k2);
  auto fail = [&](unsigned round, char check) {
    out.accept = false;
    out.failed_round = round;
    out.failed_check = check;
    return out;
  };
  for (unsigned round = 0; round < params.q_v; ++round) {
    const std::uint64_t pos = rng.below(k2);
    const std::uint64_t a = rng.below(params.R);
    std::uint64_t b = rng.below(params.R - 1);
    if (b >= a) ++b;
    out.proof_queries += 2;
    if (proof(a * k2 + pos) != proof(b * k2 + pos)) return fail(round, 'a');

    const std::uint64_t q = rng.below(params.R);
    for (std::uint64_t c = 0; c < k2; ++c) copy[c] = proof(q * k2 + c);
    out.proof_queries += k2;
    const std::uint64_t g = rng.below(nn);
    ++out.word_queries;
    if (word[g] != eval_at_grid(ctx, params.d, copy, g)) return fail(round, 'b');

    const std::uint64_t tail = nn + rng.below(nn);
    ++out.word_queries;
    if (word[tail] != eval_at_grid(ctx, params.d, copy, word.resolve(tail))) return fail(round, 'c');
  }
  return out;
}

SymbolCorrection correct_proof_symbol(const FieldCtx& ctx, const PcppParams& params, const AugmentedView& word,
                                      const SymbolReader& proof, std::uint64_t offset, Rng& rng) {
  if (offset >= params.L()) throw std::out_of_range("proof offset out of range");
  const std::uint64_t k2 = params.k2;
  const std::uint64_t pos = offset % k2;
  const std::uint64_t own = offset / k2;
  std::map<std::uint32_t, unsigned> votes;
  SymbolCorrection out;
  for (std::uint64_t c = 0; c < params.R; ++c) {
    if (c == own) continue;
    ++votes[proof(c * k2 + pos).code];
    ++out.queries;
  }
  const auto best = std::max_element(votes.begin(), votes.end(),
                                     [](const auto& x, const auto& y) { return x.second < y.second; });
  out.strict_majority = 2 * best->second > params.R - 1;
  out.verify = verify_proximity(ctx, params, word, proof, rng);
  out.queries += out.verify.word_queries + out.verify.proof_queries;
  if (out.strict_majority && out.verify.accept) out.symbol = FieldElem{best->first};
  return out;
}

namespace {

enum class Pattern { point, line, rows, columns };

struct Family {
  const char* name;
  Pattern pattern;
  AugmentKind kind;
};

constexpr Family kFamilies[] = {
    {"point-flip", Pattern::point, AugmentKind::point}, {"line-flip", Pattern::line, AugmentKind::line},
    {"rows", Pattern::rows, AugmentKind::point},        {"rows", Pattern::rows, AugmentKind::line},
    {"columns", Pattern::columns, AugmentKind::point},  {"columns", Pattern::columns, AugmentKind::line},
};

constexpr std::uint64_t kHonestStream = 0x686f6e;
constexpr std::uint64_t kCertifiedExact = 32;

// A random bivariate polynomial with a structured corrupted set; the
// verifier's acceptance depends only on the corrupted fractions of the
// plane and of the selected point or line.
struct FarInstance {
  FieldCtx ctx;
  unsigned d = 0;
  std::vector<FieldElem> coeffs;
  Pattern pattern = Pattern::point;
  AugmentKind kind = AugmentKind::point;
  std::uint64_t point_index = 0;
  std::vector<bool> bad;  // rows or columns
  std::uint64_t key = 0;

  bool corrupted(std::uint64_t g) const {
    const std::uint64_t n = ctx.n();
    switch (pattern) {
      case Pattern::point: return g == point_index;
      case Pattern::line: return g % n == 0;
      case Pattern::rows: return bad[g / n];
      case Pattern::columns: return bad[g % n];
    }
    return false;
  }

  FieldElem value(std::uint64_t g) const {
    const FieldElem orig = eval_at_grid(ctx, d, coeffs, g);
    if (!corrupted(g)) return orig;
    const std::uint64_t n = ctx.n();
    const std::uint64_t shift = 1 + splitmix64(key ^ g) % (n - 1);
    return ctx.elem((orig.code + shift) % n);
  }
};

FarInstance make_instance(const FieldCtx& ctx, unsigned d, const Family& fam, const Rational& rho_prox, Rng& rng) {
  const std::uint64_t n = ctx.n();
  FarInstance inst;
  inst.ctx = ctx;
  inst.d = d;
  inst.pattern = fam.pattern;
  inst.kind = fam.kind;
  inst.coeffs.resize(binomial(d + 2, 2));
  for (auto& c : inst.coeffs) c = sample_elem(ctx, rng);
  inst.key = rng.next();
  inst.point_index = rng.below(n * n);
  if (fam.pattern == Pattern::rows || fam.pattern == Pattern::columns) {
    // K = ceil(2 rho_prox n) rows, or columns other than column 0.
    const Rational target = 2 * rho_prox * Rational(static_cast<long long>(n));
    BigInt k = boost::multiprecision::numerator(target) / boost::multiprecision::denominator(target);
    if (Rational(k) < target) ++k;
    const auto K = k.convert_to<std::uint64_t>();
    const std::uint64_t avail = fam.pattern == Pattern::rows ? n : n - 1;
    if (K > avail) throw PcppError("rho_prox too large for the structured far families");
    std::vector<std::uint64_t> pool(avail);
    for (std::uint64_t i = 0; i < avail; ++i) pool[i] = fam.pattern == Pattern::rows ? i : i + 1;
    for (std::uint64_t i = 0; i < K; ++i) std::swap(pool[i], pool[i + rng.below(avail - i)]);
    inst.bad.assign(n, false);
    for (std::uint64_t i = 0; i < K; ++i) inst.bad[pool[i]] = true;
    if (fam.pattern == Pattern::columns) inst.point_index = rng.below(n) * n;
  }
  return inst;
}

AugmentedView view_of(const FarInstance& inst) {
  auto view = AugmentedView::anchored(inst.kind, inst.ctx.n(), [&inst](std::uint64_t g) { return inst.value(g); });
  view.point_index = inst.kind == AugmentKind::point ? inst.point_index : 0;
  return view;
}

// Planted lower bound min(UB, (rho - mu)/2) on dist_A, UB = dist_A to Q.
Rational planted_lower_bound(const FarInstance& inst) {
  const std::uint64_t n = inst.ctx.n();
  std::uint64_t plane = 0;
  switch (inst.pattern) {
    case Pattern::point: plane = 1; break;
    case Pattern::line: plane = n; break;
    case Pattern::rows:
    case Pattern::columns:
      plane = static_cast<std::uint64_t>(std::count(inst.bad.begin(), inst.bad.end(), true)) * n;
      break;
  }
  Rational sel;
  if (inst.kind == AugmentKind::point) {
    sel = Rational(inst.corrupted(inst.point_index) ? 1 : 0, 2);
  } else {
    std::uint64_t bad = 0;
    for (std::uint64_t j = 0; j < n; ++j) bad += inst.corrupted(j * n);
    sel = Rational(static_cast<long long>(bad), static_cast<long long>(2 * n));
  }
  const Rational mu(static_cast<long long>(plane), static_cast<long long>(n * n));
  const Rational upper = sel + mu / 2;
  const Rational rho = Rational(1) - Rational(inst.d, static_cast<long long>(n));
  return std::min(upper, Rational((rho - mu) / 2));
}

bool brute_force_fits(const FieldCtx& ctx, unsigned d) {
  unsigned __int128 total = 1;
  for (std::uint64_t i = 0; i < binomial(d + 2, 2); ++i) {
    total *= ctx.n();
    if (total > kBruteForceBudget) return false;
  }
  return true;
}

Rational certified_distance(const FarInstance& inst, bool exact) {
  if (!exact) return planted_lower_bound(inst);
  const std::uint64_t n = inst.ctx.n();
  std::vector<FieldElem> values(n * n);
  for (std::uint64_t g = 0; g < n * n; ++g) values[g] = inst.value(g);
  std::vector<std::uint64_t> sel;
  if (inst.kind == AugmentKind::point) {
    sel.push_back(inst.point_index);
  } else {
    for (std::uint64_t j = 0; j < n; ++j) sel.push_back(j * n);
  }
  return nearest_codeword_bruteforce(inst.ctx, inst.d, values, sel).distance;
}

}  // namespace

CalibrationStep pcpp_far_acceptance(const FieldCtx& ctx, const PcppParams& params, std::uint64_t trials,
                                    std::uint64_t seed, unsigned threads) {
  CalibrationStep step;
  step.q_v = params.q_v;
  step.meets_target = true;
  const bool brute = brute_force_fits(ctx, params.d);
  for (std::size_t f = 0; f < std::size(kFamilies); ++f) {
    const Family& fam = kFamilies[f];
    std::vector<std::uint8_t> accepted(trials, 0);
    std::vector<Rational> dist(trials);
    parallel_for(trials, threads, [&](std::uint64_t t) {
      Rng rng(derive_seed(seed, t, f + 1));
      const FarInstance inst = make_instance(ctx, params.d, fam, params.rho_prox, rng);
      dist[t] = certified_distance(inst, brute && t < kCertifiedExact);
      if (dist[t] < params.rho_prox) throw std::logic_error("planted instance is not rho_prox-far");
      const auto proof = proof_from_coeffs(params, inst.coeffs);
      const SymbolReader read = [&proof](std::uint64_t i) { return proof.symbols[i]; };
      accepted[t] = verify_proximity(ctx, params, view_of(inst), read, rng).accept;
    });
    FamilyAcceptance fa;
    fa.name = fam.name;
    fa.kind = fam.kind;
    fa.trials = trials;
    for (auto a : accepted) fa.accepted += a;
    fa.min_distance = trials ? *std::min_element(dist.begin(), dist.end()) : Rational(0);
    const double est = proportion(fa.accepted, trials);
    step.max_acceptance = std::max(step.max_acceptance, est);
    step.meets_target = step.meets_target && est + kSlackSigmas * standard_error(fa.accepted, trials) <= 0.5;
    step.families.push_back(fa);
  }
  return step;
}

CalibrationResult calibrate_pcpp(const FieldCtx& ctx, unsigned d, unsigned R, const Rational& rho_prox,
                                 std::uint64_t trials, std::uint64_t seed, unsigned q_cap, unsigned threads) {
  CalibrationResult out;
  out.field = ctx.descriptor();
  out.d = d;
  out.R = R;
  out.rho_prox = rho_prox;
  out.trials = trials;
  out.seed = seed;
  out.key_hash = calibration_key(ctx, d, R, rho_prox, trials, seed);
  for (unsigned q = 1; q <= q_cap; ++q) {
    const auto params = PcppParams::make(d, q, R, rho_prox);
    out.steps.push_back(pcpp_far_acceptance(ctx, params, trials, seed, threads));
    if (!out.steps.back().meets_target) continue;
    out.q_v = q;
    out.sigma_pcpp = out.steps.back().max_acceptance;
    std::vector<std::uint8_t> ok(trials, 0);
    parallel_for(trials, threads, [&](std::uint64_t t) {
      Rng rng(derive_seed(seed, t, kHonestStream));
      std::vector<FieldElem> coeffs(params.k2);
      for (auto& c : coeffs) c = sample_elem(ctx, rng);
      const auto proof = proof_from_coeffs(params, coeffs);
      const auto kind = t % 2 ? AugmentKind::line : AugmentKind::point;
      const auto view = AugmentedView::anchored(
          kind, ctx.n(), [&](std::uint64_t g) { return eval_at_grid(ctx, d, coeffs, g); });
      ok[t] = verify_proximity(ctx, params, view, [&proof](std::uint64_t i) { return proof.symbols[i]; }, rng).accept;
    });
    out.honest_trials = trials;
    for (auto v : ok) out.honest_accepted += v;
    break;
  }
  return out;
}

std::uint64_t calibration_key(const FieldCtx& ctx, unsigned d, unsigned R, const Rational& rho_prox,
                              std::uint64_t trials, std::uint64_t seed) {
  std::ostringstream os;
  os << ctx.descriptor() << '|' << d << '|' << R << '|' << to_fraction(rho_prox) << '|' << trials << '|' << seed;
  std::uint64_t h = 0x7263616c;
  for (unsigned char c : os.str()) h = splitmix64(h ^ c);
  return h;
}

namespace {

const char* kind_name(AugmentKind k) { return k == AugmentKind::point ? "point" : "line"; }

}  // namespace

std::string calibration_to_json(const CalibrationResult& r) {
  using nlohmann::json;
  json j;
  j["field"] = r.field;
  j["d"] = r.d;
  j["R"] = r.R;
  j["rho_prox"] = to_fraction(r.rho_prox);
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["key"] = r.key_hash;
  j["q_v"] = r.q_v ? json(*r.q_v) : json(nullptr);
  j["sigma_pcpp"] = r.sigma_pcpp;
  j["honest_accepted"] = r.honest_accepted;
  j["honest_trials"] = r.honest_trials;
  json steps = json::array();
  for (const auto& s : r.steps) {
    json js;
    js["q_v"] = s.q_v;
    js["max_acceptance"] = s.max_acceptance;
    js["meets_target"] = s.meets_target;
    json fams = json::array();
    for (const auto& f : s.families) {
      fams.push_back({{"name", f.name},
                      {"kind", kind_name(f.kind)},
                      {"accepted", f.accepted},
                      {"trials", f.trials},
                      {"min_distance", to_fraction(f.min_distance)}});
    }
    js["families"] = fams;
    steps.push_back(js);
  }
  j["steps"] = steps;
  return j.dump(2);
}

CalibrationResult calibration_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CalibrationResult r;
  r.field = j.at("field").get<std::string>();
  r.d = j.at("d").get<unsigned>();
  r.R = j.at("R").get<unsigned>();
  r.rho_prox = parse_rational(j.at("rho_prox").get<std::string>());
  r.trials = j.at("trials").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.key_hash = j.at("key").get<std::uint64_t>();
  if (!j.at("q_v").is_null()) r.q_v = j.at("q_v").get<unsigned>();
  r.sigma_pcpp = j.at("sigma_pcpp").get<double>();
  r.honest_accepted = j.at("honest_accepted").get<std::uint64_t>();
  r.honest_trials = j.at("honest_trials").get<std::uint64_t>();
  for (const auto& js : j.at("steps")) {
    CalibrationStep s;
    s.q_v = js.at("q_v").get<unsigned>();
    s.max_acceptance = js.at("max_acceptance").get<double>();
    s.meets_target = js.at("meets_target").get<bool>();
    for (const auto& f : js.at("families")) {
      FamilyAcceptance fa;
      fa.name = f.at("name").get<std::string>();
      fa.kind = f.at("kind").get<std::string>() == "point" ? AugmentKind::point : AugmentKind::line;
      fa.accepted = f.at("accepted").get<std::uint64_t>();
      fa.trials = f.at("trials").get<std::uint64_t>();
      fa.min_distance = parse_rational(f.at("min_distance").get<std::string>());
      s.families.push_back(fa);
    }
    r.steps.push_back(s);
  }
  return r;
}

std::optional<CalibrationResult> load_calibration(const std::string& path, std::uint64_t key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    auto r = calibration_from_json(buf.str());
    if (r.key_hash != key) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void save_calibration(const std::string& path, const CalibrationResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration sidecar: " + path);
  out << calibration_to_json(result) << '\n';
}

}  // namespace rlcc

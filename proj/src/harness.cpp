#include "rlcc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "rlcc/parallel.hpp"
#include "rlcc/stats.hpp"

#ifndef RLCC_VERSION
#define RLCC_VERSION "0.0.0"
#endif

namespace rlcc {

using nlohmann::json;

const char* version() { return RLCC_VERSION; }

namespace {

constexpr std::uint64_t kPolyStream = 0x706f6c79;
constexpr std::uint64_t kNoiseStream = 0x6e7365;
constexpr std::uint64_t kTrialStream = 0x74726c;
constexpr std::uint64_t kSetStream = 0x736574;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto out = std::stoull(v, &used);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
}

unsigned parse_uint(const std::string& key, const std::string& v) {
  const auto out = parse_u64(key, v);
  if (out > 1'000'000'000ull) throw ConfigError(key + ": value too large");
  return static_cast<unsigned>(out);
}

Rational parse_rat(const std::string& key, const std::string& v) {
  try {
    return parse_rational(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a rational such as 1/10 or 0.1, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string elem_text(const std::optional<FieldElem>& e) { return e ? std::to_string(e->code) : "!"; }

json proportion_json(const ProportionReport& r) {
  return {{"hits", r.hits},
          {"trials", r.trials},
          {"estimate", r.estimate},
          {"se", r.se},
          {"wilson", {r.wilson.lo, r.wilson.hi}},
          {"bound", r.bound},
          {"pass", r.pass}};
}

json resample_json(const ResampleStats& s) {
  return {{"events", s.events},
          {"trials_hit", s.trials_hit},
          {"trials", s.trials},
          {"p0_exact", rational_json(s.p0_exact)},
          {"per_step_bound", s.per_step_bound},
          {"pass", s.pass}};
}

json big_json(const BigInt& v) { return v.str(); }

struct Assertions {
  json list = json::array();
  bool pass = true;
  void add(const std::string& name, bool ok, const std::string& detail) {
    list.push_back({{"name", name}, {"pass", ok}, {"detail", detail}});
    pass = pass && ok;
  }
};

Address uniform_address(Address lo, Address hi, Rng& rng) {
  const Address span = hi - lo;
  const Address r = (Address{rng.next()} << 64) | rng.next();
  return lo + r % span;
}

RmPoly config_poly(const ExperimentConfig& cfg, const RmParams& rm) {
  Rng rng(derive_seed(cfg.seed, 0, kPolyStream));
  return random_poly(rm, rng);
}

PointCorruption config_noise(const ExperimentConfig& cfg, const RmParams& rm) {
  PointCorruption pc(rm.ctx, rm.m);
  if (cfg.delta > 0) pc.set_noise(cfg.delta, derive_seed(cfg.seed, 0, kNoiseStream));
  return pc;
}

std::optional<Point> config_point(const ExperimentConfig& cfg, const RmParams& rm) {
  if (cfg.point.empty()) return std::nullopt;
  try {
    const Point x = parse_point(rm.ctx, cfg.point);
    if (x.dim != rm.m) throw ConfigError("point: expected " + std::to_string(rm.m) + " coordinates");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("point: ") + e.what());
  }
}

void require_strategy(const ExperimentConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* s : allowed) {
    if (cfg.strategy == s) return;
  }
  std::string list;
  for (const char* s : allowed) list += (list.empty() ? "" : ", ") + std::string(s);
  throw ConfigError("strategy '" + cfg.strategy + "' is not supported here (use one of: " + list + ")");
}

std::optional<SampleMode> config_mode(const ExperimentConfig& cfg) {
  if (cfg.mode.empty()) return std::nullopt;
  if (cfg.mode == "exhaustive") return SampleMode::exhaustive;
  if (cfg.mode == "sampled") return SampleMode::sampled;
  throw ConfigError("mode: expected exhaustive or sampled");
}

}  // namespace

RmParams ExperimentConfig::rm() const {
  try {
    return RmParams::make(FieldCtx::make(p, m), m, d);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid code parameters: ") + e.what());
  }
}

Rational ExperimentConfig::alpha_value() const { return alpha ? *alpha : rm().rho / 8; }
Rational ExperimentConfig::rho_prox_value() const { return rho_prox ? *rho_prox : rm().rho / 8; }

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.threads = default_threads();
  return cfg;
}

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  static const std::map<std::string, std::tuple<std::uint32_t, unsigned, unsigned>> kPresets = {
      {"T1", {2, 2, 1}}, {"T2", {2, 3, 1}}, {"T3", {3, 3, 4}}, {"S1", {17, 3, 32}}};
  static const std::map<std::string, std::string> kAliases = {
      {"completeness", "ctrw-run"}, {"soundness", "soundness-exp"}, {"mixing", "mixing-exp"},
      {"correct", "correct"},       {"layout", "layout-report"},    {"calibrate", "calibrate"}};
  std::string base = name;
  if (const auto dash = name.rfind('-'); dash != std::string::npos) {
    const auto alias = kAliases.find(name.substr(0, dash));
    if (alias == kAliases.end()) throw ConfigError("unknown preset '" + name + "'");
    if (cfg.experiment.empty()) cfg.experiment = alias->second;
    base = name.substr(dash + 1);
    if (alias->first == "completeness") cfg.strategy = "clean";
    if (alias->first == "soundness") cfg.strategy = "targeted";
    if (alias->first == "mixing") cfg.strategy = "noise";
  }
  const auto it = kPresets.find(base);
  if (it == kPresets.end()) throw ConfigError("unknown preset '" + name + "' (known: T1, T2, T3, S1)");
  std::tie(cfg.p, cfg.m, cfg.d) = it->second;
  cfg.preset = name;
  cfg.delta_test = Rational(1, 10);
  if (cfg.strategy == "targeted" || cfg.strategy == "noise") cfg.delta = cfg.delta_test;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "preset") {
    apply_preset(cfg, value);
  } else if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "field") {
    try {
      const auto f = FieldCtx::parse(value);
      cfg.p = f.p();
      cfg.m = f.m();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field: ") + e.what());
    }
  } else if (key == "p") {
    cfg.p = parse_uint(key, value);
  } else if (key == "m") {
    cfg.m = parse_uint(key, value);
  } else if (key == "d") {
    cfg.d = parse_uint(key, value);
  } else if (key == "t" || key == "steps") {
    cfg.steps = parse_uint(key, value);
  } else if (key == "strategy") {
    static const std::vector<std::string> kStrategies = {"clean", "noise", "targeted", "proof-noise", "garbage"};
    if (std::find(kStrategies.begin(), kStrategies.end(), value) == kStrategies.end()) {
      throw ConfigError("strategy: unknown value '" + value + "'");
    }
    cfg.strategy = value;
  } else if (key == "delta") {
    cfg.delta = parse_rat(key, value);
  } else if (key == "delta_test") {
    cfg.delta_test = parse_rat(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_rat(key, value);
  } else if (key == "trials") {
    cfg.trials = parse_u64(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "threads") {
    cfg.threads = std::max(1u, parse_uint(key, value));
  } else if (key == "q_v") {
    cfg.q_v = parse_uint(key, value);
  } else if (key == "R") {
    cfg.R = parse_uint(key, value);
  } else if (key == "rho_prox") {
    cfg.rho_prox = parse_rat(key, value);
  } else if (key == "calibration_trials") {
    cfg.calibration_trials = parse_u64(key, value);
  } else if (key == "q_cap") {
    cfg.q_cap = parse_uint(key, value);
  } else if (key == "calibration") {
    cfg.calibration_path = value;
  } else if (key == "sigma_pcpp") {
    cfg.sigma_pcpp = parse_rat(key, value);
  } else if (key == "address") {
    cfg.address = value;
  } else if (key == "point") {
    cfg.point = value;
  } else if (key == "region") {
    if (value != "any" && value != "rm" && value != "proof") throw ConfigError("region: expected any, rm or proof");
    cfg.region = value;
  } else if (key == "target") {
    cfg.target = to_double(parse_rat(key, value));
  } else if (key == "epsilons") {
    cfg.epsilons.clear();
    for (const auto& e : split(value, ',')) cfg.epsilons.push_back(parse_rat(key, e));
  } else if (key == "bad_copies") {
    cfg.bad_copies = parse_rat(key, value);
    if (cfg.bad_copies < 0 || cfg.bad_copies > 1) throw ConfigError("bad_copies must lie in [0, 1]");
  } else if (key == "density") {
    cfg.density = parse_rat(key, value);
  } else if (key == "mode") {
    cfg.mode = value;
    config_mode(cfg);
  } else if (key == "samples") {
    cfg.samples = parse_u64(key, value);
  } else if (key == "sweep_m") {
    cfg.sweep_m.clear();
    for (const auto& e : split(value, ',')) cfg.sweep_m.push_back(parse_uint(key, e));
  } else if (key == "message") {
    cfg.message = value;
  } else if (key == "events") {
    cfg.events = parse_bool(key, value);
  } else if (key == "unsound") {
    cfg.unsound = parse_bool(key, value);
  } else if (key == "json") {
    cfg.json_path = value;
  } else if (key == "csv") {
    cfg.csv_path = value;
  } else if (key == "dump") {
    cfg.dump_path = value;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::vector<std::tuple<unsigned, std::string, std::string>> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  unsigned lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    entries.emplace_back(lineno, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
  }
  std::stable_partition(entries.begin(), entries.end(), [](const auto& e) { return std::get<1>(e) == "preset"; });
  for (const auto& [no, key, value] : entries) {
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["preset"] = cfg.preset;
  j["p"] = cfg.p;
  j["m"] = cfg.m;
  j["d"] = cfg.d;
  j["steps"] = cfg.step_count();
  j["strategy"] = cfg.strategy;
  j["delta"] = to_fraction(cfg.delta);
  j["delta_test"] = to_fraction(cfg.delta_test);
  j["alpha"] = cfg.alpha ? json(to_fraction(*cfg.alpha)) : json(nullptr);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["q_v"] = cfg.q_v;
  j["R"] = cfg.R;
  j["rho_prox"] = cfg.rho_prox ? json(to_fraction(*cfg.rho_prox)) : json(nullptr);
  j["calibration_trials"] = cfg.calibration_trials;
  j["q_cap"] = cfg.q_cap;
  j["sigma_pcpp"] = to_fraction(cfg.sigma_pcpp);
  j["address"] = cfg.address;
  j["point"] = cfg.point;
  j["region"] = cfg.region;
  j["target"] = cfg.target ? json(*cfg.target) : json(nullptr);
  json eps = json::array();
  for (const auto& e : cfg.epsilons) eps.push_back(to_fraction(e));
  j["epsilons"] = eps;
  j["density"] = to_fraction(cfg.density);
  j["bad_copies"] = to_fraction(cfg.bad_copies);
  j["mode"] = cfg.mode;
  j["samples"] = cfg.samples;
  j["sweep_m"] = cfg.sweep_m;
  j["message"] = cfg.message;
  j["events"] = cfg.events;
  j["unsound"] = cfg.unsound;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0x636667;
  for (unsigned char c : config_to_json(cfg).dump()) h = splitmix64(h ^ c);
  return hex64(h);
}

std::vector<Precondition> check_preconditions(const ExperimentConfig& cfg) {
  static const std::vector<std::string> kGated = {"ctrw-run", "mixing-exp", "soundness-exp", "correct"};
  const bool gated = std::find(kGated.begin(), kGated.end(), cfg.experiment) != kGated.end();
  std::vector<Precondition> out;
  const std::uint64_t n = FieldCtx::make(cfg.p, cfg.m).n();
  out.push_back({"degree", "d < n", std::to_string(cfg.d) + " < " + std::to_string(n), cfg.d < n, true});
  if (!out.back().holds) return out;
  const auto rm = cfg.rm();
  const Rational alpha = cfg.alpha_value();
  out.push_back({"field_size", "|F| >= 2 m d",
                 std::to_string(n) + " >= " + std::to_string(2ull * cfg.m * cfg.d), n >= 2ull * cfg.m * cfg.d,
                 cfg.experiment == "soundness-exp"});
  out.push_back({"delta_test", "delta_test <= rho/2", to_fraction(cfg.delta_test) + " <= " + to_fraction(rm.rho / 2),
                 cfg.delta_test <= rm.rho / 2, gated});
  out.push_back({"alpha", "alpha <= rho/8", to_fraction(alpha) + " <= " + to_fraction(rm.rho / 8),
                 alpha <= rm.rho / 8, gated});
  const bool noise_gated = cfg.experiment == "soundness-exp" || cfg.experiment == "mixing-exp";
  out.push_back({"noise", "delta <= delta_test", to_fraction(cfg.delta) + " <= " + to_fraction(cfg.delta_test),
                 cfg.delta <= cfg.delta_test, noise_gated});
  return out;
}

void gate_preconditions(const ExperimentConfig& cfg, const std::vector<Precondition>& pre) {
  for (const auto& c : pre) {
    if (c.holds) continue;
    if (c.name == "degree") throw ConfigError("precondition violated: " + c.inequality + " (" + c.values + ")");
    if (c.gating && !cfg.unsound) {
      throw ConfigError("precondition violated: " + c.inequality + " (" + c.values +
                        "); set unsound = true to run anyway");
    }
  }
}

json rational_json(const Rational& r) { return {{"exact", to_fraction(r)}, {"decimal", to_decimal(r, 6)}}; }

json formula_json(const FormulaValue& v) {
  json j = rational_json(v.exact);
  j["vacuous"] = v.vacuous;
  for (const auto& [k, r] : v.extra) j[k] = rational_json(r);
  return j;
}

FormulaValue formula_eval(const std::string& name, const ExperimentConfig& cfg) {
  const auto rm = cfg.rm();
  const std::uint64_t n = rm.n();
  const Rational alpha = cfg.alpha_value();
  FormulaValue v;
  v.name = name;
  auto walk_sigma = [&] {
    if (rm.rho == 2 * alpha) throw std::domain_error("sigma_rw: division by zero (rho = 2 alpha)");
    return sigma_rw(n, cfg.p, cfg.m, rm.rho, cfg.delta_test, alpha);
  };
  if (name == "sigma_rw") {
    v.exact = walk_sigma();
    v.vacuous = v.exact <= 0;
  } else if (name == "endpoint_bound") {
    v.exact = endpoint_bound(cfg.delta_test, cfg.p);
    v.vacuous = v.exact >= 1;
  } else if (name == "sigma_rlcc") {
    const Rational s = walk_sigma();
    const Rational base = s * (1 - cfg.sigma_pcpp) / 2;
    v.exact = base * rm.rho;
    v.vacuous = v.exact <= 0;
    v.extra.push_back({"without_rho", base});
    v.extra.push_back({"decoding_radius", cfg.delta_test / 4});
  } else if (name == "predicate_count") {
    BigInt nm = 1, hm = 1;
    for (unsigned i = 0; i < cfg.m; ++i) {
      nm *= n;
      hm *= cfg.p;
    }
    v.exact = Rational(BigInt(2) * nm * hm * hm * BigInt(n) * BigInt(n));
  } else if (name == "block_length") {
    const auto pcpp = PcppParams::make(cfg.d, 1, cfg.R, cfg.rho_prox_value());
    const auto r = block_length_report(rm, pcpp);
    v.exact = Rational(r.n_count_bound);
    v.extra.push_back({"n_actual", Rational(r.n_actual)});
    v.extra.push_back({"b_actual", Rational(r.b_actual)});
  } else {
    throw ConfigError("unknown formula '" + name + "'");
  }
  return v;
}

ResolvedPcpp resolve_pcpp(const ExperimentConfig& cfg) {
  ResolvedPcpp out;
  const auto rm = cfg.rm();
  const Rational rho_prox = cfg.rho_prox_value();
  if (cfg.q_v > 0) {
    out.params = PcppParams::make(cfg.d, cfg.q_v, cfg.R, rho_prox);
    out.source = "config";
    return out;
  }
  const auto key = calibration_key(rm.ctx, cfg.d, cfg.R, rho_prox, cfg.calibration_trials, cfg.seed);
  if (!cfg.calibration_path.empty()) {
    if (auto cached = load_calibration(cfg.calibration_path, key)) {
      out.calibration = std::move(cached);
      out.source = "sidecar";
    }
  }
  if (!out.calibration) {
    out.calibration = calibrate_pcpp(rm.ctx, cfg.d, cfg.R, rho_prox, cfg.calibration_trials, cfg.seed, cfg.q_cap,
                                     cfg.threads);
    out.source = "calibrated";
    if (!cfg.calibration_path.empty() && out.calibration->q_v) save_calibration(cfg.calibration_path, *out.calibration);
  }
  if (!out.calibration->q_v) {
    throw std::runtime_error("proof-system calibration did not reach the target within q_cap = " +
                             std::to_string(cfg.q_cap));
  }
  out.params = PcppParams::make(cfg.d, *out.calibration->q_v, cfg.R, rho_prox);
  return out;
}

namespace {

json calibration_summary(const CalibrationResult& c) { return json::parse(calibration_to_json(c)); }

void run_encode(const ExperimentConfig& cfg, json& result, Assertions& as) {
  const auto rm = cfg.rm();
  RmPoly poly;
  if (cfg.message.empty()) {
    poly = config_poly(cfg, rm);
  } else {
    std::vector<FieldElem> msg;
    for (const auto& s : split(cfg.message, ',')) {
      const auto code = parse_u64("message", s);
      if (code >= rm.n()) throw ConfigError("message: symbol " + s + " is not a field element");
      msg.push_back(rm.ctx.elem(code));
    }
    try {
      poly = encode(rm, msg);
    } catch (const RmError& e) {
      throw ConfigError(std::string("message: ") + e.what() + " (k = " + std::to_string(rm.k) + ")");
    }
  }
  std::vector<std::uint32_t> coeffs;
  for (auto c : poly.coeffs) coeffs.push_back(c.code);
  result["k"] = rm.k;
  result["n"] = rm.n();
  result["coefficients"] = coeffs;
  const PolyEvaluator eval(rm, poly);
  if (const auto x = config_point(cfg, rm)) {
    result["point"] = format_point(*x);
    result["value"] = eval(*x).code;
    as.add("evaluators agree", eval(*x) == evaluate(rm, poly, *x), "fast and direct evaluation at the point");
  }
  const auto layout = ComposedLayout::build(rm, PcppParams::make(cfg.d, 1, cfg.R, cfg.rho_prox_value()));
  result["n_total"] = address_to_string(layout.n_total());
  if (!cfg.address.empty() || !cfg.dump_path.empty()) {
    const auto word = std::make_shared<const CanonicalComposed>(layout, poly);
    if (!cfg.address.empty()) {
      const Address a = parse_address(cfg.address);
      if (a >= layout.n_total()) throw ConfigError("address: beyond the block length");
      const auto dec = layout.decode(a);
      result["address"] = cfg.address;
      result["region"] = region_name(dec.region);
      result["symbol"] = word->read(a).code;
    }
    if (!cfg.dump_path.empty()) {
      if (layout.n_total() > TableComposed::kMaxSymbols) throw ConfigError("dump: composed word too long");
      const auto table = TableComposed::materialize(*word);
      std::ofstream out(cfg.dump_path);
      if (!out) throw std::runtime_error("cannot write dump file '" + cfg.dump_path + "'");
      for (const auto& s : table.table()) out << s.code << '\n';
      result["dump"] = cfg.dump_path;
    }
  }
}

void run_ctrw(const ExperimentConfig& cfg, json& result, Assertions& as, ExperimentResult& er) {
  require_strategy(cfg, {"clean", "noise", "targeted"});
  const auto rm = cfg.rm();
  const auto& ctx = rm.ctx;
  const unsigned steps = cfg.step_count();
  const auto base = std::make_shared<const CodewordWord>(rm, config_poly(cfg, rm));
  const PointCorruption noise = config_noise(cfg, rm);
  const auto fixed = config_point(cfg, rm);
  const bool use_noise = cfg.strategy != "clean";
  std::vector<CtrwResult> runs(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t t) {
    Rng rng(derive_seed(cfg.seed, t, kTrialStream));
    const Point x = fixed ? *fixed : sample_point(ctx, rm.m, rng);
    if (!use_noise) {
      runs[t] = ctrw_accept(*base, x, steps, rng);
      return;
    }
    PointCorruption pc = noise;
    if (cfg.strategy == "targeted") pc.add_targeted(x);
    runs[t] = ctrw_accept(PlantedWord(base, pc), x, steps, rng);
  });
  std::uint64_t accepted = 0;
  std::vector<std::uint64_t> failed(steps + 1, 0);
  ResampleStats rs;
  er.csv_header = {"trial", "start", "accept", "failed_plane", "resamples"};
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const auto& r = runs[t];
    accepted += r.accept;
    if (r.failed_plane) ++failed[*r.failed_plane];
    rs.merge(r.walk);
    er.csv_rows.push_back({std::to_string(t), format_point(r.walk.start), r.accept ? "1" : "0",
                           r.failed_plane ? std::to_string(*r.failed_plane) : "", std::to_string(r.walk.resample_count)});
  }
  rs.finish(ctx, rm.m);
  result["accepted"] = accepted;
  result["rejected"] = cfg.trials - accepted;
  result["trials"] = cfg.trials;
  result["acceptance"] = proportion(accepted, cfg.trials);
  const auto w = wilson_interval(accepted, cfg.trials);
  result["wilson"] = {w.lo, w.hi};
  result["failed_plane"] = failed;
  result["resamples"] = resample_json(rs);
  if (cfg.strategy == "clean") {
    as.add("perfect completeness", accepted == cfg.trials,
           std::to_string(accepted) + "/" + std::to_string(cfg.trials) + " accepted");
  }
}

void run_mixing(const ExperimentConfig& cfg, json& result, Assertions& as) {
  require_strategy(cfg, {"noise", "clean"});
  const auto rm = cfg.rm();
  const auto rep = mixing_exp(rm, config_noise(cfg, rm), cfg.delta, cfg.step_count(), cfg.trials, cfg.seed,
                              cfg.threads);
  result["hit"] = proportion_json(rep.hit);
  result["bound"] = rational_json(rep.bound_exact);
  result["resamples"] = resample_json(rep.resamples);
  as.add("endpoint mixing", rep.hit.pass,
         "estimate " + std::to_string(rep.hit.estimate) + " vs bound " + to_decimal(rep.bound_exact));
}

void run_sampling(const ExperimentConfig& cfg, json& result, Assertions& as, ExperimentResult& er) {
  const auto ctx = FieldCtx::make(cfg.p, cfg.m);
  const std::uint64_t nn = ctx.n() * ctx.n();
  if (cfg.density <= 0 || cfg.density >= 1) throw ConfigError("density must lie in (0, 1)");
  const auto size = static_cast<std::uint64_t>(to_double(cfg.density * nn) + 0.5);
  std::vector<std::uint64_t> order(nn);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, 0, kSetStream));
  for (std::uint64_t i = 0; i < size; ++i) std::swap(order[i], order[i + rng.below(nn - i)]);
  std::vector<bool> set(nn, false);
  for (std::uint64_t i = 0; i < size; ++i) set[order[i]] = true;
  const auto rep = line_sampling_exp(ctx, set, cfg.epsilons, config_mode(cfg), cfg.samples, cfg.seed);
  result["mode"] = rep.mode == SampleMode::exhaustive ? "exhaustive" : "sampled";
  result["mu"] = rational_json(rep.mu);
  json rows = json::array();
  er.csv_header = {"epsilon", "deviations", "total", "tail", "bound", "pass"};
  for (const auto& r : rep.rows) {
    rows.push_back({{"epsilon", to_fraction(r.epsilon)},
                    {"deviations", r.deviations},
                    {"total", r.total},
                    {"tail", rational_json(r.tail)},
                    {"bound", rational_json(r.bound)},
                    {"se", r.se},
                    {"pass", r.pass}});
    er.csv_rows.push_back({to_fraction(r.epsilon), std::to_string(r.deviations), std::to_string(r.total),
                           to_decimal(r.tail), to_decimal(r.bound), r.pass ? "1" : "0"});
    as.add("tail at epsilon " + to_fraction(r.epsilon), r.pass, to_decimal(r.tail) + " <= " + to_decimal(r.bound));
  }
  result["rows"] = rows;
}

void run_matrix(const ExperimentConfig& cfg, json& result, Assertions& as) {
  const auto mode = config_mode(cfg).value_or(SampleMode::exhaustive);
  std::uint64_t samples = cfg.samples ? cfg.samples : cfg.trials;
  MatrixReport rep;
  try {
    rep = matrix_product_check(cfg.p, cfg.m, mode, samples, cfg.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("matrix-exp: ") + e.what());
  }
  result["mode"] = mode == SampleMode::exhaustive ? "exhaustive" : "sampled";
  result["pairs"] = rep.pairs;
  result["singular"] = rep.singular;
  result["singular_exact"] = rational_json(rep.singular_exact);
  result["series_sum"] = rational_json(rep.series_sum);
  result["bound"] = rational_json(rep.bound);
  result["cells"] = rep.cells;
  result["product_min_hits"] = rep.product_min_hits;
  result["product_max_hits"] = rep.product_max_hits;
  result["uniform_exact"] = rep.uniform_exact;
  result["chi2"] = {{"statistic", rep.chi2.statistic}, {"dof", rep.chi2.dof}, {"p_value", rep.chi2.p_value}};
  as.add("matrix product claim", rep.pass,
         std::to_string(rep.singular) + "/" + std::to_string(rep.pairs) + " singular");
}

void run_soundness(const ExperimentConfig& cfg, json& result, Assertions& as) {
  require_strategy(cfg, {"noise", "targeted"});
  const auto rm = cfg.rm();
  const auto poly = config_poly(cfg, rm);
  const Rational alpha = cfg.alpha_value();
  const auto rep = soundness_exp(rm, poly, cfg.delta, derive_seed(cfg.seed, 0, kNoiseStream), alpha,
                                 cfg.step_count(), cfg.trials, cfg.seed, cfg.threads);
  result["trials"] = rep.trials;
  result["violated"] = rep.violated;
  result["ambiguous"] = rep.ambiguous;
  result["witness"] = rep.witness;
  result["sigma"] = rational_json(rep.sigma);
  result["frequency"] = proportion_json(rep.freq);
  result["resamples"] = resample_json(rep.resamples);
  as.add("robust soundness", rep.freq.pass,
         "frequency " + std::to_string(rep.freq.estimate) + " vs sigma " + to_decimal(rep.sigma));
  if (cfg.events) {
    const auto ev = events_exp(rm, config_noise(cfg, rm), alpha, cfg.step_count(), cfg.trials, cfg.seed,
                               cfg.threads);
    result["events"] = {{"trials", ev.trials},     {"f0_trials", ev.f0_trials}, {"all_f", ev.all_f},
                        {"eps_hits", ev.eps_hits}, {"line_fail", ev.line_fail}, {"line_den", ev.line_den},
                        {"epsilon", ev.epsilon},   {"lhs", ev.lhs},             {"rhs", ev.rhs},
                        {"lhs_se", ev.lhs_se},     {"peel_pass", ev.peel_pass}, {"line_pass", ev.line_pass}};
  }
}

struct CorrectionCounts {
  std::uint64_t correct = 0;
  std::uint64_t aborted = 0;
  std::uint64_t wrong = 0;
};

void run_correct(const ExperimentConfig& cfg, json& result, Assertions& as, ExperimentResult& er) {
  const auto rm = cfg.rm();
  const auto& ctx = rm.ctx;
  const auto resolved = resolve_pcpp(cfg);
  const auto layout = ComposedLayout::build(rm, resolved.params);
  const auto base = std::make_shared<const CanonicalComposed>(layout, config_poly(cfg, rm));

  CorruptionOverlay overlay;
  const std::uint64_t noise_seed = derive_seed(cfg.seed, 0, kNoiseStream);
  if (cfg.strategy == "noise" || cfg.strategy == "targeted") {
    overlay.rm = config_noise(cfg, rm);
  } else if (cfg.strategy == "proof-noise") {
    overlay.add_region_noise(Region::point_proof, cfg.delta, noise_seed);
    overlay.add_region_noise(Region::line_proof, cfg.delta, noise_seed + 1);
  } else if (cfg.strategy == "garbage") {
    overlay.add_region_noise(Region::rm, Rational(1), noise_seed);
  }
  if (cfg.bad_copies > 0) overlay.set_bad_copies(cfg.bad_copies, noise_seed + 2);

  std::optional<Address> fixed;
  if (!cfg.address.empty()) {
    try {
      fixed = parse_address(cfg.address);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("address: ") + e.what());
    }
    if (*fixed >= layout.n_total()) throw ConfigError("address: beyond the block length");
  }
  Address lo = 0, hi = layout.n_total();
  if (cfg.region == "rm") hi = layout.rm_end();
  if (cfg.region == "proof") lo = layout.rm_end();

  struct Trial {
    Address a = 0;
    FieldElem truth;
    CorrectionTrace trace;
  };
  std::vector<Trial> trials(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t t) {
    Rng rng(derive_seed(cfg.seed, t, kTrialStream));
    Trial& tr = trials[t];
    tr.a = fixed ? *fixed : uniform_address(lo, hi, rng);
    tr.truth = base->read(tr.a);
    CorruptionOverlay ov = overlay;
    if (cfg.strategy == "targeted") {
      const auto dec = layout.decode(tr.a);
      if (dec.region == Region::rm) {
        ov.rm->add_targeted(point_from_code(ctx, rm.m, dec.point));
      } else {
        ov.targeted.push_back({tr.a, std::nullopt});
      }
    }
    if (ov.empty()) {
      tr.trace = correct(*base, tr.a, rng);
    } else {
      tr.trace = correct(CorruptedComposed(base, std::move(ov)), tr.a, rng);
    }
  });

  CorrectionCounts counts;
  std::uint64_t queries = 0;
  std::map<int, std::uint64_t> rejected_by;
  std::uint64_t bad_trials = 0, bad_success = 0, good_success = 0, bad_aborted = 0, good_aborted = 0;
  er.csv_header = {"trial", "address", "region", "copy", "bad_copy", "output", "truth", "rejected_by", "queries"};
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const auto& tr = trials[t];
    if (!tr.trace.output) {
      ++counts.aborted;
      ++rejected_by[tr.trace.rejected_by];
    } else if (*tr.trace.output == tr.truth) {
      ++counts.correct;
    } else {
      ++counts.wrong;
    }
    queries += tr.trace.queries;
    const bool bad = overlay.bad_copy(tr.trace.copy);
    const bool ok = !tr.trace.output || *tr.trace.output == tr.truth;
    bad_trials += bad;
    (bad ? bad_success : good_success) += ok;
    (bad ? bad_aborted : good_aborted) += !tr.trace.output;
    er.csv_rows.push_back({std::to_string(t), address_to_string(tr.a), region_name(layout.decode(tr.a).region),
                           std::to_string(tr.trace.copy), bad ? "1" : "0", elem_text(tr.trace.output), std::to_string(tr.truth.code),
                           std::to_string(tr.trace.rejected_by), std::to_string(tr.trace.queries)});
  }
  const std::uint64_t success = counts.correct + counts.aborted;
  result["pcpp"] = {{"q_v", resolved.params.q_v},
                    {"R", resolved.params.R},
                    {"k2", resolved.params.k2},
                    {"L", resolved.params.L()},
                    {"rho_prox", to_fraction(resolved.params.rho_prox)},
                    {"source", resolved.source}};
  if (resolved.calibration) result["pcpp"]["sigma_pcpp"] = resolved.calibration->sigma_pcpp;
  result["n_total"] = address_to_string(layout.n_total());
  result["trials"] = cfg.trials;
  result["correct"] = counts.correct;
  result["aborted"] = counts.aborted;
  result["wrong"] = counts.wrong;
  json rej = json::object();
  for (const auto& [k, v] : rejected_by) rej[std::to_string(k)] = v;
  result["rejected_by"] = rej;
  result["mean_queries"] = cfg.trials ? static_cast<double>(queries) / static_cast<double>(cfg.trials) : 0.0;
  const auto w = wilson_interval(success, cfg.trials);
  result["success"] = {{"hits", success},
                       {"estimate", proportion(success, cfg.trials)},
                       {"se", standard_error(success, cfg.trials)},
                       {"wilson", {w.lo, w.hi}}};
  if (!overlay.empty() && layout.n_total() <= TableComposed::kMaxSymbols / 8) {
    const auto acc = CorruptedComposed(base, overlay).accounting();
    result["corruption"] = {{"exact", acc.exact},         {"rm", acc.rm},
                            {"point_proof", acc.point_proof}, {"line_proof", acc.line_proof},
                            {"fraction", acc.fraction},   {"rm_fraction", acc.rm_fraction}};
  } else if (!overlay.empty()) {
    const auto acc = CorruptedComposed(base, overlay).accounting();
    result["corruption"] = {{"exact", acc.exact}, {"fraction", acc.fraction}, {"rm_fraction", acc.rm_fraction}};
  }
  if (cfg.bad_copies > 0) {
    const std::uint64_t good_trials = cfg.trials - bad_trials;
    result["copies"] = {{"bad_rate", to_double(cfg.bad_copies)},
                        {"bad_trials", bad_trials},
                        {"bad_success", proportion(bad_success, bad_trials)},
                        {"bad_aborted", proportion(bad_aborted, bad_trials)},
                        {"good_trials", good_trials},
                        {"good_success", proportion(good_success, good_trials)},
                        {"good_aborted", proportion(good_aborted, good_trials)}};
  }
  if (cfg.strategy == "clean" && cfg.bad_copies == 0) {
    as.add("perfect completeness", counts.correct == cfg.trials,
           std::to_string(counts.correct) + "/" + std::to_string(cfg.trials) + " corrected");
  } else {
    const double target = cfg.target.value_or(0.0);
    result["target"] = target;
    as.add("output in {true symbol, abort}", at_least_with_slack(success, cfg.trials, target),
           std::to_string(proportion(success, cfg.trials)) + " vs target " + std::to_string(target));
  }
}

json report_json(const BlockLengthReport& r) {
  return {{"p", r.p},
          {"m", r.m},
          {"d", r.d},
          {"n", r.n},
          {"k", r.k},
          {"k2", r.k2},
          {"L", r.L},
          {"n_m", big_json(r.nm)},
          {"point_keys", big_json(r.point_keys)},
          {"line_keys", big_json(r.line_keys)},
          {"b_actual", big_json(r.b_actual)},
          {"b_count", big_json(r.b_count)},
          {"r_actual", big_json(r.r_actual)},
          {"n_actual", big_json(r.n_actual)},
          {"r_count", big_json(r.r_count)},
          {"n_count", big_json(r.n_count)},
          {"n_count_bound", big_json(r.n_count_bound)},
          {"rho", rational_json(r.rho)},
          {"distance_bound", rational_json(r.distance_bound)},
          {"rate", r.rate},
          {"exponent_actual", r.exponent_actual},
          {"exponent_count", r.exponent_count},
          {"q_pcpp", r.q_pcpp},
          {"queries_composed", r.queries_composed}};
}

void run_layout(const ExperimentConfig& cfg, json& result, Assertions& as) {
  const auto rm = cfg.rm();
  std::optional<PcppParams> pcpp;
  std::string source = "config";
  if (cfg.q_v > 0) {
    pcpp = PcppParams::make(cfg.d, cfg.q_v, cfg.R, cfg.rho_prox_value());
  } else if (!cfg.calibration_path.empty()) {
    const auto key = calibration_key(rm.ctx, cfg.d, cfg.R, cfg.rho_prox_value(), cfg.calibration_trials, cfg.seed);
    if (const auto cal = load_calibration(cfg.calibration_path, key); cal && cal->q_v) {
      pcpp = PcppParams::make(cfg.d, *cal->q_v, cfg.R, cfg.rho_prox_value());
      source = "sidecar";
    }
  }
  const auto params = pcpp.value_or(PcppParams::make(cfg.d, 1, cfg.R, cfg.rho_prox_value()));
  const auto layout = ComposedLayout::build(rm, params);
  const auto rep = block_length_report(rm, params);
  result["report"] = report_json(rep);
  result["q_v"] = pcpp ? json(params.q_v) : json(nullptr);
  result["q_v_source"] = pcpp ? json(source) : json(nullptr);
  result["queries_per_round"] = params.queries_per_round();
  result["regions"] = {{"rm_end", address_to_string(layout.rm_end())},
                       {"point_end", address_to_string(layout.point_end())},
                       {"n_total", address_to_string(layout.n_total())}};
  const BigInt hand = rep.r_actual * rep.nm + (rep.point_keys + rep.line_keys) * rep.L;
  as.add("N equals r n^m + keys L", hand == rep.n_actual && rep.n_actual.str() == address_to_string(layout.n_total()),
         rep.n_actual.str());
}

void run_sweep(const ExperimentConfig& cfg, json& result, Assertions& as, ExperimentResult& er) {
  std::vector<std::tuple<std::uint32_t, unsigned, unsigned>> grid;
  for (unsigned m : cfg.sweep_m) grid.emplace_back(cfg.p, m, 0);
  std::vector<BlockLengthReport> rows;
  try {
    rows = block_length_sweep(grid, cfg.R, cfg.q_v ? cfg.q_v : 1);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  json out = json::array();
  er.csv_header = {"p", "m", "d", "k", "b_actual", "b_count", "n_actual", "n_count", "exponent_actual",
                   "exponent_count", "rate"};
  for (const auto& r : rows) {
    out.push_back(report_json(r));
    er.csv_rows.push_back({std::to_string(r.p), std::to_string(r.m), std::to_string(r.d), std::to_string(r.k),
                           r.b_actual.str(), r.b_count.str(), r.n_actual.str(), r.n_count.str(),
                           std::to_string(r.exponent_actual), std::to_string(r.exponent_count),
                           std::to_string(r.rate)});
  }
  result["rows"] = out;
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].m > rows[i - 1].m) decreasing = decreasing && rows[i].exponent_count < rows[i - 1].exponent_count;
  }
  as.add("exponent decreases with m", decreasing, "predicate-count column");
}

void run_calibrate(const ExperimentConfig& cfg, json& result, Assertions& as) {
  const auto rm = cfg.rm();
  const Rational rho_prox = cfg.rho_prox_value();
  const auto key = calibration_key(rm.ctx, cfg.d, cfg.R, rho_prox, cfg.calibration_trials, cfg.seed);
  std::optional<CalibrationResult> cal;
  std::string source = "calibrated";
  if (!cfg.calibration_path.empty()) cal = load_calibration(cfg.calibration_path, key);
  if (cal) {
    source = "sidecar";
  } else {
    cal = calibrate_pcpp(rm.ctx, cfg.d, cfg.R, rho_prox, cfg.calibration_trials, cfg.seed, cfg.q_cap, cfg.threads);
    if (!cfg.calibration_path.empty()) save_calibration(cfg.calibration_path, *cal);
  }
  result["source"] = source;
  result["calibration"] = calibration_summary(*cal);
  as.add("target reached", cal->q_v.has_value(),
         cal->q_v ? "q_v = " + std::to_string(*cal->q_v) : "no q_v up to " + std::to_string(cfg.q_cap));
  as.add("honest pairs accepted", cal->honest_accepted == cal->honest_trials,
         std::to_string(cal->honest_accepted) + "/" + std::to_string(cal->honest_trials));
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> kNames = {"encode",     "correct",       "ctrw-run",      "mixing-exp",
                                                  "sampling-exp", "matrix-exp", "soundness-exp", "layout-report",
                                                  "sweep",      "calibrate"};
  return kNames;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<Precondition> pre;
  try {
    pre = check_preconditions(cfg);
  } catch (const FieldError& e) {
    throw ConfigError(std::string("invalid field: ") + e.what());
  }
  gate_preconditions(cfg, pre);
  bool unsound = false;
  json pre_json = json::array();
  for (const auto& c : pre) {
    pre_json.push_back(
        {{"name", c.name}, {"inequality", c.inequality}, {"values", c.values}, {"holds", c.holds}, {"gating", c.gating}});
    unsound = unsound || (!c.holds && c.gating);
  }

  ExperimentResult er;
  json result = json::object();
  Assertions as;
  const auto& e = cfg.experiment;
  if (e == "encode") {
    run_encode(cfg, result, as);
  } else if (e == "correct") {
    run_correct(cfg, result, as, er);
  } else if (e == "ctrw-run") {
    run_ctrw(cfg, result, as, er);
  } else if (e == "mixing-exp") {
    run_mixing(cfg, result, as);
  } else if (e == "sampling-exp") {
    run_sampling(cfg, result, as, er);
  } else if (e == "matrix-exp") {
    run_matrix(cfg, result, as);
  } else if (e == "soundness-exp") {
    run_soundness(cfg, result, as);
  } else if (e == "layout-report") {
    run_layout(cfg, result, as);
  } else if (e == "sweep") {
    run_sweep(cfg, result, as, er);
  } else if (e == "calibrate") {
    run_calibrate(cfg, result, as);
  }

  json formulas = json::object();
  if (e != "sampling-exp" && e != "matrix-exp" && e != "sweep") {
    for (const char* name : {"sigma_rw", "endpoint_bound", "sigma_rlcc", "predicate_count", "block_length"}) {
      try {
        formulas[name] = formula_json(formula_eval(name, cfg));
      } catch (const std::domain_error& err) {
        formulas[name] = {{"error", err.what()}};
      }
    }
  }

  json& rep = er.report;
  rep["schema"] = "rlcc-report/1";
  rep["version"] = version();
  rep["experiment"] = e;
  rep["config_hash"] = config_hash(cfg);
  rep["config"] = config_to_json(cfg);
  rep["preconditions"] = pre_json;
  rep["unsound"] = unsound;
  rep["formulas"] = formulas;
  rep["result"] = result;
  rep["assertions"] = as.list;
  rep["pass"] = as.pass;
  rep["timing"] = {{"wall_clock_s",
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  er.pass = as.pass;
  return er;
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg) {
  if (!cfg.json_path.empty()) {
    std::ofstream out(cfg.json_path);
    if (!out) throw std::runtime_error("cannot write '" + cfg.json_path + "'");
    out << result.report.dump(2) << '\n';
  }
  if (!cfg.csv_path.empty()) {
    std::ofstream out(cfg.csv_path);
    if (!out) throw std::runtime_error("cannot write '" + cfg.csv_path + "'");
    auto row = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const bool quote = cells[i].find(',') != std::string::npos;
        out << (i ? "," : "") << (quote ? "\"" + cells[i] + "\"" : cells[i]);
      }
      out << '\n';
    };
    row(result.csv_header);
    for (const auto& r : result.csv_rows) row(r);
  }
}

}  // namespace rlcc

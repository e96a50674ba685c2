#pragma once

// Experiment configuration, precondition gating, formula evaluation and
// report emission shared by the CLI and the acceptance runner.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rlcc/composed.hpp"
#include "rlcc/ctrw.hpp"
#include "rlcc/pcpp.hpp"

namespace rlcc {

const char* version();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::string preset;
  std::uint32_t p = 2;
  unsigned m = 2;
  unsigned d = 1;
  unsigned steps = 0;  // 0: m
  // clean | noise | targeted | proof-noise | garbage
  std::string strategy = "clean";
  Rational delta{0};
  Rational delta_test{1, 10};
  std::optional<Rational> alpha;  // default rho/8
  std::uint64_t trials = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  unsigned q_v = 0;  // 0: calibrated
  unsigned R = 9;
  std::optional<Rational> rho_prox;  // default rho/8
  std::uint64_t calibration_trials = 2000;
  unsigned q_cap = 16;
  std::string calibration_path;
  Rational sigma_pcpp{1, 2};  // formula input only

  std::string address;  // composed address (decimal)
  std::string point;    // "c1,c2,..." integer codes
  std::string region = "any";  // any | rm | proof
  std::optional<double> target;
  Rational bad_copies{0};  // correct: fraction of RM copies replaced outright

  std::vector<Rational> epsilons{Rational(1, 8), Rational(1, 4), Rational(1, 2)};
  Rational density{1, 4};
  std::string mode;  // exhaustive | sampled | empty for automatic
  std::uint64_t samples = 0;
  std::vector<unsigned> sweep_m{2, 3};
  std::string message;  // encode: comma-separated coefficient codes
  bool events = false;
  bool unsound = false;

  std::string json_path;
  std::string csv_path;
  std::string dump_path;

  RmParams rm() const;
  Rational alpha_value() const;
  Rational rho_prox_value() const;
  unsigned step_count() const { return steps ? steps : m; }
};

ExperimentConfig default_config();
// T1, T2, T3, S1, optionally prefixed by an experiment alias such as
// completeness-T2 or soundness-S1.
void apply_preset(ExperimentConfig& cfg, const std::string& name);
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Line-oriented `key = value`; `#` starts a comment. A preset line is applied
// before the other keys regardless of its position.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = default_config());
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = default_config());

nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Hash of the configuration without output paths and thread count.
std::string config_hash(const ExperimentConfig& cfg);

struct Precondition {
  std::string name;
  std::string inequality;
  std::string values;
  bool holds = true;
  bool gating = false;
};

std::vector<Precondition> check_preconditions(const ExperimentConfig& cfg);
// Throws ConfigError naming the failing inequality unless cfg.unsound.
void gate_preconditions(const ExperimentConfig& cfg, const std::vector<Precondition>& pre);

struct FormulaValue {
  std::string name;
  Rational exact;
  bool vacuous = false;  // value <= 0 for a probability bound
  std::vector<std::pair<std::string, Rational>> extra;
};

// sigma_rw, endpoint_bound, sigma_rlcc, block_length, predicate_count. Throws
// std::domain_error when rho = 2 alpha.
FormulaValue formula_eval(const std::string& name, const ExperimentConfig& cfg);
nlohmann::json rational_json(const Rational& r);
nlohmann::json formula_json(const FormulaValue& v);

struct ExperimentResult {
  nlohmann::json report;
  bool pass = true;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

const std::vector<std::string>& experiment_names();
ExperimentResult run_experiment(const ExperimentConfig& cfg);
void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg);

// q_v from the configuration, the sidecar, or a fresh calibration.
struct ResolvedPcpp {
  PcppParams params;
  std::optional<CalibrationResult> calibration;
  std::string source;  // config | sidecar | calibrated
};
ResolvedPcpp resolve_pcpp(const ExperimentConfig& cfg);

}  // namespace rlcc

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "banditlab/function_class.hpp"
#include "banditlab/rational.hpp"
#include "banditlab/types.hpp"

namespace banditlab {

inline constexpr const char* kCodeVersion = "0.1.0";

struct ExperimentConfig {
  nlohmann::json class_spec;
  nlohmann::json learner_spec;
  double sigma = 0.0;
  Rational epsilon;
  long trials = 1;
  std::uint64_t master_seed = 0;
  long budget = 1'000'000;  // max queries per trial

  enum class Adversary { kFixedFunction, kWorstOverClass };
  Adversary adversary = Adversary::kWorstOverClass;
  int fixed_function = 0;  // kFixedFunction only

  int threads = 0;      // 0 = all hardware threads
  bool timing = false;  // fill wallclock_ns (off keeps outputs byte-identical)
};

struct TrialRecord {
  long trial = 0;
  std::uint64_t seed = 0;
  int function_index = 0;
  long queries = 0;
  int output_action = -1;  // -1 = no output (error or budget exhaustion)
  bool success = false;
  double regret = 0.0;  // sum over queries of max f - f(a_t), true means
  std::string error_tag;
  std::uint64_t wallclock_ns = 0;
};

struct FunctionBreakdown {
  int function_index = 0;
  long trials = 0;
  double success_rate = 0.0;
  double mean_regret = 0.0;
  double mean_queries = 0.0;
};

struct Summary {
  double success_rate = 0.0;
  double success_ci95 = 0.0;  // normal-approximation 95% halfwidth
  double mean_queries = 0.0;
  double mean_regret = 0.0;
  int worst_function = 0;  // lowest success rate; ties to higher mean regret
  std::vector<FunctionBreakdown> per_function;
  nlohmann::json config_echo;  // semantic fields only; thread count excluded
  std::string code_version = kCodeVersion;
};

struct RunResult {
  std::vector<TrialRecord> records;
  Summary summary;
};

// Seeded Monte Carlo driver. Every trial draws its own generator from
// (master seed, trial index), so records are identical for any thread count;
// learner failures become error-tagged records, never batch aborts.
RunResult run_trials(const ExperimentConfig& config);

// CSV with the fixed column set, one row per trial, in trial order.
std::string records_to_csv(const std::vector<TrialRecord>& records);
nlohmann::json records_to_json(const std::vector<TrialRecord>& records);
nlohmann::json summary_to_json(const Summary& summary);

struct PinskerReport {
  double p0 = 0.0;  // P(event) running against f0
  double p1 = 0.0;  // P(event) running against f1
  double se0 = 0.0;
  double se1 = 0.0;
  double kl = 0.0;  // divergence budget from mean pull counts under f0
  double pinsker = 0.0;
  double huber_bretagnolle = 0.0;
  bool pinsker_ok = false;
  bool hb_ok = false;
  std::vector<double> mean_pull_counts;  // under f0, per action
  std::vector<double> mean_gaps;         // |f0(a) - f1(a)| per action
};

// Runs the learner against two ways the world could be and checks the
// measured event probabilities against the information-theoretic limits:
//   |P0 - P1| <= pinsker_bound(KL) + 3(SE0+SE1)
//   P0(E) + P1(not E) >= huber_bretagnolle_bound(KL) - 3(SE0+SE1)
// with KL computed from the measured pull counts under f0 and the per-action
// mean gaps. The classes must share an action space; sigma must be positive.
PinskerReport pinsker_check(
    const ExplicitClass& cls0, int f0, const ExplicitClass& cls1, int f1,
    const nlohmann::json& learner_spec,
    const std::function<bool(const TrialRecord&)>& event, long budget,
    long trials, double sigma, std::uint64_t master_seed);

}  // namespace banditlab

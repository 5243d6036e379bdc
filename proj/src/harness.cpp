#include "banditlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "banditlab/class_builders.hpp"
#include "banditlab/learners.hpp"
#include "banditlab/metrics.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

namespace {

std::string classify_error(const Error& e) {
  if (dynamic_cast<const ProtocolError*>(&e)) return "protocol_error";
  if (dynamic_cast<const InconsistentHistoryError*>(&e)) {
    return "inconsistent_history";
  }
  if (dynamic_cast<const DecodeError*>(&e)) return "decode_error";
  if (dynamic_cast<const NoConsistentFunctionError*>(&e)) {
    return "no_consistent_function";
  }
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  return "error";
}

struct SingleTrialOutcome {
  TrialRecord record;
  std::vector<long> pull_counts;
};

SingleTrialOutcome run_single_trial(const ExplicitClass& cls,
                                    const nlohmann::json& learner_spec,
                                    int function_index, double sigma,
                                    const Rational& epsilon, long budget,
                                    long trial, std::uint64_t master_seed,
                                    bool capture_pulls, bool timing) {
  SingleTrialOutcome out;
  out.record.trial = trial;
  out.record.seed = mix_seed(master_seed, static_cast<std::uint64_t>(trial));
  out.record.function_index = function_index;
  if (capture_pulls) {
    out.pull_counts.assign(static_cast<std::size_t>(cls.num_actions()), 0);
  }
  const auto started = std::chrono::steady_clock::now();
  TrialRng rng(out.record.seed);
  const NoiseModel noise{sigma};
  try {
    auto learner = make_learner(learner_spec, cls);
    History history;
    for (;;) {
      const LearnerDecision decision = learner->step(history);
      if (decision.kind == LearnerDecision::Kind::kStop) {
        out.record.output_action = decision.action;
        out.record.error_tag = learner->error_tag();
        break;
      }
      if (out.record.queries >= budget) {
        out.record.error_tag = "budget_exhausted";
        break;
      }
      cls.check_action(decision.action);
      const Reward reward =
          sample_reward(cls, function_index, decision.action, noise, rng);
      ++out.record.queries;
      if (capture_pulls) {
        ++out.pull_counts[static_cast<std::size_t>(decision.action)];
      }
      out.record.regret += (cls.function_max(function_index) -
                            cls.reward(function_index, decision.action))
                               .to_double();
      history.push_back(Observation{decision.action, reward});
    }
  } catch (const Error& e) {
    out.record.output_action = -1;
    out.record.error_tag = classify_error(e);
  }
  out.record.success =
      out.record.output_action >= 0 &&
      cls.is_eps_optimal(function_index, out.record.output_action, epsilon);
  if (timing) {
    out.record.wallclock_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - started)
            .count());
  }
  return out;
}

void run_block(const ExplicitClass& cls, const ExperimentConfig& config,
               long first, long last, std::vector<TrialRecord>* records) {
  for (long trial = first; trial < last; ++trial) {
    const int f =
        config.adversary == ExperimentConfig::Adversary::kFixedFunction
            ? config.fixed_function
            : static_cast<int>(trial % cls.num_functions());
    (*records)[static_cast<std::size_t>(trial)] =
        run_single_trial(cls, config.learner_spec, f, config.sigma,
                         config.epsilon, config.budget, trial,
                         config.master_seed, /*capture_pulls=*/false,
                         config.timing)
            .record;
  }
}

nlohmann::json echo_config(const ExperimentConfig& config) {
  // Thread count and timing deliberately left out: they must not change any
  // output file.
  nlohmann::json echo;
  echo["class"] = config.class_spec;
  echo["learner"] = config.learner_spec;
  echo["sigma"] = config.sigma;
  echo["epsilon"] = config.epsilon.to_string();
  echo["trials"] = config.trials;
  echo["master_seed"] = config.master_seed;
  echo["budget"] = config.budget;
  echo["adversary"] =
      config.adversary == ExperimentConfig::Adversary::kFixedFunction
          ? "fixed_function"
          : "worst_over_class";
  if (config.adversary == ExperimentConfig::Adversary::kFixedFunction) {
    echo["fixed_function"] = config.fixed_function;
  }
  return echo;
}

}  // namespace

RunResult run_trials(const ExperimentConfig& config) {
  if (config.trials < 1) throw DomainError("trials must be >= 1");
  if (config.budget < 1) throw DomainError("budget must be >= 1");
  const ExplicitClass cls = class_from_json(config.class_spec);
  if (config.adversary == ExperimentConfig::Adversary::kFixedFunction) {
    cls.check_function(config.fixed_function);
  }
  // Fail fast on an invalid learner spec instead of tagging every trial.
  make_learner(config.learner_spec, cls);

  RunResult result;
  result.records.resize(static_cast<std::size_t>(config.trials));
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(
      std::min<long>(threads, config.trials));
  if (threads == 1) {
    run_block(cls, config, 0, config.trials, &result.records);
  } else {
    std::vector<std::thread> workers;
    const long chunk = (config.trials + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const long first = t * chunk;
      const long last = std::min(config.trials, first + chunk);
      if (first >= last) break;
      workers.emplace_back(run_block, std::cref(cls), std::cref(config), first,
                           last, &result.records);
    }
    for (std::thread& w : workers) w.join();
  }

  Summary& s = result.summary;
  const auto n = static_cast<double>(config.trials);
  double successes = 0;
  double queries = 0;
  double regret = 0;
  std::vector<FunctionBreakdown> per_f(
      static_cast<std::size_t>(cls.num_functions()));
  for (int f = 0; f < cls.num_functions(); ++f) {
    per_f[static_cast<std::size_t>(f)].function_index = f;
  }
  for (const TrialRecord& r : result.records) {
    successes += r.success ? 1.0 : 0.0;
    queries += static_cast<double>(r.queries);
    regret += r.regret;
    FunctionBreakdown& fb = per_f[static_cast<std::size_t>(r.function_index)];
    ++fb.trials;
    fb.success_rate += r.success ? 1.0 : 0.0;
    fb.mean_regret += r.regret;
    fb.mean_queries += static_cast<double>(r.queries);
  }
  s.success_rate = successes / n;
  s.success_ci95 =
      1.96 * std::sqrt(s.success_rate * (1.0 - s.success_rate) / n);
  s.mean_queries = queries / n;
  s.mean_regret = regret / n;
  for (FunctionBreakdown& fb : per_f) {
    if (fb.trials > 0) {
      const auto fn = static_cast<double>(fb.trials);
      fb.success_rate /= fn;
      fb.mean_regret /= fn;
      fb.mean_queries /= fn;
    } else {
      fb.success_rate = 1.0;  // untested functions cannot be the worst
    }
  }
  s.per_function = per_f;
  int worst = 0;
  for (int f = 1; f < cls.num_functions(); ++f) {
    const FunctionBreakdown& cand = per_f[static_cast<std::size_t>(f)];
    const FunctionBreakdown& cur = per_f[static_cast<std::size_t>(worst)];
    if (cand.success_rate < cur.success_rate ||
        (cand.success_rate == cur.success_rate &&
         cand.mean_regret > cur.mean_regret)) {
      worst = f;
    }
  }
  s.worst_function = worst;
  s.config_echo = echo_config(config);
  s.code_version = kCodeVersion;
  return result;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "trial,seed,function_index,queries,output_action,success,regret,"
         "error_tag,wallclock_ns\n";
  for (const TrialRecord& r : records) {
    out << r.trial << ',' << r.seed << ',' << r.function_index << ','
        << r.queries << ',';
    if (r.output_action >= 0) out << r.output_action;
    out << ',' << (r.success ? 1 : 0) << ',' << format_double(r.regret) << ','
        << r.error_tag << ',' << r.wallclock_ns << '\n';
  }
  return out.str();
}

nlohmann::json records_to_json(const std::vector<TrialRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TrialRecord& r : records) {
    nlohmann::json row;
    row["trial"] = r.trial;
    row["seed"] = r.seed;
    row["function_index"] = r.function_index;
    row["queries"] = r.queries;
    if (r.output_action >= 0) {
      row["output_action"] = r.output_action;
    } else {
      row["output_action"] = nullptr;
    }
    row["success"] = r.success;
    row["regret"] = r.regret;
    row["error_tag"] = r.error_tag;
    row["wallclock_ns"] = r.wallclock_ns;
    arr.push_back(std::move(row));
  }
  return arr;
}

nlohmann::json summary_to_json(const Summary& summary) {
  nlohmann::json j;
  j["success_rate"] = summary.success_rate;
  j["success_ci95"] = summary.success_ci95;
  j["mean_queries"] = summary.mean_queries;
  j["mean_regret"] = summary.mean_regret;
  j["worst_function"] = summary.worst_function;
  nlohmann::json breakdown = nlohmann::json::array();
  for (const FunctionBreakdown& fb : summary.per_function) {
    nlohmann::json row;
    row["function_index"] = fb.function_index;
    row["trials"] = fb.trials;
    row["success_rate"] = fb.success_rate;
    row["mean_regret"] = fb.mean_regret;
    row["mean_queries"] = fb.mean_queries;
    breakdown.push_back(std::move(row));
  }
  j["per_function"] = std::move(breakdown);
  j["config_echo"] = summary.config_echo;
  j["code_version"] = summary.code_version;
  return j;
}

PinskerReport pinsker_check(
    const ExplicitClass& cls0, int f0, const ExplicitClass& cls1, int f1,
    const nlohmann::json& learner_spec,
    const std::function<bool(const TrialRecord&)>& event, long budget,
    long trials, double sigma, std::uint64_t master_seed) {
  if (!(sigma > 0)) {
    throw DomainError("pinsker_check requires sigma > 0");
  }
  if (cls0.num_actions() != cls1.num_actions()) {
    throw DomainError("pinsker_check requires a shared action space");
  }
  if (trials < 1) throw DomainError("trials must be >= 1");
  cls0.check_function(f0);
  cls1.check_function(f1);

  PinskerReport report;
  const auto na = static_cast<std::size_t>(cls0.num_actions());
  report.mean_pull_counts.assign(na, 0.0);
  report.mean_gaps.resize(na);
  for (std::size_t a = 0; a < na; ++a) {
    report.mean_gaps[a] = std::abs(
        (cls0.reward(f0, static_cast<ActionId>(a)) -
         cls1.reward(f1, static_cast<ActionId>(a)))
            .to_double());
  }

  const Rational eps0(0);
  double hits0 = 0;
  for (long i = 0; i < trials; ++i) {
    SingleTrialOutcome out =
        run_single_trial(cls0, learner_spec, f0, sigma, eps0, budget, i,
                         master_seed, /*capture_pulls=*/true, false);
    if (event(out.record)) hits0 += 1.0;
    for (std::size_t a = 0; a < na; ++a) {
      report.mean_pull_counts[a] += static_cast<double>(out.pull_counts[a]);
    }
  }
  double hits1 = 0;
  for (long i = 0; i < trials; ++i) {
    SingleTrialOutcome out =
        run_single_trial(cls1, learner_spec, f1, sigma, eps0, budget,
                         trials + i, master_seed, /*capture_pulls=*/false,
                         false);
    if (event(out.record)) hits1 += 1.0;
  }

  const auto n = static_cast<double>(trials);
  for (std::size_t a = 0; a < na; ++a) report.mean_pull_counts[a] /= n;
  report.p0 = hits0 / n;
  report.p1 = hits1 / n;
  report.se0 = std::sqrt(report.p0 * (1.0 - report.p0) / n);
  report.se1 = std::sqrt(report.p1 * (1.0 - report.p1) / n);
  report.kl = divergence_budget(report.mean_pull_counts, report.mean_gaps, sigma);
  report.pinsker = pinsker_bound(report.kl);
  report.huber_bretagnolle = huber_bretagnolle_bound(report.kl);
  const double slack = 3.0 * (report.se0 + report.se1);
  report.pinsker_ok =
      std::abs(report.p0 - report.p1) <= report.pinsker + slack;
  report.hb_ok =
      report.p0 + (1.0 - report.p1) >= report.huber_bretagnolle - slack;
  return report;
}

}  // namespace banditlab

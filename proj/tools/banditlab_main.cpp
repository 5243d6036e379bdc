// banditlab: exact query-complexity solving, maximin volume, gap search,
// Monte Carlo simulation, and the SAT-hardness construction, from one binary.
//
// Exit codes: 0 success, 2 usage error, 1 domain or runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "banditlab/class_builders.hpp"
#include "banditlab/function_class.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/learners.hpp"
#include "banditlab/metrics.hpp"
#include "banditlab/rational.hpp"
#include "banditlab/satbandit.hpp"
#include "banditlab/solver.hpp"
#include "banditlab/types.hpp"

namespace {

using banditlab::Rational;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw banditlab::DomainError("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw banditlab::DomainError("cannot write file: " + path);
  }
  out << content;
}

nlohmann::json load_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw banditlab::DomainError("malformed JSON in " + path + ": " + e.what());
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BANDITLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw banditlab::DomainError("BANDITLAB_SEED is not an integer");
    }
  }
  return 0;
}

struct SimulateArgs {
  std::string class_path;
  std::string learner_path;
  double sigma = 0.0;
  std::string epsilon = "0";
  long trials = 100;
  long budget = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::string adversary = "worst";
  int function_index = 0;
  std::string out_path;
  std::string summary_path;
  std::string format = "csv";
  int threads = 0;
  bool timing = false;
};

void add_simulate_flags(CLI::App* cmd, SimulateArgs* args) {
  cmd->add_option("--class", args->class_path, "Function-class JSON file")
      ->required();
  cmd->add_option("--learner", args->learner_path, "Learner spec JSON file")
      ->required();
  cmd->add_option("--sigma", args->sigma, "Observation noise std deviation");
  cmd->add_option("--epsilon", args->epsilon,
                  "Optimality tolerance (exact rational or decimal)");
  cmd->add_option("--trials", args->trials, "Number of Monte Carlo trials");
  cmd->add_option("--budget", args->budget, "Max queries per trial");
  cmd->add_option("--seed", args->seed,
                  "Master seed (default: BANDITLAB_SEED env var or 0)");
  cmd->add_option("--adversary", args->adversary,
                  "worst (round-robin over the class) or fixed")
      ->check(CLI::IsMember({"worst", "fixed"}));
  cmd->add_option("--function", args->function_index,
                  "Hidden function index for --adversary fixed");
  cmd->add_option("--out", args->out_path,
                  "Records file (default: print to stdout)");
  cmd->add_option("--summary-out", args->summary_path,
                  "Summary JSON file (default: print to stdout)");
  cmd->add_option("--format", args->format, "Records format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", args->threads,
                  "Worker threads (0 = all cores; summaries are unaffected)");
  cmd->add_flag("--timing", args->timing,
                "Record per-trial wallclock (off keeps reruns byte-identical)");
}

int run_simulate(const SimulateArgs& args) {
  banditlab::ExperimentConfig config;
  config.class_spec = load_json(args.class_path);
  config.learner_spec = load_json(args.learner_path);
  config.sigma = args.sigma;
  config.epsilon = Rational::parse(args.epsilon);
  config.trials = args.trials;
  config.budget = args.budget;
  config.master_seed = args.seed.has_value() ? *args.seed : default_seed();
  config.adversary =
      args.adversary == "fixed"
          ? banditlab::ExperimentConfig::Adversary::kFixedFunction
          : banditlab::ExperimentConfig::Adversary::kWorstOverClass;
  config.fixed_function = args.function_index;
  config.threads = args.threads;
  config.timing = args.timing;

  const banditlab::RunResult result = banditlab::run_trials(config);
  std::string records;
  if (args.format == "csv") {
    records = banditlab::records_to_csv(result.records);
  } else {
    records = banditlab::records_to_json(result.records).dump(2) + "\n";
  }
  const std::string summary =
      banditlab::summary_to_json(result.summary).dump(2) + "\n";
  if (args.out_path.empty()) {
    std::cout << records;
  } else {
    write_file(args.out_path, records);
  }
  if (args.summary_path.empty()) {
    std::cout << summary;
  } else {
    write_file(args.summary_path, summary);
  }
  return 0;
}

int run_sat(const std::string& formula_path, const std::string& mode,
            long budget, std::optional<std::uint64_t> target) {
  const banditlab::Formula3CNF phi =
      banditlab::parse_dimacs(read_file(formula_path));
  if (mode == "reduce") {
    const auto learner = [](int n, const banditlab::SatOracleFn& query) {
      banditlab::two_query_identify(n, query);
    };
    const banditlab::SatVerdict verdict =
        banditlab::sat_reduction(phi, learner, budget);
    std::cout << (verdict == banditlab::SatVerdict::kAccept ? "accept"
                                                            : "reject")
              << "\n";
    return 0;
  }
  if (mode == "two-query") {
    banditlab::SatFunction hidden =
        target.has_value() ? banditlab::make_f_phi_c(phi, *target)
                           : banditlab::make_f_phi(phi);
    const auto oracle = [&hidden](const banditlab::SatAction& a) {
      return banditlab::eval_sat_function(hidden, a);
    };
    const banditlab::TwoQueryResult result =
        banditlab::two_query_identify(phi.n, oracle);
    std::cout << "output " << banditlab::sat_action_to_string(result.output, phi.n)
              << "\nqueries " << result.queries << "\n";
    return 0;
  }
  // oracle-test: codec round trip, satisfiability, and the consistency
  // oracle on the formula's own reading.
  const Rational code = banditlab::encode_formula(phi);
  const bool round_trip = banditlab::decode_formula(code, phi.n) == phi;
  const auto astar = banditlab::min_sat_assignment(phi);
  std::cout << "encoding " << code.to_string() << "\n";
  std::cout << "round_trip " << (round_trip ? "ok" : "FAIL") << "\n";
  if (astar.has_value()) {
    std::cout << "satisfiable yes\nmin_assignment "
              << banditlab::sat_action_to_string(
                     banditlab::SatAction::assignment(*astar), phi.n)
              << "\n";
  } else {
    std::cout << "satisfiable no\n";
  }
  const banditlab::SatFunction erm = banditlab::erm_consistent(
      phi.n, {{banditlab::SatAction::star(), code}});
  std::cout << "erm_star_consistent "
            << (banditlab::eval_sat_function(erm, banditlab::SatAction::star()) ==
                        code
                    ? "ok"
                    : "FAIL")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Structured-bandit laboratory: exact query complexity, maximin "
      "volume, gap search, Monte Carlo experiments, SAT reduction"};
  app.require_subcommand(1);

  // --- qc ---
  std::string qc_class;
  std::string qc_eps = "0";
  int qc_cap = banditlab::kDefaultFunctionCap;
  std::string qc_policy_out;
  CLI::App* qc = app.add_subcommand(
      "qc", "Exact worst-case query complexity of a class");
  qc->add_option("--class", qc_class, "Function-class JSON file")->required();
  qc->add_option("--epsilon", qc_eps, "Optimality tolerance");
  qc->add_option("--cap", qc_cap, "Refuse classes with more functions");
  qc->add_option("--policy-out", qc_policy_out,
                 "Write the optimal policy tree as JSON");

  // --- gamma ---
  std::string gamma_class;
  std::string gamma_eps = "0";
  std::string gamma_out;
  CLI::App* gamma_cmd =
      app.add_subcommand("gamma", "Generalized maximin volume of a class");
  gamma_cmd->add_option("--class", gamma_class, "Function-class JSON file")
      ->required();
  gamma_cmd->add_option("--epsilon", gamma_eps, "Optimality tolerance");
  gamma_cmd->add_option("--out", gamma_out, "Write value + witness JSON here");

  // --- gap ---
  std::string gap_class;
  std::string gap_eps = "0";
  std::string gap_policy;
  int gap_cap = banditlab::kDefaultFunctionCap;
  long gap_nodes = 50'000'000;
  CLI::App* gap_cmd = app.add_subcommand(
      "gap", "Best achievable value spacing of optimal policies");
  gap_cmd->add_option("--class", gap_class, "Function-class JSON file")
      ->required();
  gap_cmd->add_option("--epsilon", gap_eps, "Optimality tolerance");
  gap_cmd->add_option("--policy", gap_policy,
                      "Evaluate this policy tree instead of searching");
  gap_cmd->add_option("--cap", gap_cap, "Refuse classes with more functions");
  gap_cmd->add_option("--node-budget", gap_nodes,
                      "Search nodes before returning a partial lower bound");

  // --- simulate / regret ---
  SimulateArgs sim_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run seeded Monte Carlo trials");
  add_simulate_flags(simulate, &sim_args);
  SimulateArgs regret_args;
  CLI::App* regret = app.add_subcommand(
      "regret", "Run seeded Monte Carlo trials (regret accounting)");
  add_simulate_flags(regret, &regret_args);

  // --- sat ---
  std::string sat_formula;
  std::string sat_mode = "reduce";
  long sat_budget = 1000;
  std::optional<std::uint64_t> sat_target;
  std::optional<std::uint64_t> sat_seed;  // accepted for interface parity
  int sat_n = 0;
  CLI::App* sat = app.add_subcommand(
      "sat", "Formula codec, reduction, and two-query identification");
  sat->add_option("--formula", sat_formula, "DIMACS 3CNF file")->required();
  sat->add_option("--mode", sat_mode, "reduce | oracle-test | two-query")
      ->check(CLI::IsMember({"reduce", "oracle-test", "two-query"}));
  sat->add_option("--budget", sat_budget, "Query budget for the reduction");
  sat->add_option("--target", sat_target,
                  "Hidden target index for two-query mode");
  sat->add_option("--n", sat_n, "Expected variable count (cross-checked)");
  sat->add_option("--seed", sat_seed, "Unused; accepted for parity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help text itself for --help; usage errors exit 2.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (qc->parsed()) {
      const banditlab::ExplicitClass cls =
          banditlab::class_from_json(load_json(qc_class));
      const banditlab::QcResult result =
          banditlab::exact_qc(cls, Rational::parse(qc_eps), qc_cap);
      std::cout << result.qc << "\n";
      if (!qc_policy_out.empty()) {
        write_file(qc_policy_out,
                   banditlab::policy_to_json(*result.tree).dump(2) + "\n");
      }
      return 0;
    }
    if (gamma_cmd->parsed()) {
      const banditlab::ExplicitClass cls =
          banditlab::class_from_json(load_json(gamma_class));
      const banditlab::GammaResult result =
          banditlab::gamma(cls, Rational::parse(gamma_eps));
      nlohmann::json j;
      j["value"] = result.value.to_double();
      j["value_exact"] = result.value.to_string();
      nlohmann::json witness = nlohmann::json::array();
      nlohmann::json witness_exact = nlohmann::json::array();
      for (const Rational& p : result.witness) {
        witness.push_back(p.to_double());
        witness_exact.push_back(p.to_string());
      }
      j["witness"] = witness;
      j["witness_exact"] = witness_exact;
      nlohmann::json mass = nlohmann::json::array();
      for (const Rational& m : result.achieved_mass) {
        mass.push_back(m.to_double());
      }
      j["achieved_mass"] = mass;
      std::cout << banditlab::format_double(result.value.to_double()) << "\n";
      const std::string payload = j.dump(2) + "\n";
      if (gamma_out.empty()) {
        std::cout << payload;
      } else {
        write_file(gamma_out, payload);
      }
      return 0;
    }
    if (gap_cmd->parsed()) {
      const banditlab::ExplicitClass cls =
          banditlab::class_from_json(load_json(gap_class));
      if (!gap_policy.empty()) {
        const banditlab::PolicyTreePtr tree =
            banditlab::policy_from_json(load_json(gap_policy));
        std::cout << banditlab::gap_of_policy(*tree, cls).to_string() << "\n";
        return 0;
      }
      const banditlab::GapResult result = banditlab::gap_of_class(
          cls, Rational::parse(gap_eps), gap_cap, gap_nodes);
      std::cout << result.gap.to_string() << "\n";
      if (result.partial) std::cout << "partial\n";
      return 0;
    }
    if (simulate->parsed()) return run_simulate(sim_args);
    if (regret->parsed()) return run_simulate(regret_args);
    if (sat->parsed()) {
      if (sat_n > 0) {
        const banditlab::Formula3CNF phi =
            banditlab::parse_dimacs(read_file(sat_formula));
        if (phi.n != sat_n) {
          throw banditlab::DomainError(
              "--n does not match the DIMACS problem line");
        }
      }
      return run_sat(sat_formula, sat_mode, sat_budget, sat_target);
    }
  } catch (const banditlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "banditlab/function_class.hpp"
#include "banditlab/types.hpp"

namespace banditlab {

// Sequential decision maker. The driver calls step() with the full history so
// far (most recent observation last) and either performs the returned query,
// appending its observation, or finalizes the returned output. Instances are
// single-trial state machines; none of them draw randomness of their own, so
// a trial is fully determined by the hidden function and the noise draws.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual LearnerDecision step(const History& history) = 0;
  // Nonempty when the learner finished through a degenerate fallback path;
  // copied into the trial record.
  virtual std::string error_tag() const { return std::string(); }
};

// Learner configurations as JSON, one fixed schema per kind:
//   {"kind":"vs_greedy","epsilon":<rational>}
//   {"kind":"tree_descent","d":<int>,"delta":<rational>}
//   {"kind":"two_phase","K":<int>,"sigma":<float>}
//   {"kind":"ucb","sigma":<float>,"horizon":<int>}
//   {"kind":"denoise","inner":{...},"delta":<float>,"delta_prime":<float>}
//   {"kind":"info_lock_identify","K":<int>,"eps1":<float>,"sigma":<float>}
// Rationals accept numbers or exact strings ("1/2^3", "0.125", "1/6").
std::unique_ptr<Learner> make_learner(const nlohmann::json& spec,
                                      const ExplicitClass& cls);

// Direct constructors (the JSON factory goes through these).
std::unique_ptr<Learner> make_version_space_greedy(const ExplicitClass& cls,
                                                   const Rational& eps);
std::unique_ptr<Learner> make_tree_descent(int d, const Rational& delta);
std::unique_ptr<Learner> make_two_phase_informative(int k, double sigma);
std::unique_ptr<Learner> make_ucb(const ExplicitClass& cls, double sigma,
                                  long horizon);
std::unique_ptr<Learner> make_denoise_wrapper(std::unique_ptr<Learner> inner,
                                              const ExplicitClass& cls,
                                              double delta, double delta_prime);
std::unique_ptr<Learner> make_info_lock_identify(int k, double eps1,
                                                 double sigma);

// Deterministic query budget of the two-phase learner's first phase and of
// each candidate round, exposed so tests can pin the closed forms.
struct TwoPhaseSchedule {
  bool case_two = false;
  double alpha = 0;
  long phase0_queries = 0;     // estimation of the informative action
  long per_candidate_queries = 0;  // case 2 only
};
TwoPhaseSchedule two_phase_schedule(int k, double sigma);

// Per-action sample count used by the info-lock identification learner.
long info_lock_identify_samples(int k, double eps1, double sigma);

}  // namespace banditlab

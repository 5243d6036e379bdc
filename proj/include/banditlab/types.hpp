#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "banditlab/rational.hpp"

namespace banditlab {

using ActionId = int;
using FunctionIndex = int;

// Base for everything the library throws on purpose. The CLI maps these to
// exit code 1; usage errors (bad flags) are exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters or inputs (bad class spec, sigma <= 0, budget < 0, ...).
struct DomainError : Error {
  using Error::Error;
};

// A learner or simulation broke the interaction contract (observation not in
// the achievable set, branch missing from a policy tree, budget exceeded...).
struct ProtocolError : Error {
  using Error::Error;
};

// A history restricts a version space to the empty set.
struct InconsistentHistoryError : Error {
  using Error::Error;
};

// A reward is not a valid codeword / no hypothesis matches the data.
struct DecodeError : Error {
  using Error::Error;
};

// Observations that contradict every member of the hypothesis class.
struct NoConsistentFunctionError : Error {
  using Error::Error;
};

// Observed reward: exact rational on noise-free paths, unclipped double when
// Gaussian noise is on. Noise-free logic must never silently round, hence the
// explicit variant rather than a plain double.
using Reward = std::variant<Rational, double>;

inline bool reward_is_exact(const Reward& r) {
  return std::holds_alternative<Rational>(r);
}

inline double reward_to_double(const Reward& r) {
  if (const Rational* q = std::get_if<Rational>(&r)) return q->to_double();
  return std::get<double>(r);
}

// Exact view of a reward; throws if the value came from a noisy channel.
inline const Rational& reward_exact(const Reward& r) {
  if (const Rational* q = std::get_if<Rational>(&r)) return *q;
  throw ProtocolError("noisy observation on a noise-free code path");
}

struct Observation {
  ActionId action = 0;
  Reward reward;
};

using History = std::vector<Observation>;

// One learner step: either query an action or stop and output one.
struct LearnerDecision {
  enum class Kind { kQuery, kStop };
  Kind kind = Kind::kQuery;
  ActionId action = 0;

  static LearnerDecision Query(ActionId a) {
    return {Kind::kQuery, a};
  }
  static LearnerDecision Stop(ActionId a) {
    return {Kind::kStop, a};
  }
};

}  // namespace banditlab

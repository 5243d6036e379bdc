#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/rational.hpp"
#include "banditlab/types.hpp"

namespace banditlab {

// 3CNF formula over n variables with at most n^2 clauses. Literals store a
// 0-based variable index; duplicate literals inside a clause are allowed (the
// unique-assignment construction repeats one literal three times).
struct Literal {
  int var = 0;
  bool negated = false;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Formula3CNF {
  int n = 0;
  std::vector<std::array<Literal, 3>> clauses;
  friend bool operator==(const Formula3CNF&, const Formula3CNF&) = default;
};

// Throws DomainError unless 1 <= n <= 62 (so the 2^{n+1} + 1 action count
// fits in 64 bits), clause count <= n^2, and every literal index is in [0, n).
void validate_formula(const Formula3CNF& phi);

// Action space of the hardness class: a formula-reading action, all 2^n
// assignments, and 2^n index actions. Assignment bitstrings are read as
// unsigned integers with variable 1 as the most significant bit; the natural
// order on assignments is integer order.
struct SatAction {
  enum class Kind { kStar, kAssignment, kIndex };
  Kind kind = Kind::kStar;
  std::uint64_t bits = 0;   // assignment value (kAssignment)
  std::uint64_t index = 0;  // in [1, 2^n] (kIndex)

  static SatAction star() { return {}; }
  static SatAction assignment(std::uint64_t bits) {
    return {Kind::kAssignment, bits, 0};
  }
  static SatAction index_action(std::uint64_t i) { return {Kind::kIndex, 0, i}; }

  friend bool operator==(const SatAction&, const SatAction&) = default;
  friend auto operator<=>(const SatAction&, const SatAction&) = default;
};

std::string sat_action_to_string(const SatAction& a, int n);

// Total number of actions for n variables: 2^{n+1} + 1.
std::uint64_t sat_action_count(int n);

// Class member. With a target c this is f_{phi,c} (phi must be satisfiable):
//   star -> encode(phi), minimal satisfying assignment -> c/2^{n+1},
//   index c -> 1, everything else -> 0.
// Without a target it is f_phi: star -> encode(phi), everything else -> 0.
// The minimal satisfying assignment is found by brute force on first use and
// cached; construction itself never searches, keeping the consistency oracle
// polynomial.
struct SatFunction {
  int n = 0;
  Formula3CNF phi;
  std::optional<std::uint64_t> target;
  mutable std::optional<std::uint64_t> astar_cache;
};

SatFunction make_f_phi(Formula3CNF phi);
SatFunction make_f_phi_c(Formula3CNF phi, std::uint64_t c);
// For callers that already know the minimal satisfying assignment (the
// consistency oracle); skips the brute-force search.
SatFunction make_f_phi_c_known(Formula3CNF phi, std::uint64_t c,
                               std::uint64_t astar);

Rational eval_sat_function(const SatFunction& f, const SatAction& a);

// True when the assignment (integer convention above) satisfies the formula.
bool satisfies(const Formula3CNF& phi, std::uint64_t assignment);

inline constexpr int kSatBruteForceCap = 24;

// First satisfying assignment in natural order, or nullopt if unsatisfiable.
// Brute force over all 2^n assignments; refuses n > kSatBruteForceCap.
std::optional<std::uint64_t> min_sat_assignment(const Formula3CNF& phi);

// Exact dyadic-scaled encoding of a formula into [1/4, 1/2): bitstring =
// clause count in ceil(log2(n^2+1)) bits, then per literal its index in
// ceil(log2 n) bits followed by a negation bit; the L-bit string b maps to
// 1/4 + value(0.b)/5. Injective for fixed n.
Rational encode_formula(const Formula3CNF& phi);

// Exact inverse of encode_formula; throws DecodeError when r is not a
// codeword for this n.
Formula3CNF decode_formula(const Rational& r, int n);

// n clauses of one thrice-repeated literal each, forcing every variable to
// its bit in `assignment`; the unique satisfying assignment is `assignment`.
Formula3CNF unique_assignment_formula(int n, std::uint64_t assignment);

struct SatObservation {
  SatAction action;
  Rational reward;
};

// Consistency (ERM) oracle: returns a class member agreeing with every
// observation, in time polynomial in n and |s| (no satisfiability search).
// Throws NoConsistentFunctionError when the observations contradict every
// class member; detection is partial in one corner (see implementation note).
SatFunction erm_consistent(int n, const std::vector<SatObservation>& s);

// Online estimation: each step returns the consistency oracle's pick for the
// history prefix. Cumulative squared prediction error along any noise-free
// trace is at most 3.
class OnlineEstimator {
 public:
  explicit OnlineEstimator(int n);
  SatFunction step(const std::vector<SatObservation>& history) const;

 private:
  int n_;
};

// Optimal action of a class member read off its concise representation.
SatAction maximize_sat(const SatFunction& f, const Rational& eps);

using SatOracleFn = std::function<Rational(const SatAction&)>;

struct TwoQueryResult {
  SatAction output;
  int queries = 0;
};

// Identifies the optimal action of a hidden class member with at most two
// noise-free queries: read the formula at star, brute-force its minimal
// satisfying assignment, and (if satisfiable) read the index off the reward
// there. Undecodable observations are protocol errors.
TwoQueryResult two_query_identify(int n, const SatOracleFn& oracle);

enum class SatVerdict { kAccept, kReject };

using SatLearnerFn = std::function<void(int n, const SatOracleFn& query)>;

// Simulates a learner against the all-zero responder for phi (star answers
// encode(phi), everything else 0). Accepts the moment the learner queries a
// satisfying assignment; rejects when it stops or the query budget runs out.
SatVerdict sat_reduction(const Formula3CNF& phi, const SatLearnerFn& learner,
                         long budget);

// DIMACS CNF subset: "c" comments, one "p cnf <vars> <clauses>" line, clauses
// as 1-based signed literals terminated by 0, exactly three per clause.
Formula3CNF parse_dimacs(const std::string& text);

}  // namespace banditlab

#include "banditlab/satbandit.hpp"

#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace banditlab {

namespace {

// Smallest k with 2^k >= x (x >= 1).
int ceil_log2(std::uint64_t x) {
  int k = 0;
  std::uint64_t v = 1;
  while (v < x) {
    v <<= 1;
    ++k;
  }
  return k;
}

int header_bits(int n) {
  const std::uint64_t nn = static_cast<std::uint64_t>(n) * n;
  return ceil_log2(nn + 1);
}

int literal_index_bits(int n) { return ceil_log2(static_cast<std::uint64_t>(n)); }

void append_bits(mpz_class* acc, long* length, unsigned long value, int width) {
  mpz_mul_2exp(acc->get_mpz_t(), acc->get_mpz_t(),
               static_cast<mp_bitcnt_t>(width));
  mpz_add_ui(acc->get_mpz_t(), acc->get_mpz_t(), value);
  *length += width;
}

// Value of the `width`-bit field starting at 0-based `offset` from the MSB of
// the `length`-bit string held in `bits`.
unsigned long extract_bits(const mpz_class& bits, long length, long offset,
                           int width) {
  mpz_class shifted;
  mpz_tdiv_q_2exp(shifted.get_mpz_t(), bits.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(length - offset - width));
  mpz_class field;
  mpz_fdiv_r_2exp(field.get_mpz_t(), shifted.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(width));
  return field.get_ui();
}

std::uint64_t pow2(int k) { return std::uint64_t{1} << k; }

}  // namespace

void validate_formula(const Formula3CNF& phi) {
  if (phi.n < 1 || phi.n > 62) {
    throw DomainError("formula variable count must be in [1, 62], got " +
                      std::to_string(phi.n));
  }
  const std::size_t max_clauses =
      static_cast<std::size_t>(phi.n) * static_cast<std::size_t>(phi.n);
  if (phi.clauses.size() > max_clauses) {
    throw DomainError("formula has " + std::to_string(phi.clauses.size()) +
                      " clauses, limit is n^2 = " + std::to_string(max_clauses));
  }
  for (const auto& clause : phi.clauses) {
    for (const Literal& lit : clause) {
      if (lit.var < 0 || lit.var >= phi.n) {
        throw DomainError("literal variable index " + std::to_string(lit.var) +
                          " out of range for n = " + std::to_string(phi.n));
      }
    }
  }
}

std::string sat_action_to_string(const SatAction& a, int n) {
  switch (a.kind) {
    case SatAction::Kind::kStar:
      return "*";
    case SatAction::Kind::kAssignment: {
      std::string s(static_cast<std::size_t>(n), '0');
      for (int i = 0; i < n; ++i) {
        if ((a.bits >> (n - 1 - i)) & 1) s[static_cast<std::size_t>(i)] = '1';
      }
      return s;
    }
    case SatAction::Kind::kIndex:
      return "#" + std::to_string(a.index);
  }
  return "?";
}

std::uint64_t sat_action_count(int n) {
  if (n < 1 || n > 62) {
    throw DomainError("variable count must be in [1, 62]");
  }
  return pow2(n + 1) + 1;
}

SatFunction make_f_phi(Formula3CNF phi) {
  validate_formula(phi);
  SatFunction f;
  f.n = phi.n;
  f.phi = std::move(phi);
  return f;
}

SatFunction make_f_phi_c(Formula3CNF phi, std::uint64_t c) {
  validate_formula(phi);
  if (c < 1 || c > pow2(phi.n)) {
    throw DomainError("target index must be in [1, 2^n]");
  }
  SatFunction f;
  f.n = phi.n;
  f.phi = std::move(phi);
  f.target = c;
  return f;
}

SatFunction make_f_phi_c_known(Formula3CNF phi, std::uint64_t c,
                               std::uint64_t astar) {
  if (!satisfies(phi, astar)) {
    throw DomainError("claimed minimal satisfying assignment does not satisfy "
                      "the formula");
  }
  SatFunction f = make_f_phi_c(std::move(phi), c);
  f.astar_cache = astar;
  return f;
}

bool satisfies(const Formula3CNF& phi, std::uint64_t assignment) {
  for (const auto& clause : phi.clauses) {
    bool sat = false;
    for (const Literal& lit : clause) {
      const bool value = (assignment >> (phi.n - 1 - lit.var)) & 1;
      if (value != lit.negated) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

std::optional<std::uint64_t> min_sat_assignment(const Formula3CNF& phi) {
  validate_formula(phi);
  if (phi.n > kSatBruteForceCap) {
    throw DomainError("brute-force SAT oracle refused: n = " +
                      std::to_string(phi.n) + " exceeds the cap of " +
                      std::to_string(kSatBruteForceCap));
  }
  const std::uint64_t total = pow2(phi.n);
  for (std::uint64_t x = 0; x < total; ++x) {
    if (satisfies(phi, x)) return x;
  }
  return std::nullopt;
}

namespace {

std::uint64_t astar_of(const SatFunction& f) {
  if (!f.astar_cache.has_value()) {
    auto found = min_sat_assignment(f.phi);
    if (!found.has_value()) {
      throw DomainError(
          "function with a target index requires a satisfiable formula");
    }
    f.astar_cache = *found;
  }
  return *f.astar_cache;
}

}  // namespace

Rational eval_sat_function(const SatFunction& f, const SatAction& a) {
  switch (a.kind) {
    case SatAction::Kind::kStar:
      return encode_formula(f.phi);
    case SatAction::Kind::kIndex:
      if (a.index < 1 || a.index > pow2(f.n)) {
        throw DomainError("index action out of range");
      }
      return (f.target.has_value() && a.index == *f.target) ? Rational(1)
                                                            : Rational(0);
    case SatAction::Kind::kAssignment:
      if (a.bits >= pow2(f.n)) {
        throw DomainError("assignment action out of range");
      }
      if (f.target.has_value() && a.bits == astar_of(f)) {
        return Rational::dyadic(mpz_class(static_cast<unsigned long>(*f.target)),
                                static_cast<unsigned long>(f.n + 1));
      }
      return Rational(0);
  }
  throw DomainError("unknown action kind");
}

Rational encode_formula(const Formula3CNF& phi) {
  validate_formula(phi);
  const int h = header_bits(phi.n);
  const int w = literal_index_bits(phi.n);
  mpz_class acc = 0;
  long length = 0;
  append_bits(&acc, &length, static_cast<unsigned long>(phi.clauses.size()), h);
  for (const auto& clause : phi.clauses) {
    for (const Literal& lit : clause) {
      append_bits(&acc, &length, static_cast<unsigned long>(lit.var), w);
      append_bits(&acc, &length, lit.negated ? 1 : 0, 1);
    }
  }
  // 1/4 + value(0.b)/5 with value(0.b) = acc / 2^length.
  mpz_class den = 5;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(),
               static_cast<mp_bitcnt_t>(length));
  mpq_class q(acc, den);
  q.canonicalize();
  return Rational(1, 4) + Rational(q);
}

Formula3CNF decode_formula(const Rational& r, int n) {
  if (n < 1 || n > 62) {
    throw DomainError("variable count must be in [1, 62]");
  }
  const Rational x = (r - Rational(1, 4)) * Rational(5);
  if (x < Rational(0) || !(x < Rational(1))) {
    throw DecodeError("value " + r.to_string() +
                      " is outside the encoding interval");
  }
  unsigned long frac_bits = 0;
  if (!x.is_dyadic(&frac_bits)) {
    throw DecodeError("value " + r.to_string() +
                      " is not a dyadic-scaled codeword");
  }
  const int h = header_bits(n);
  const int w = literal_index_bits(n);

  mpz_class scaled;
  mpz_mul_2exp(scaled.get_mpz_t(), x.num().get_mpz_t(),
               static_cast<mp_bitcnt_t>(h));
  mpz_class header;
  mpz_tdiv_q(header.get_mpz_t(), scaled.get_mpz_t(), x.den().get_mpz_t());
  const mpz_class max_clauses = mpz_class(n) * n;
  if (header > max_clauses) {
    throw DecodeError("decoded clause count exceeds n^2");
  }
  const unsigned long m = header.get_ui();
  const long length = h + static_cast<long>(m) * 3 * (w + 1);
  if (static_cast<long>(frac_bits) > length) {
    throw DecodeError("value has bits beyond the declared clause count");
  }
  mpz_class bits;
  mpz_mul_2exp(bits.get_mpz_t(), x.num().get_mpz_t(),
               static_cast<mp_bitcnt_t>(length - static_cast<long>(frac_bits)));

  Formula3CNF phi;
  phi.n = n;
  long offset = h;
  for (unsigned long j = 0; j < m; ++j) {
    std::array<Literal, 3> clause;
    for (int t = 0; t < 3; ++t) {
      unsigned long var = w == 0 ? 0 : extract_bits(bits, length, offset, w);
      offset += w;
      const unsigned long neg = extract_bits(bits, length, offset, 1);
      offset += 1;
      if (var >= static_cast<unsigned long>(n)) {
        throw DecodeError("decoded literal index out of range");
      }
      clause[static_cast<std::size_t>(t)] =
          Literal{static_cast<int>(var), neg == 1};
    }
    phi.clauses.push_back(clause);
  }
  return phi;
}

Formula3CNF unique_assignment_formula(int n, std::uint64_t assignment) {
  if (n < 1 || n > 62) {
    throw DomainError("variable count must be in [1, 62]");
  }
  if (assignment >= pow2(n)) {
    throw DomainError("assignment out of range");
  }
  Formula3CNF phi;
  phi.n = n;
  for (int i = 0; i < n; ++i) {
    const bool bit = (assignment >> (n - 1 - i)) & 1;
    const Literal lit{i, !bit};  // true exactly when variable i+1 equals bit
    phi.clauses.push_back({lit, lit, lit});
  }
  return phi;
}

namespace {

// Index value c represented by a reward observed at the minimal satisfying
// assignment: r = c / 2^{n+1}. Throws when r is not of that shape.
std::uint64_t index_from_assignment_reward(const Rational& r, int n,
                                           const char* who) {
  mpz_class two_n1 = 1;
  mpz_mul_2exp(two_n1.get_mpz_t(), two_n1.get_mpz_t(),
               static_cast<mp_bitcnt_t>(n + 1));
  const Rational c = r * Rational(mpq_class(two_n1));
  mpz_class upper = 1;
  mpz_mul_2exp(upper.get_mpz_t(), upper.get_mpz_t(),
               static_cast<mp_bitcnt_t>(n));
  if (!c.is_integer() || c.num() < 1 || c.num() > upper) {
    throw NoConsistentFunctionError(
        std::string(who) +
        ": assignment reward is not c/2^{n+1} for an index c in [1, 2^n]");
  }
  return static_cast<std::uint64_t>(c.num().get_ui());
}

}  // namespace

SatFunction erm_consistent(int n, const std::vector<SatObservation>& s) {
  if (n < 1 || n > 62) {
    throw DomainError("variable count must be in [1, 62]");
  }
  const Rational zero(0);
  const Rational one(1);

  // Same action observed twice must agree exactly.
  std::map<SatAction, Rational> seen;
  std::optional<Rational> star_reward;
  std::optional<std::uint64_t> pos_index;
  std::set<std::uint64_t> neg_index;
  std::optional<std::pair<std::uint64_t, Rational>> pos_assign;
  std::set<std::uint64_t> neg_assign;

  for (const SatObservation& obs : s) {
    auto [it, inserted] = seen.emplace(obs.action, obs.reward);
    if (!inserted) {
      if (it->second != obs.reward) {
        throw NoConsistentFunctionError(
            "same action observed with two different rewards");
      }
      continue;
    }
    switch (obs.action.kind) {
      case SatAction::Kind::kStar:
        star_reward = obs.reward;
        break;
      case SatAction::Kind::kIndex:
        if (obs.action.index < 1 || obs.action.index > pow2(n)) {
          throw DomainError("index action out of range");
        }
        if (obs.reward == one) {
          if (pos_index.has_value() && *pos_index != obs.action.index) {
            throw NoConsistentFunctionError(
                "two different index actions observed at reward 1");
          }
          pos_index = obs.action.index;
        } else if (obs.reward == zero) {
          neg_index.insert(obs.action.index);
        } else {
          throw NoConsistentFunctionError(
              "index action observed with a reward other than 0 or 1");
        }
        break;
      case SatAction::Kind::kAssignment:
        if (obs.action.bits >= pow2(n)) {
          throw DomainError("assignment action out of range");
        }
        if (obs.reward == zero) {
          neg_assign.insert(obs.action.bits);
        } else {
          if (pos_assign.has_value() && pos_assign->first != obs.action.bits) {
            throw NoConsistentFunctionError(
                "two different assignments observed with nonzero reward");
          }
          pos_assign = {obs.action.bits, obs.reward};
        }
        break;
    }
  }

  // Target index implied by the positive observations, if any.
  std::optional<std::uint64_t> c;
  if (pos_index.has_value()) c = pos_index;
  if (pos_assign.has_value()) {
    const std::uint64_t c2 =
        index_from_assignment_reward(pos_assign->second, n, "consistency");
    if (c.has_value() && *c != c2) {
      throw NoConsistentFunctionError(
          "index evidence and assignment evidence name different targets");
    }
    c = c2;
  }

  std::optional<Formula3CNF> phi;
  if (star_reward.has_value()) {
    try {
      phi = decode_formula(*star_reward, n);
    } catch (const DecodeError& e) {
      throw NoConsistentFunctionError(
          std::string("star reward is not a formula encoding: ") + e.what());
    }
  }

  // Case split on (star seen?, target known?), with the target sub-split on
  // whether its witness assignment is known — eight branches total.
  if (!c.has_value()) {
    if (phi.has_value()) return make_f_phi(std::move(*phi));
    Formula3CNF empty;
    empty.n = n;
    return make_f_phi(std::move(empty));
  }

  if (neg_index.count(*c) != 0) {
    throw NoConsistentFunctionError(
        "target index was also observed with reward 0");
  }
  if (pos_assign.has_value()) {
    const std::uint64_t witness = pos_assign->first;
    if (phi.has_value()) {
      if (!satisfies(*phi, witness)) {
        throw NoConsistentFunctionError(
            "nonzero-reward assignment does not satisfy the decoded formula");
      }
      // Minimality of the witness is trusted from the consistency
      // precondition; verifying it would need the brute-force oracle.
      return make_f_phi_c_known(std::move(*phi), *c, witness);
    }
    return make_f_phi_c_known(unique_assignment_formula(n, witness), *c,
                              witness);
  }
  if (phi.has_value()) {
    // Target known but its witness assignment never observed: return the
    // decoded formula with the target attached. The witness is located lazily
    // on demand; a zero-reward observation sitting exactly on the true
    // witness is the one inconsistency this oracle cannot detect cheaply.
    return make_f_phi_c(std::move(*phi), *c);
  }
  // No formula pinned: build one whose unique satisfying assignment avoids
  // every zero-reward assignment.
  std::uint64_t cand = 0;
  const std::uint64_t total = pow2(n);
  while (cand < total && neg_assign.count(cand) != 0) ++cand;
  if (cand == total) {
    throw NoConsistentFunctionError(
        "every assignment was observed at reward 0 but a target exists");
  }
  return make_f_phi_c_known(unique_assignment_formula(n, cand), *c, cand);
}

OnlineEstimator::OnlineEstimator(int n) : n_(n) {
  if (n < 1 || n > 62) {
    throw DomainError("variable count must be in [1, 62]");
  }
}

SatFunction OnlineEstimator::step(
    const std::vector<SatObservation>& history) const {
  return erm_consistent(n_, history);
}

SatAction maximize_sat(const SatFunction& f, const Rational& eps) {
  if (eps < Rational(0)) {
    throw DomainError("epsilon must be nonnegative");
  }
  if (f.target.has_value()) return SatAction::index_action(*f.target);
  return SatAction::star();
}

TwoQueryResult two_query_identify(int n, const SatOracleFn& oracle) {
  if (n < 1 || n > kSatBruteForceCap) {
    throw DomainError("two-query identification needs the brute-force oracle; "
                      "n must be in [1, " +
                      std::to_string(kSatBruteForceCap) + "]");
  }
  TwoQueryResult result;
  const Rational r = oracle(SatAction::star());
  ++result.queries;
  Formula3CNF phi;
  try {
    phi = decode_formula(r, n);
  } catch (const DecodeError& e) {
    throw ProtocolError(std::string("star observation is not decodable: ") +
                        e.what());
  }
  const auto astar = min_sat_assignment(phi);
  if (!astar.has_value()) {
    result.output = SatAction::star();
    return result;
  }
  const Rational v = oracle(SatAction::assignment(*astar));
  ++result.queries;
  if (v == Rational(0)) {
    result.output = SatAction::star();
    return result;
  }
  std::uint64_t c = 0;
  try {
    c = index_from_assignment_reward(v, n, "two-query");
  } catch (const NoConsistentFunctionError& e) {
    throw ProtocolError(std::string("assignment observation is not decodable: ") +
                        e.what());
  }
  result.output = SatAction::index_action(c);
  return result;
}

SatVerdict sat_reduction(const Formula3CNF& phi, const SatLearnerFn& learner,
                         long budget) {
  validate_formula(phi);
  if (budget <= 0) {
    throw DomainError("step budget must be positive");
  }
  struct AcceptSignal {};
  struct BudgetSignal {};
  long used = 0;
  const SatOracleFn responder = [&](const SatAction& a) -> Rational {
    if (used >= budget) throw BudgetSignal{};
    ++used;
    if (a.kind == SatAction::Kind::kAssignment && satisfies(phi, a.bits)) {
      throw AcceptSignal{};
    }
    if (a.kind == SatAction::Kind::kStar) return encode_formula(phi);
    return Rational(0);
  };
  try {
    learner(phi.n, responder);
  } catch (const AcceptSignal&) {
    return SatVerdict::kAccept;
  } catch (const BudgetSignal&) {
    return SatVerdict::kReject;
  }
  return SatVerdict::kReject;
}

Formula3CNF parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  long declared_clauses = -1;
  std::vector<long> literals;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      if (!(ls >> p >> fmt >> n >> declared_clauses) || fmt != "cnf") {
        throw DomainError("malformed DIMACS problem line: " + line);
      }
      continue;
    }
    long lit = 0;
    while (ls >> lit) literals.push_back(lit);
  }
  if (n < 0) {
    throw DomainError("DIMACS input has no problem line");
  }
  Formula3CNF phi;
  phi.n = n;
  std::array<Literal, 3> clause;
  int in_clause = 0;
  for (long lit : literals) {
    if (lit == 0) {
      if (in_clause != 3) {
        throw DomainError("DIMACS clause does not have exactly 3 literals");
      }
      phi.clauses.push_back(clause);
      in_clause = 0;
      continue;
    }
    if (in_clause == 3) {
      throw DomainError("DIMACS clause does not have exactly 3 literals");
    }
    const long var = lit > 0 ? lit : -lit;
    if (var < 1 || var > n) {
      throw DomainError("DIMACS literal out of range: " + std::to_string(lit));
    }
    clause[static_cast<std::size_t>(in_clause++)] =
        Literal{static_cast<int>(var - 1), lit < 0};
  }
  if (in_clause != 0) {
    throw DomainError("DIMACS input ends inside a clause");
  }
  if (declared_clauses >= 0 &&
      declared_clauses != static_cast<long>(phi.clauses.size())) {
    throw DomainError("DIMACS clause count does not match the problem line");
  }
  validate_formula(phi);
  return phi;
}

}  // namespace banditlab

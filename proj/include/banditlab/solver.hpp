#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "banditlab/function_class.hpp"
#include "banditlab/rational.hpp"
#include "banditlab/types.hpp"

namespace banditlab {

// Nonnegative rational extended with +infinity (used for Gap values, whose
// infimum over an empty competitor set is +infinity).
class ExtendedReal {
 public:
  ExtendedReal() : value_(Rational(0)) {}
  explicit ExtendedReal(Rational v) : value_(std::move(v)) {}
  static ExtendedReal infinity() { return ExtendedReal(Infinite{}); }

  bool is_infinite() const { return !value_.has_value(); }
  const Rational& finite_value() const;
  double to_double() const;
  std::string to_string() const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b);
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b);

  static ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) {
    return b < a ? b : a;
  }
  static ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) {
    return a < b ? b : a;
  }

 private:
  struct Infinite {};
  explicit ExtendedReal(Infinite) {}
  std::optional<Rational> value_;
};

// Deterministic noise-free querying strategy. Query nodes branch on the exact
// observed reward; branch keys at a node are exactly the distinct values the
// node's version space can produce at the queried action.
struct PolicyNode {
  bool is_stop = false;
  ActionId action = 0;  // stop output or queried action
  std::map<Rational, std::unique_ptr<PolicyNode>> branches;
};
using PolicyTreePtr = std::unique_ptr<PolicyNode>;

int policy_depth(const PolicyNode& node);

// Version-space memo entry: minimal remaining query count and, for decided
// states, the stop outputs valid for the whole space / for undecided states
// the first actions achieving the minimum.
struct MemoEntry {
  int qc = 0;
  std::vector<ActionId> optimal_actions;
};

struct QcResult {
  int qc = 0;
  PolicyTreePtr tree;
  std::unordered_map<std::uint64_t, MemoEntry> memo;
};

inline constexpr int kDefaultFunctionCap = 20;

// Exact worst-case query complexity of identifying an eps-optimal action with
// certainty from noise-free observations:
//   QC(V) = 0 if one action is eps-optimal for every f in V,
//   else 1 + min over actions a of max over achievable r of QC(V | f(a)=r).
// Memoized on the version-space bitset; ties break to the lowest action index
// in the returned tree.
QcResult exact_qc(const ExplicitClass& cls, const Rational& eps,
                  int function_cap = kDefaultFunctionCap);

struct ReplayResult {
  ActionId output = 0;
  int queries = 0;
};

// Runs the tree against class member f (exact observations).
ReplayResult replay_policy(const PolicyNode& tree, const ExplicitClass& cls,
                           FunctionIndex f);

// Minimum over queried nodes and branches of the distance from the observed
// branch value to the nearest other value achievable at that node; +infinity
// when no queried node ever has a competing value.
ExtendedReal gap_of_policy(const PolicyNode& tree, const ExplicitClass& cls);

struct GapResult {
  ExtendedReal gap;
  // True when the enumeration hit the node budget; the value is then a lower
  // bound over the trees explored before the cutoff.
  bool partial = false;
};

// Maximum of gap_of_policy over all deterministic trees whose worst-case
// query count equals exact_qc(cls, eps). Trees may spend slack depth off the
// worst-case path, so the search runs on (version space, remaining budget)
// states rather than only on memo-optimal actions.
GapResult gap_of_class(const ExplicitClass& cls, const Rational& eps,
                       int function_cap = kDefaultFunctionCap,
                       long node_budget = 50'000'000);

// Policy trees as JSON: {"stop": action} | {"query": action, "branches":
// {"<exact reward>": subtree, ...}}.
nlohmann::json policy_to_json(const PolicyNode& node);
PolicyTreePtr policy_from_json(const nlohmann::json& spec);

}  // namespace banditlab

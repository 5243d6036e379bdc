#include "banditlab/solver.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <utility>

namespace banditlab {

const Rational& ExtendedReal::finite_value() const {
  if (!value_.has_value()) {
    throw DomainError("extended real is infinite; no finite value");
  }
  return *value_;
}

double ExtendedReal::to_double() const {
  if (!value_.has_value()) return std::numeric_limits<double>::infinity();
  return value_->to_double();
}

std::string ExtendedReal::to_string() const {
  if (!value_.has_value()) return "inf";
  return value_->to_string();
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.is_infinite() || b.is_infinite()) {
    return a.is_infinite() == b.is_infinite();
  }
  return *a.value_ == *b.value_;
}

bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return *a.value_ < *b.value_;
}

int policy_depth(const PolicyNode& node) {
  if (node.is_stop) return 0;
  int deepest = 0;
  for (const auto& [value, child] : node.branches) {
    deepest = std::max(deepest, policy_depth(*child));
  }
  return 1 + deepest;
}

namespace {

// Distinct values an action can produce, with the bitset of functions
// producing each. Values are kept sorted ascending.
struct ActionPartition {
  std::vector<Rational> values;
  std::vector<std::uint64_t> masks;
};

struct SolveContext {
  const ExplicitClass* cls = nullptr;
  std::vector<ActionPartition> partitions;      // indexed by action
  std::vector<std::uint64_t> stop_ok;           // action eps-optimal for all fns in mask
  std::unordered_map<std::uint64_t, MemoEntry> memo;
};

SolveContext make_context(const ExplicitClass& cls, const Rational& eps) {
  SolveContext ctx;
  ctx.cls = &cls;
  const int num_a = cls.num_actions();
  const int num_f = cls.num_functions();
  ctx.partitions.resize(static_cast<std::size_t>(num_a));
  ctx.stop_ok.assign(static_cast<std::size_t>(num_a), 0);
  for (ActionId a = 0; a < num_a; ++a) {
    auto& part = ctx.partitions[static_cast<std::size_t>(a)];
    for (FunctionIndex f = 0; f < num_f; ++f) {
      const Rational& r = cls.reward(f, a);
      auto it = std::lower_bound(part.values.begin(), part.values.end(), r);
      const auto pos = static_cast<std::size_t>(it - part.values.begin());
      if (it != part.values.end() && *it == r) {
        part.masks[pos] |= (std::uint64_t{1} << f);
      } else {
        part.values.insert(it, r);
        part.masks.insert(part.masks.begin() + static_cast<std::ptrdiff_t>(pos),
                          std::uint64_t{1} << f);
      }
      if (cls.is_eps_optimal(f, a, eps)) {
        ctx.stop_ok[static_cast<std::size_t>(a)] |= (std::uint64_t{1} << f);
      }
    }
  }
  return ctx;
}

// Split `mask` by the observed value of `action`; returns only nonempty parts.
std::vector<std::uint64_t> split_mask(const SolveContext& ctx, ActionId action,
                                      std::uint64_t mask) {
  std::vector<std::uint64_t> parts;
  const auto& part = ctx.partitions[static_cast<std::size_t>(action)];
  for (std::size_t i = 0; i < part.masks.size(); ++i) {
    const std::uint64_t sub = part.masks[i] & mask;
    if (sub != 0) parts.push_back(sub);
  }
  return parts;
}

const MemoEntry& solve(SolveContext& ctx, std::uint64_t mask) {
  auto found = ctx.memo.find(mask);
  if (found != ctx.memo.end()) return found->second;

  MemoEntry entry;
  const int num_a = ctx.cls->num_actions();
  for (ActionId a = 0; a < num_a; ++a) {
    if ((ctx.stop_ok[static_cast<std::size_t>(a)] & mask) == mask) {
      entry.optimal_actions.push_back(a);
    }
  }
  if (!entry.optimal_actions.empty()) {
    entry.qc = 0;
    return ctx.memo.emplace(mask, std::move(entry)).first->second;
  }

  int best = std::numeric_limits<int>::max();
  for (ActionId a = 0; a < num_a; ++a) {
    const auto parts = split_mask(ctx, a, mask);
    if (parts.size() < 2) continue;  // uninformative on this version space
    int worst = 0;
    for (std::uint64_t sub : parts) {
      worst = std::max(worst, solve(ctx, sub).qc);
      if (1 + worst > best) break;
    }
    const int cand = 1 + worst;
    if (cand < best) {
      best = cand;
      entry.optimal_actions.assign(1, a);
    } else if (cand == best) {
      entry.optimal_actions.push_back(a);
    }
  }
  // Rows are pairwise distinct, so every version space of size >= 2 has a
  // splitting action and the recursion bottoms out at singletons, which can
  // always stop on their argmax.
  assert(best < std::numeric_limits<int>::max());
  entry.qc = best;
  return ctx.memo.emplace(mask, std::move(entry)).first->second;
}

PolicyTreePtr build_tree(SolveContext& ctx, std::uint64_t mask) {
  const MemoEntry& entry = solve(ctx, mask);
  auto node = std::make_unique<PolicyNode>();
  if (entry.qc == 0) {
    node->is_stop = true;
    node->action = entry.optimal_actions.front();
    return node;
  }
  const ActionId a = entry.optimal_actions.front();
  node->is_stop = false;
  node->action = a;
  const auto& part = ctx.partitions[static_cast<std::size_t>(a)];
  for (std::size_t i = 0; i < part.masks.size(); ++i) {
    const std::uint64_t sub = part.masks[i] & mask;
    if (sub == 0) continue;
    node->branches.emplace(part.values[i], build_tree(ctx, sub));
  }
  return node;
}

void check_solver_inputs(const ExplicitClass& cls, const Rational& eps,
                         int function_cap) {
  if (eps < Rational(0)) {
    throw DomainError("epsilon must be nonnegative");
  }
  const int cap = std::min(function_cap, 64);
  if (cls.num_functions() > cap) {
    throw DomainError("exact solver refused: class has " +
                      std::to_string(cls.num_functions()) +
                      " functions, cap is " + std::to_string(cap));
  }
}

std::uint64_t full_mask(const ExplicitClass& cls) {
  const int n = cls.num_functions();
  return n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

}  // namespace

QcResult exact_qc(const ExplicitClass& cls, const Rational& eps,
                  int function_cap) {
  check_solver_inputs(cls, eps, function_cap);
  SolveContext ctx = make_context(cls, eps);
  const std::uint64_t root = full_mask(cls);
  QcResult result;
  result.qc = solve(ctx, root).qc;
  result.tree = build_tree(ctx, root);
  assert(policy_depth(*result.tree) == result.qc);
  result.memo = std::move(ctx.memo);
  return result;
}

ReplayResult replay_policy(const PolicyNode& tree, const ExplicitClass& cls,
                           FunctionIndex f) {
  cls.check_function(f);
  ReplayResult out;
  const PolicyNode* node = &tree;
  while (!node->is_stop) {
    cls.check_action(node->action);
    ++out.queries;
    const Rational& r = cls.reward(f, node->action);
    auto it = node->branches.find(r);
    if (it == node->branches.end()) {
      throw ProtocolError("policy tree has no branch for reward " +
                          r.to_string() + " at action " +
                          std::to_string(node->action));
    }
    node = it->second.get();
  }
  cls.check_action(node->action);
  out.output = node->action;
  return out;
}

namespace {

ExtendedReal min_adjacent_spacing(const std::vector<Rational>& sorted_values) {
  if (sorted_values.size() < 2) return ExtendedReal::infinity();
  Rational best = sorted_values[1] - sorted_values[0];
  for (std::size_t i = 2; i < sorted_values.size(); ++i) {
    Rational d = sorted_values[i] - sorted_values[i - 1];
    if (d < best) best = d;
  }
  return ExtendedReal(best);
}

ExtendedReal gap_walk(const PolicyNode& node, const SolveContext& ctx,
                      std::uint64_t mask) {
  if (node.is_stop) {
    ctx.cls->check_action(node.action);
    return ExtendedReal::infinity();
  }
  ctx.cls->check_action(node.action);
  const auto& part = ctx.partitions[static_cast<std::size_t>(node.action)];
  std::vector<Rational> achievable;
  std::vector<std::uint64_t> submasks;
  for (std::size_t i = 0; i < part.masks.size(); ++i) {
    const std::uint64_t sub = part.masks[i] & mask;
    if (sub == 0) continue;
    achievable.push_back(part.values[i]);
    submasks.push_back(sub);
  }
  if (node.branches.size() != achievable.size()) {
    throw ProtocolError(
        "policy tree branches do not match the achievable values at action " +
        std::to_string(node.action));
  }
  ExtendedReal best = min_adjacent_spacing(achievable);
  std::size_t i = 0;
  for (const auto& [value, child] : node.branches) {
    if (!(value == achievable[i])) {
      throw ProtocolError("policy tree branch key " + value.to_string() +
                          " is not achievable at action " +
                          std::to_string(node.action));
    }
    best = ExtendedReal::min(best, gap_walk(*child, ctx, submasks[i]));
    ++i;
  }
  return best;
}

}  // namespace

ExtendedReal gap_of_policy(const PolicyNode& tree, const ExplicitClass& cls) {
  // eps plays no role in the gap of a fixed tree; partitions only.
  SolveContext ctx = make_context(cls, Rational(0));
  return gap_walk(tree, ctx, full_mask(cls));
}

namespace {

struct NodeBudgetHit {};

struct GapSearch {
  SolveContext* ctx = nullptr;
  long nodes_left = 0;
  // Key packs the version-space mask (<= 2^20 states at the solver cap)
  // with the remaining depth budget in the low bits.
  std::unordered_map<std::uint64_t, ExtendedReal> memo;

  ExtendedReal best_gap(std::uint64_t mask, int budget) {
    if (--nodes_left < 0) throw NodeBudgetHit{};
    const std::uint64_t key =
        (mask << 6) | static_cast<std::uint64_t>(budget & 63);
    auto found = memo.find(key);
    if (found != memo.end()) return found->second;

    const MemoEntry& entry = solve(*ctx, mask);
    if (entry.qc == 0) {
      // Optimal trees stop here: no further queried node, gap contribution
      // is vacuous.
      memo.emplace(key, ExtendedReal::infinity());
      return ExtendedReal::infinity();
    }
    assert(entry.qc <= budget);
    bool have = false;
    ExtendedReal best;
    const int num_a = ctx->cls->num_actions();
    for (ActionId a = 0; a < num_a; ++a) {
      const auto& part = ctx->partitions[static_cast<std::size_t>(a)];
      std::vector<Rational> achievable;
      std::vector<std::uint64_t> submasks;
      for (std::size_t i = 0; i < part.masks.size(); ++i) {
        const std::uint64_t sub = part.masks[i] & mask;
        if (sub == 0) continue;
        achievable.push_back(part.values[i]);
        submasks.push_back(sub);
      }
      if (achievable.size() < 2) continue;
      int worst = 0;
      for (std::uint64_t sub : submasks) {
        worst = std::max(worst, solve(*ctx, sub).qc);
      }
      if (worst > budget - 1) continue;  // tree would exceed the QC budget
      ExtendedReal cand = min_adjacent_spacing(achievable);
      for (std::uint64_t sub : submasks) {
        cand = ExtendedReal::min(cand, best_gap(sub, budget - 1));
      }
      if (!have || best < cand) {
        best = cand;
        have = true;
      }
    }
    // A QC-optimal first action always fits the budget, so a candidate exists.
    assert(have);
    memo.emplace(key, best);
    return best;
  }
};

}  // namespace

GapResult gap_of_class(const ExplicitClass& cls, const Rational& eps,
                       int function_cap, long node_budget) {
  check_solver_inputs(cls, eps, function_cap);
  SolveContext ctx = make_context(cls, eps);
  const std::uint64_t root = full_mask(cls);
  const MemoEntry& entry = solve(ctx, root);
  GapResult out;
  if (entry.qc == 0) {
    out.gap = ExtendedReal::infinity();
    return out;
  }

  GapSearch search;
  search.ctx = &ctx;
  search.nodes_left = node_budget;

  // Root candidates are tried one by one so a budget cutoff still leaves the
  // completed candidates as a certified lower bound.
  bool have = false;
  const int num_a = cls.num_actions();
  for (ActionId a = 0; a < num_a; ++a) {
    const auto& part = ctx.partitions[static_cast<std::size_t>(a)];
    std::vector<Rational> achievable;
    std::vector<std::uint64_t> submasks;
    for (std::size_t i = 0; i < part.masks.size(); ++i) {
      const std::uint64_t sub = part.masks[i] & root;
      if (sub == 0) continue;
      achievable.push_back(part.values[i]);
      submasks.push_back(sub);
    }
    if (achievable.size() < 2) continue;
    int worst = 0;
    for (std::uint64_t sub : submasks) {
      worst = std::max(worst, solve(ctx, sub).qc);
    }
    if (worst > entry.qc - 1) continue;
    try {
      ExtendedReal cand = min_adjacent_spacing(achievable);
      for (std::uint64_t sub : submasks) {
        cand = ExtendedReal::min(cand, search.best_gap(sub, entry.qc - 1));
      }
      if (!have || out.gap < cand) {
        out.gap = cand;
        have = true;
      }
    } catch (const NodeBudgetHit&) {
      out.partial = true;
    }
  }
  if (!have) {
    // Nothing completed before the cutoff; report the trivial lower bound.
    out.gap = ExtendedReal(Rational(0));
    out.partial = true;
  }
  return out;
}

nlohmann::json policy_to_json(const PolicyNode& node) {
  nlohmann::json j;
  if (node.is_stop) {
    j["stop"] = node.action;
    return j;
  }
  j["query"] = node.action;
  nlohmann::json branches = nlohmann::json::object();
  for (const auto& [value, child] : node.branches) {
    branches[value.to_string()] = policy_to_json(*child);
  }
  j["branches"] = std::move(branches);
  return j;
}

PolicyTreePtr policy_from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) {
    throw DomainError("policy tree node must be a JSON object");
  }
  auto node = std::make_unique<PolicyNode>();
  if (spec.contains("stop")) {
    if (!spec["stop"].is_number_integer()) {
      throw DomainError("policy tree \"stop\" must be an action index");
    }
    node->is_stop = true;
    node->action = spec["stop"].get<int>();
    return node;
  }
  if (!spec.contains("query") || !spec["query"].is_number_integer()) {
    throw DomainError(
        "policy tree node needs either \"stop\" or an integer \"query\"");
  }
  if (!spec.contains("branches") || !spec["branches"].is_object()) {
    throw DomainError("policy tree query node needs a \"branches\" object");
  }
  node->is_stop = false;
  node->action = spec["query"].get<int>();
  for (const auto& [key, child] : spec["branches"].items()) {
    node->branches.emplace(Rational::parse(key), policy_from_json(child));
  }
  if (node->branches.empty()) {
    throw DomainError("policy tree query node has no branches");
  }
  return node;
}

}  // namespace banditlab

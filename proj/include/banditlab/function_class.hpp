#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/rational.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/types.hpp"

namespace banditlab {

// A finite reward-function class: a fully materialized [functions x actions]
// matrix of exact rationals. Rows are the candidate reward functions; every
// entry lies in [0,1] and rows are pairwise distinct (checked on build).
class ExplicitClass {
 public:
  ExplicitClass(std::vector<std::vector<Rational>> rows, std::string name,
                std::vector<std::string> action_labels = {});

  int num_actions() const { return num_actions_; }
  int num_functions() const { return static_cast<int>(rows_.size()); }

  const Rational& reward(FunctionIndex f, ActionId a) const {
    check_function(f);
    check_action(a);
    return rows_[f][a];
  }
  const std::vector<Rational>& row(FunctionIndex f) const {
    check_function(f);
    return rows_[f];
  }
  const Rational& function_max(FunctionIndex f) const {
    check_function(f);
    return row_max_[f];
  }
  // Lowest action index attaining the row maximum.
  ActionId argmax(FunctionIndex f) const {
    check_function(f);
    return row_argmax_[f];
  }

  const std::string& name() const { return name_; }
  const std::string& action_label(ActionId a) const {
    check_action(a);
    return action_labels_[a];
  }
  ActionId action_by_label(const std::string& label) const;

  bool is_eps_optimal(FunctionIndex f, ActionId a, const Rational& eps) const {
    return reward(f, a) >= function_max(f) - eps;
  }
  // {a : f(a) >= max f - eps}; exact arithmetic, never empty.
  std::vector<ActionId> eps_optimal_set(FunctionIndex f,
                                        const Rational& eps) const;

  void check_action(ActionId a) const;
  void check_function(FunctionIndex f) const;

 private:
  int num_actions_ = 0;
  std::vector<std::vector<Rational>> rows_;
  std::vector<Rational> row_max_;
  std::vector<ActionId> row_argmax_;
  std::string name_;
  std::vector<std::string> action_labels_;
};

// Subset of a class's functions still consistent with a noise-free history.
class VersionSpace {
 public:
  // Full version space of the class.
  explicit VersionSpace(const ExplicitClass& cls);

  const ExplicitClass& function_class() const { return *cls_; }
  int size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(FunctionIndex f) const {
    return (bits_[f >> 6] >> (f & 63)) & 1;
  }
  std::vector<FunctionIndex> members() const;

  // {f in this : f(action) = observed}; exact equality. Empty result means an
  // inconsistent history (or a noisy reward on a noise-free path) and throws.
  VersionSpace restricted(ActionId action, const Rational& observed) const;

  // Sorted distinct values {f(action) : f in this}.
  std::vector<Rational> achievable_values(ActionId action) const;

  friend bool operator==(const VersionSpace& a, const VersionSpace& b) {
    return a.cls_ == b.cls_ && a.bits_ == b.bits_;
  }

 private:
  const ExplicitClass* cls_;
  std::vector<std::uint64_t> bits_;
  int count_ = 0;
};

// Version space after observing an exact-reward history.
VersionSpace restrict_by_history(const ExplicitClass& cls,
                                 const History& history);

// Additive Gaussian observation noise; sigma = 0 means exact observations.
struct NoiseModel {
  double sigma = 0.0;
};

// One observation of f(action): the exact rational itself at sigma = 0, or an
// unclipped f(action) + sigma * N(0,1) draw otherwise.
Reward sample_reward(const ExplicitClass& cls, FunctionIndex f, ActionId action,
                     const NoiseModel& noise, TrialRng& rng);

}  // namespace banditlab

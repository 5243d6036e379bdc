#include "banditlab/function_class.hpp"

#include <algorithm>

namespace banditlab {

ExplicitClass::ExplicitClass(std::vector<std::vector<Rational>> rows,
                             std::string name,
                             std::vector<std::string> action_labels)
    : rows_(std::move(rows)),
      name_(std::move(name)),
      action_labels_(std::move(action_labels)) {
  if (rows_.empty()) throw DomainError(name_ + ": class has no functions");
  num_actions_ = static_cast<int>(rows_[0].size());
  if (num_actions_ == 0) throw DomainError(name_ + ": class has no actions");
  const Rational zero(0), one(1);
  for (const auto& row : rows_) {
    if (static_cast<int>(row.size()) != num_actions_) {
      throw DomainError(name_ + ": ragged reward matrix");
    }
    for (const Rational& v : row) {
      if (v < zero || v > one) {
        throw DomainError(name_ + ": reward " + v.to_string() +
                          " outside [0,1]");
      }
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (std::size_t j = i + 1; j < rows_.size(); ++j) {
      if (rows_[i] == rows_[j]) {
        throw DomainError(name_ + ": duplicate rows " + std::to_string(i) +
                          " and " + std::to_string(j));
      }
    }
  }
  row_max_.reserve(rows_.size());
  row_argmax_.reserve(rows_.size());
  for (const auto& row : rows_) {
    int best = 0;
    for (int a = 1; a < num_actions_; ++a) {
      if (row[a] > row[best]) best = a;
    }
    row_max_.push_back(row[best]);
    row_argmax_.push_back(best);
  }
  if (action_labels_.empty()) {
    action_labels_.reserve(num_actions_);
    for (int a = 0; a < num_actions_; ++a) {
      action_labels_.push_back("a" + std::to_string(a));
    }
  } else if (static_cast<int>(action_labels_.size()) != num_actions_) {
    throw DomainError(name_ + ": action label count mismatch");
  }
}

ActionId ExplicitClass::action_by_label(const std::string& label) const {
  for (int a = 0; a < num_actions_; ++a) {
    if (action_labels_[a] == label) return a;
  }
  throw DomainError(name_ + ": unknown action label '" + label + "'");
}

void ExplicitClass::check_action(ActionId a) const {
  if (a < 0 || a >= num_actions_) {
    throw DomainError(name_ + ": action index " + std::to_string(a) +
                      " out of range");
  }
}

void ExplicitClass::check_function(FunctionIndex f) const {
  if (f < 0 || f >= num_functions()) {
    throw DomainError(name_ + ": function index " + std::to_string(f) +
                      " out of range");
  }
}

std::vector<ActionId> ExplicitClass::eps_optimal_set(
    FunctionIndex f, const Rational& eps) const {
  std::vector<ActionId> out;
  const Rational threshold = function_max(f) - eps;
  for (int a = 0; a < num_actions_; ++a) {
    if (reward(f, a) >= threshold) out.push_back(a);
  }
  return out;
}

VersionSpace::VersionSpace(const ExplicitClass& cls)
    : cls_(&cls),
      bits_((cls.num_functions() + 63) / 64, 0),
      count_(cls.num_functions()) {
  for (int f = 0; f < count_; ++f) bits_[f >> 6] |= std::uint64_t{1} << (f & 63);
}

std::vector<FunctionIndex> VersionSpace::members() const {
  std::vector<FunctionIndex> out;
  out.reserve(count_);
  for (int f = 0; f < cls_->num_functions(); ++f) {
    if (contains(f)) out.push_back(f);
  }
  return out;
}

VersionSpace VersionSpace::restricted(ActionId action,
                                      const Rational& observed) const {
  cls_->check_action(action);
  VersionSpace out = *this;
  out.count_ = 0;
  for (int f = 0; f < cls_->num_functions(); ++f) {
    if (!contains(f)) continue;
    if (cls_->reward(f, action) == observed) {
      ++out.count_;
    } else {
      out.bits_[f >> 6] &= ~(std::uint64_t{1} << (f & 63));
    }
  }
  if (out.count_ == 0) {
    throw InconsistentHistoryError(
        cls_->name() + ": no function takes value " + observed.to_string() +
        " at action " + cls_->action_label(action));
  }
  return out;
}

std::vector<Rational> VersionSpace::achievable_values(ActionId action) const {
  cls_->check_action(action);
  std::vector<Rational> vals;
  for (int f = 0; f < cls_->num_functions(); ++f) {
    if (contains(f)) vals.push_back(cls_->reward(f, action));
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

VersionSpace restrict_by_history(const ExplicitClass& cls,
                                 const History& history) {
  VersionSpace space(cls);
  for (const Observation& obs : history) {
    space = space.restricted(obs.action, reward_exact(obs.reward));
  }
  return space;
}

Reward sample_reward(const ExplicitClass& cls, FunctionIndex f, ActionId action,
                     const NoiseModel& noise, TrialRng& rng) {
  const Rational& mean = cls.reward(f, action);
  if (noise.sigma < 0.0) throw DomainError("negative noise sigma");
  if (noise.sigma == 0.0) return Reward{mean};
  return Reward{mean.to_double() + noise.sigma * rng.gaussian()};
}

}  // namespace banditlab

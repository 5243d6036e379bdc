#include "banditlab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "banditlab/class_builders.hpp"
#include "banditlab/metrics.hpp"
#include "banditlab/solver.hpp"

namespace banditlab {

namespace {

// Replays the exact solver's optimal policy tree: the canonical noise-free
// learner, and the inner learner of the denoising wrapper.
class VersionSpaceGreedy : public Learner {
 public:
  VersionSpaceGreedy(const ExplicitClass& cls, const Rational& eps)
      : result_(exact_qc(cls, eps)), node_(result_.tree.get()) {}

  LearnerDecision step(const History& history) override {
    for (; consumed_ < history.size(); ++consumed_) {
      const Observation& obs = history[consumed_];
      if (node_->is_stop) {
        throw ProtocolError("observation arrived after the policy stopped");
      }
      if (obs.action != node_->action) {
        throw ProtocolError("history does not follow the policy tree");
      }
      const Rational& r = reward_exact(obs.reward);
      auto it = node_->branches.find(r);
      if (it == node_->branches.end()) {
        throw ProtocolError("observation " + r.to_string() +
                            " is not among the policy branches");
      }
      node_ = it->second.get();
    }
    if (node_->is_stop) return LearnerDecision::Stop(node_->action);
    return LearnerDecision::Query(node_->action);
  }

 private:
  QcResult result_;
  const PolicyNode* node_;
  std::size_t consumed_ = 0;
};

// Walks the complete binary tree class: query a node; 0 means the target is
// below it, 1-delta means it is below the sibling. The last query hits a
// leaf, whose sibling is the target when the leaf reads 0.
class TreeDescent : public Learner {
 public:
  TreeDescent(int d, const Rational& delta) : d_(d), off_path_(Rational(1) - delta) {
    if (d < 1) throw DomainError("tree depth must be >= 1");
    if (!(delta > Rational(0)) || !(delta <= Rational(1))) {
      throw DomainError("delta must be in (0, 1]");
    }
  }

  LearnerDecision step(const History& history) override {
    if (!history.empty() && history.size() > consumed_) {
      consumed_ = history.size();
      const Observation& obs = history.back();
      const Rational& r = reward_exact(obs.reward);
      const bool at_leaf_level = level_ == d_ + 1;
      if (at_leaf_level) {
        if (r == Rational(1)) {
          done_ = true;
          output_ = tree_action_index(level_, pos_);
        } else if (r == Rational(0)) {
          done_ = true;
          output_ = tree_action_index(level_, pos_ + 1);
        } else {
          throw ProtocolError("unexpected leaf observation " + r.to_string());
        }
      } else {
        if (r == Rational(0)) {
          pos_ = 2 * pos_ - 1;  // left child
        } else if (r == off_path_) {
          pos_ = 2 * pos_ + 1;  // sibling's left child
        } else {
          throw ProtocolError("unexpected internal observation " +
                              r.to_string());
        }
        ++level_;
      }
    }
    if (done_) return LearnerDecision::Stop(output_);
    return LearnerDecision::Query(tree_action_index(level_, pos_));
  }

 private:
  int d_;
  Rational off_path_;
  int level_ = 2;  // the root is uninformative; start one level below
  int pos_ = 1;
  bool done_ = false;
  ActionId output_ = 0;
  std::size_t consumed_ = 0;
};

// Two-phase identification on the informative-action class: estimate the
// informative action, shortlist the indices its mean could encode, then (in
// the noisy wide-K case) verify each shortlisted arm directly.
class TwoPhaseInformative : public Learner {
 public:
  TwoPhaseInformative(int k, double sigma)
      : k_(k), sigma_(sigma), schedule_(two_phase_schedule(k, sigma)) {
    if (k < 2) throw DomainError("two-phase learner needs K >= 2");
    if (sigma < 0) throw DomainError("sigma must be >= 0");
  }

  LearnerDecision step(const History& history) override {
    consume(history);
    if (done_) return LearnerDecision::Stop(output_);
    if (sigma_ == 0) return LearnerDecision::Query(0);
    if (phase_ == Phase::kEstimate) return LearnerDecision::Query(0);
    return LearnerDecision::Query(candidates_[current_candidate_]);
  }

  std::string error_tag() const override { return tag_; }

 private:
  enum class Phase { kEstimate, kVerify };

  void consume(const History& history) {
    for (; consumed_ < history.size(); ++consumed_) {
      const Observation& obs = history[consumed_];
      if (sigma_ == 0) {
        decode_exact(reward_exact(obs.reward));
        continue;
      }
      if (phase_ == Phase::kEstimate) {
        phase0_sum_ += reward_to_double(obs.reward);
        ++phase0_count_;
        if (phase0_count_ == schedule_.phase0_queries) shortlist();
      } else {
        candidate_sum_ += reward_to_double(obs.reward);
        ++candidate_count_;
        if (candidate_count_ == schedule_.per_candidate_queries) {
          candidate_means_.push_back(candidate_sum_ /
                                     static_cast<double>(candidate_count_));
          candidate_sum_ = 0;
          candidate_count_ = 0;
          if (++current_candidate_ == candidates_.size()) finish_verify();
        }
      }
    }
  }

  // Noise-free: the informative action's exact value i/(4K) names the arm.
  void decode_exact(const Rational& r) {
    const Rational scaled = r * Rational(4L * k_);
    if (!scaled.is_integer() || scaled < Rational(1) ||
        scaled > Rational(static_cast<long>(k_))) {
      throw ProtocolError("informative value " + r.to_string() +
                          " does not name an arm");
    }
    done_ = true;
    output_ = static_cast<ActionId>(scaled.num().get_si());
  }

  void shortlist() {
    const double mean = phase0_sum_ / static_cast<double>(phase0_count_);
    for (int i = 1; i <= k_; ++i) {
      const double coded = static_cast<double>(i) / (4.0 * k_);
      if (std::abs(mean - coded) <= schedule_.alpha) {
        candidates_.push_back(static_cast<ActionId>(i));
      }
    }
    if (candidates_.empty()) {
      // Nothing decodable: output the best empirical action seen, which is
      // the informative action itself.
      tag_ = "empty_candidate_set";
      done_ = true;
      output_ = 0;
      return;
    }
    if (!schedule_.case_two) {
      // Narrow-K case: the codes are alpha-separated only up to rounding, so
      // resolve to the nearest code (lowest index on ties) without a verify
      // phase.
      ActionId best = candidates_[0];
      double best_dist = std::abs(mean - static_cast<double>(best) / (4.0 * k_));
      for (ActionId cand : candidates_) {
        const double dist =
            std::abs(mean - static_cast<double>(cand) / (4.0 * k_));
        if (dist < best_dist) {
          best = cand;
          best_dist = dist;
        }
      }
      done_ = true;
      output_ = best;
      return;
    }
    phase_ = Phase::kVerify;
  }

  void finish_verify() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidate_means_.size(); ++i) {
      if (candidate_means_[i] > candidate_means_[best]) best = i;
    }
    done_ = true;
    output_ = candidates_[best];
  }

  int k_;
  double sigma_;
  TwoPhaseSchedule schedule_;
  Phase phase_ = Phase::kEstimate;
  double phase0_sum_ = 0;
  long phase0_count_ = 0;
  std::vector<ActionId> candidates_;
  std::size_t current_candidate_ = 0;
  double candidate_sum_ = 0;
  long candidate_count_ = 0;
  std::vector<double> candidate_means_;
  bool done_ = false;
  ActionId output_ = 0;
  std::string tag_;
  std::size_t consumed_ = 0;
};

// Upper-confidence-bound play to a fixed horizon (regret mode: stops only at
// the horizon, outputting the empirical best arm).
class Ucb : public Learner {
 public:
  Ucb(int num_arms, double sigma, long horizon)
      : num_arms_(num_arms),
        sigma_eff_(std::max(sigma, 1e-6)),
        horizon_(horizon),
        sums_(static_cast<std::size_t>(num_arms), 0.0),
        counts_(static_cast<std::size_t>(num_arms), 0) {
    if (sigma < 0) throw DomainError("sigma must be >= 0");
    if (horizon < num_arms) {
      throw DomainError("horizon must be at least the number of arms");
    }
  }

  LearnerDecision step(const History& history) override {
    for (; consumed_ < history.size(); ++consumed_) {
      const Observation& obs = history[consumed_];
      sums_[static_cast<std::size_t>(obs.action)] += reward_to_double(obs.reward);
      ++counts_[static_cast<std::size_t>(obs.action)];
    }
    const long t = static_cast<long>(history.size());
    if (t >= horizon_) return LearnerDecision::Stop(best_mean_arm());
    if (t < num_arms_) return LearnerDecision::Query(static_cast<ActionId>(t));
    ActionId best = 0;
    double best_score = score(0, t);
    for (ActionId a = 1; a < num_arms_; ++a) {
      const double s = score(a, t);
      if (s > best_score) {
        best = a;
        best_score = s;
      }
    }
    return LearnerDecision::Query(best);
  }

 private:
  double score(ActionId a, long t) const {
    const auto i = static_cast<std::size_t>(a);
    const double mean = sums_[i] / static_cast<double>(counts_[i]);
    return mean + std::sqrt(2.0 * sigma_eff_ * sigma_eff_ *
                            std::log(static_cast<double>(t)) /
                            static_cast<double>(counts_[i]));
  }

  ActionId best_mean_arm() const {
    ActionId best = 0;
    double best_mean = sums_[0] / std::max(1.0, static_cast<double>(counts_[0]));
    for (ActionId a = 1; a < num_arms_; ++a) {
      const auto i = static_cast<std::size_t>(a);
      const double mean = sums_[i] / std::max(1.0, static_cast<double>(counts_[i]));
      if (mean > best_mean) {
        best = a;
        best_mean = mean;
      }
    }
    return best;
  }

  int num_arms_;
  double sigma_eff_;
  long horizon_;
  std::vector<double> sums_;
  std::vector<long> counts_;
  std::size_t consumed_ = 0;
};

// Noise projection: every noisy observation is replaced by the nearest value
// achievable at that action given the reconstructed noiseless history, which
// is then fed to the wrapped noise-free learner. Query counts are the
// inner learner's; below the class's noise threshold the projection is exact
// with high probability.
class DenoiseWrapper : public Learner {
 public:
  DenoiseWrapper(std::unique_ptr<Learner> inner, const ExplicitClass& cls,
                 double delta, double delta_prime)
      : inner_(std::move(inner)), space_(cls) {
    if (!(delta_prime >= 0) || !(delta_prime < delta) || !(delta < 1)) {
      throw DomainError("need 0 <= delta' < delta < 1");
    }
  }

  LearnerDecision step(const History& history) override {
    for (; consumed_ < history.size(); ++consumed_) {
      const Observation& obs = history[consumed_];
      const Rational projected = project(obs);
      space_ = space_.restricted(obs.action, projected);
      reconstructed_.push_back(Observation{obs.action, Reward{projected}});
    }
    return inner_->step(reconstructed_);
  }

  std::string error_tag() const override { return inner_->error_tag(); }

 private:
  Rational project(const Observation& obs) const {
    const std::vector<Rational> achievable =
        space_.achievable_values(obs.action);
    // Version spaces restricted to achievable values are never empty, so
    // neither is this list.
    if (reward_is_exact(obs.reward)) {
      const Rational& r = reward_exact(obs.reward);
      Rational best = achievable.front();
      Rational best_dist = abs(r - best);
      for (const Rational& v : achievable) {
        const Rational dist = abs(r - v);
        if (dist < best_dist) {  // ties keep the earlier = smaller value
          best = v;
          best_dist = dist;
        }
      }
      return best;
    }
    const double r = reward_to_double(obs.reward);
    Rational best = achievable.front();
    double best_dist = std::abs(r - best.to_double());
    for (const Rational& v : achievable) {
      const double dist = std::abs(r - v.to_double());
      if (dist < best_dist) {
        best = v;
        best_dist = dist;
      }
    }
    return best;
  }

  std::unique_ptr<Learner> inner_;
  VersionSpace space_;
  History reconstructed_;
  std::size_t consumed_ = 0;
};

// Reads the optimal arm's binary code off the cheap-but-costly code actions
// of the bit-lock class, then stops on the decoded arm.
class InfoLockIdentify : public Learner {
 public:
  InfoLockIdentify(int k, double eps1, double sigma)
      : k_(k),
        m_(info_lock_a1_count(k)),
        samples_(info_lock_identify_samples(k, eps1, sigma)) {}

  LearnerDecision step(const History& history) override {
    for (; consumed_ < history.size(); ++consumed_) {
      bit_sum_ += reward_to_double(history[consumed_].reward);
      ++bit_count_;
      if (bit_count_ == samples_) {
        const double mean = bit_sum_ / static_cast<double>(bit_count_);
        decoded_ = (decoded_ << 1) | (mean > 0.5 ? 1 : 0);
        bit_sum_ = 0;
        bit_count_ = 0;
        ++bits_read_;
      }
    }
    if (bits_read_ < m_) {
      return LearnerDecision::Query(static_cast<ActionId>(bits_read_));
    }
    std::uint64_t k = decoded_ + 1;
    if (k > static_cast<std::uint64_t>(k_)) {
      tag_ = "code_out_of_range";
      k = static_cast<std::uint64_t>(k_);
    }
    return LearnerDecision::Stop(
        static_cast<ActionId>(m_ + static_cast<int>(k) - 1));
  }

  std::string error_tag() const override { return tag_; }

 private:
  int k_;
  int m_;
  long samples_;
  long bit_count_ = 0;
  double bit_sum_ = 0;
  int bits_read_ = 0;
  std::uint64_t decoded_ = 0;
  std::string tag_;
  std::size_t consumed_ = 0;
};

double require_number(const nlohmann::json& spec, const char* field) {
  if (!spec.contains(field) || !spec[field].is_number()) {
    throw DomainError(std::string("learner spec needs numeric field \"") +
                      field + "\"");
  }
  return spec[field].get<double>();
}

long require_integer(const nlohmann::json& spec, const char* field) {
  if (!spec.contains(field) || !spec[field].is_number_integer()) {
    throw DomainError(std::string("learner spec needs integer field \"") +
                      field + "\"");
  }
  return spec[field].get<long>();
}

}  // namespace

TwoPhaseSchedule two_phase_schedule(int k, double sigma) {
  if (k < 2) throw DomainError("two-phase learner needs K >= 2");
  if (sigma < 0) throw DomainError("sigma must be >= 0");
  TwoPhaseSchedule s;
  if (sigma == 0) {
    s.case_two = false;
    s.alpha = 0;
    s.phase0_queries = 1;
    return s;
  }
  const double kd = static_cast<double>(k);
  const double wide_alpha =
      std::cbrt(std::log(16.0) / (32.0 * kd * std::log(32.0 * kd)));
  if (wide_alpha >= 1.0 / kd) {
    s.case_two = true;
    s.alpha = wide_alpha;
    s.phase0_queries = sample_size(s.alpha, 1.0 / 8.0, sigma);
    // Each shortlisted arm gets 32 sigma^2 log(2/delta) pulls at
    // delta = 1/(16 alpha K), i.e. accuracy 1/4.
    s.per_candidate_queries =
        sample_size(0.25, 1.0 / (16.0 * s.alpha * kd), sigma);
  } else {
    s.case_two = false;
    s.alpha = 1.0 / (2.0 * kd);
    s.phase0_queries = sample_size(s.alpha, 1.0 / 4.0, sigma);
  }
  return s;
}

long info_lock_identify_samples(int k, double eps1, double sigma) {
  const int m = info_lock_a1_count(k);
  if (!(eps1 > 0)) throw DomainError("eps1 must be positive");
  if (sigma < 0) throw DomainError("sigma must be >= 0");
  // Accuracy eps1 at confidence 1/(4m) per code action: a union bound leaves
  // failure probability <= 1/4 for the whole code.
  return sample_size(eps1, 1.0 / (4.0 * static_cast<double>(m)), sigma);
}

std::unique_ptr<Learner> make_version_space_greedy(const ExplicitClass& cls,
                                                   const Rational& eps) {
  return std::make_unique<VersionSpaceGreedy>(cls, eps);
}

std::unique_ptr<Learner> make_tree_descent(int d, const Rational& delta) {
  return std::make_unique<TreeDescent>(d, delta);
}

std::unique_ptr<Learner> make_two_phase_informative(int k, double sigma) {
  return std::make_unique<TwoPhaseInformative>(k, sigma);
}

std::unique_ptr<Learner> make_ucb(const ExplicitClass& cls, double sigma,
                                  long horizon) {
  return std::make_unique<Ucb>(cls.num_actions(), sigma, horizon);
}

std::unique_ptr<Learner> make_denoise_wrapper(std::unique_ptr<Learner> inner,
                                              const ExplicitClass& cls,
                                              double delta,
                                              double delta_prime) {
  return std::make_unique<DenoiseWrapper>(std::move(inner), cls, delta,
                                          delta_prime);
}

std::unique_ptr<Learner> make_info_lock_identify(int k, double eps1,
                                                 double sigma) {
  return std::make_unique<InfoLockIdentify>(k, eps1, sigma);
}

std::unique_ptr<Learner> make_learner(const nlohmann::json& spec,
                                      const ExplicitClass& cls) {
  if (!spec.is_object() || !spec.contains("kind") ||
      !spec["kind"].is_string()) {
    throw DomainError("learner spec needs a string field \"kind\"");
  }
  const std::string kind = spec["kind"].get<std::string>();
  if (kind == "vs_greedy") {
    return make_version_space_greedy(cls, rational_from_json(spec.at("epsilon")));
  }
  if (kind == "tree_descent") {
    const long d = require_integer(spec, "d");
    const Rational delta = rational_from_json(spec.at("delta"));
    if (tree_num_actions(static_cast<int>(d)) != cls.num_actions()) {
      throw DomainError("tree_descent depth does not match the class");
    }
    return make_tree_descent(static_cast<int>(d), delta);
  }
  if (kind == "two_phase") {
    const long k = require_integer(spec, "K");
    if (static_cast<int>(k) + 1 != cls.num_actions()) {
      throw DomainError("two_phase K does not match the class");
    }
    return make_two_phase_informative(static_cast<int>(k),
                                      require_number(spec, "sigma"));
  }
  if (kind == "ucb") {
    return make_ucb(cls, require_number(spec, "sigma"),
                    require_integer(spec, "horizon"));
  }
  if (kind == "denoise") {
    if (!spec.contains("inner")) {
      throw DomainError("denoise spec needs an \"inner\" learner");
    }
    return make_denoise_wrapper(make_learner(spec.at("inner"), cls), cls,
                                require_number(spec, "delta"),
                                require_number(spec, "delta_prime"));
  }
  if (kind == "info_lock_identify") {
    const long k = require_integer(spec, "K");
    if (info_lock_a1_count(static_cast<int>(k)) + static_cast<int>(k) !=
        cls.num_actions()) {
      throw DomainError("info_lock_identify K does not match the class");
    }
    return make_info_lock_identify(static_cast<int>(k),
                                   require_number(spec, "eps1"),
                                   require_number(spec, "sigma"));
  }
  throw DomainError("unknown learner kind \"" + kind + "\"");
}

}  // namespace banditlab

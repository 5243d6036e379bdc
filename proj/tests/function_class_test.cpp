#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "banditlab/class_builders.hpp"
#include "banditlab/function_class.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/types.hpp"

using banditlab::DomainError;
using banditlab::ExplicitClass;
using banditlab::Rational;
using banditlab::VersionSpace;

namespace {

ExplicitClass tiny() {
  return ExplicitClass({{Rational(1, 2), Rational(1), Rational(0)},
                        {Rational(1, 2), Rational(0), Rational(1)},
                        {Rational(3, 4), Rational(1, 2), Rational(1, 2)}},
                       "tiny");
}

}  // namespace

TEST_CASE("ExplicitClass accessors and argmax tie-break") {
  const ExplicitClass cls = tiny();
  CHECK(cls.num_functions() == 3);
  CHECK(cls.num_actions() == 3);
  CHECK(cls.reward(0, 1) == Rational(1));
  CHECK(cls.function_max(2) == Rational(3, 4));
  CHECK(cls.argmax(0) == 1);
  // Ties break to the lowest action index.
  const ExplicitClass tied({{Rational(1, 2), Rational(1, 2), Rational(0)}},
                           "tied");
  CHECK(tied.argmax(0) == 0);
}

TEST_CASE("rows must be pairwise distinct and rectangular") {
  CHECK_THROWS_AS(ExplicitClass({{Rational(1)}, {Rational(1)}}, "dup"),
                  DomainError);
  CHECK_THROWS_AS(
      ExplicitClass({{Rational(1)}, {Rational(1), Rational(0)}}, "ragged"),
      DomainError);
  CHECK_THROWS_AS(ExplicitClass({}, "empty"), DomainError);
  CHECK_THROWS_AS(ExplicitClass({{Rational(2)}}, "range"), DomainError);
  CHECK_THROWS_AS(ExplicitClass({{Rational(-1, 2)}}, "range"), DomainError);
}

TEST_CASE("eps-optimality") {
  const ExplicitClass cls = tiny();
  CHECK(cls.is_eps_optimal(0, 1, Rational(0)));
  CHECK_FALSE(cls.is_eps_optimal(0, 0, Rational(0)));
  CHECK(cls.is_eps_optimal(0, 0, Rational(1, 2)));
  const auto set = cls.eps_optimal_set(2, Rational(1, 4));
  CHECK(set == std::vector<banditlab::ActionId>{0, 1, 2});
}

TEST_CASE("VersionSpace restriction follows noise-free consistency") {
  const ExplicitClass cls = tiny();
  const VersionSpace full(cls);
  CHECK(full.size() == 3);
  // Observing reward 1/2 at action 0 keeps f0, f1 and drops f2.
  const VersionSpace sub = full.restricted(0, Rational(1, 2));
  CHECK(sub.size() == 2);
  CHECK(sub.contains(0));
  CHECK(sub.contains(1));
  CHECK_FALSE(sub.contains(2));
  // Further observing 1 at action 1 leaves only f0.
  const VersionSpace leaf = sub.restricted(1, Rational(1));
  CHECK(leaf.size() == 1);
  CHECK(leaf.members() == std::vector<int>{0});
  // An observation no member can produce empties the space -> throws.
  CHECK_THROWS_AS(full.restricted(0, Rational(1, 8)),
                  banditlab::InconsistentHistoryError);
}

TEST_CASE("achievable_values are sorted and distinct") {
  const ExplicitClass cls = tiny();
  const VersionSpace full(cls);
  const auto vals = full.achievable_values(0);
  REQUIRE(vals.size() == 2);
  CHECK(vals[0] == Rational(1, 2));
  CHECK(vals[1] == Rational(3, 4));
}

TEST_CASE("restrict_by_history applies observations in order") {
  const ExplicitClass cls = tiny();
  banditlab::History h;
  h.push_back({0, Rational(1, 2)});
  h.push_back({2, Rational(1)});
  const VersionSpace vs = banditlab::restrict_by_history(cls, h);
  CHECK(vs.members() == std::vector<int>{1});
}

TEST_CASE("sample_reward: sigma=0 returns the exact rational") {
  const ExplicitClass cls = tiny();
  banditlab::TrialRng rng(1, 2);
  const banditlab::Reward r =
      banditlab::sample_reward(cls, 0, 1, banditlab::NoiseModel{0.0}, rng);
  REQUIRE(banditlab::reward_is_exact(r));
  CHECK(banditlab::reward_exact(r) == Rational(1));
}

TEST_CASE("sample_reward: noisy draws are seed-deterministic") {
  const ExplicitClass cls = tiny();
  banditlab::TrialRng a(42, 7);
  banditlab::TrialRng b(42, 7);
  banditlab::TrialRng c(42, 8);
  const banditlab::NoiseModel noise{1.0};
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) {
    const auto ra = banditlab::sample_reward(cls, 1, 0, noise, a);
    const auto rb = banditlab::sample_reward(cls, 1, 0, noise, b);
    const auto rc = banditlab::sample_reward(cls, 1, 0, noise, c);
    REQUIRE_FALSE(banditlab::reward_is_exact(ra));
    CHECK(banditlab::reward_to_double(ra) == banditlab::reward_to_double(rb));
    any_diff |=
        banditlab::reward_to_double(ra) != banditlab::reward_to_double(rc);
  }
  CHECK(any_diff);  // different trial index -> different stream
}

TEST_CASE("mix_seed decorrelates nearby trial indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 100; ++t) {
    seen.insert(banditlab::mix_seed(12345, t));
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("informative_chain matrix") {
  const ExplicitClass one = banditlab::make_informative_chain(1);
  CHECK(one.num_functions() == 1);
  CHECK(one.reward(0, 0) == Rational(1, 2));
  CHECK(one.reward(0, 1) == Rational(1));

  const ExplicitClass four = banditlab::make_informative_chain(4);
  CHECK(four.num_functions() == 4);
  CHECK(four.num_actions() == 5);
  CHECK(four.reward(2, 0) == Rational(1, 6));  // f_3(0) = 1/(2*3)
  CHECK(four.reward(2, 3) == Rational(1));
  CHECK(four.reward(2, 1) == Rational(0));
  CHECK(four.reward(2, 2) == Rational(0));
  CHECK(four.reward(2, 4) == Rational(0));
}

TEST_CASE("informative_k matrix") {
  const ExplicitClass k4 = banditlab::make_informative_k(4);
  CHECK(k4.num_functions() == 4);
  CHECK(k4.num_actions() == 5);
  CHECK(k4.reward(2, 0) == Rational(3, 16));  // f_3(a_0) = 3/(4K)
  CHECK(k4.reward(2, 3) == Rational(1));
  CHECK(k4.reward(2, 1) == Rational(1, 2));
  const ExplicitClass k2 = banditlab::make_informative_k(2);
  CHECK(k2.reward(0, 0) == Rational(1, 8));
  CHECK(k2.reward(1, 0) == Rational(1, 4));
}

TEST_CASE("tree class matrix") {
  // d=1, path to the second leaf: root 1/2, wrong leaf 0, right leaf 1.
  const ExplicitClass t1 = banditlab::make_tree_class(1, Rational(1, 2));
  CHECK(t1.num_functions() == 2);
  CHECK(t1.num_actions() == 3);
  CHECK(t1.reward(1, 0) == Rational(1, 2));
  CHECK(t1.reward(1, 1) == Rational(0));
  CHECK(t1.reward(1, 2) == Rational(1));

  const ExplicitClass t2 = banditlab::make_tree_class(2, Rational(1, 2));
  CHECK(t2.num_functions() == 4);
  CHECK(t2.num_actions() == 7);
  // Row sums over leaves are 1: exactly one leaf pays.
  for (int f = 0; f < 4; ++f) {
    Rational sum(0);
    for (int leaf = 0; leaf < 4; ++leaf) {
      sum += t2.reward(f, banditlab::tree_action_index(3, leaf + 1));
    }
    CHECK(sum == Rational(1));
  }
  // On-path internal node reads 0; off-path reads 1 - delta; root 1 - delta.
  CHECK(t2.reward(0, banditlab::tree_action_index(1, 1)) == Rational(1, 2));
  CHECK(t2.reward(0, banditlab::tree_action_index(2, 1)) == Rational(0));
  CHECK(t2.reward(0, banditlab::tree_action_index(2, 2)) == Rational(1, 2));
  // Restricting by a level-2 observation halves the class.
  const VersionSpace full(t2);
  CHECK(full.restricted(banditlab::tree_action_index(2, 1), Rational(0))
            .size() == 2);
  CHECK(full.restricted(banditlab::tree_action_index(2, 1), Rational(1, 2))
            .size() == 2);
}

TEST_CASE("info_lock code block") {
  // K=4, eps1=1/10: f_3's A_1 values encode bits "10" of k-1 = 2.
  const ExplicitClass cls =
      banditlab::make_info_lock(4, Rational(1, 10), Rational(1, 25));
  CHECK(banditlab::info_lock_a1_count(4) == 2);
  CHECK(cls.num_actions() == 6);
  CHECK(cls.reward(2, 0) == Rational(3, 5));   // bit 1 -> 1/2 + eps1
  CHECK(cls.reward(2, 1) == Rational(2, 5));   // bit 0 -> 1/2 - eps1
  CHECK(cls.reward(2, 4) == Rational(1));      // own A_2 action
  CHECK(cls.reward(2, 5) == Rational(24, 25)); // other A_2 action: 1 - eps2
  // Decoding bijectivity: A_1 vectors are pairwise distinct for K <= 64.
  for (int k = 2; k <= 64; k *= 2) {
    const ExplicitClass big =
        banditlab::make_info_lock(k, Rational(1, 10), Rational(1, 25));
    const int m = banditlab::info_lock_a1_count(k);
    std::set<std::vector<Rational>> codes;
    for (int f = 0; f < k; ++f) {
      std::vector<Rational> code;
      for (int j = 0; j < m; ++j) code.push_back(big.reward(f, j));
      codes.insert(code);
    }
    CHECK(static_cast<int>(codes.size()) == k);
  }
}

TEST_CASE("augment_with_oracle_point encodes the argmax index") {
  const ExplicitClass base = tiny();
  const ExplicitClass aug = banditlab::augment_with_oracle_point(base);
  CHECK(aug.num_actions() == 4);
  // Encoded value is (1 + argmax) / (2|A| + 2) on the new action.
  CHECK(aug.reward(0, 3) == Rational(2, 8));  // argmax(f0) = 1
  CHECK(aug.reward(1, 3) == Rational(3, 8));  // argmax(f1) = 2
  CHECK(aug.reward(2, 3) == Rational(1, 8));  // argmax(f2) = 0
  // Base rewards are untouched.
  for (int f = 0; f < 3; ++f) {
    for (int a = 0; a < 3; ++a) {
      CHECK(aug.reward(f, a) == base.reward(f, a));
    }
  }
  // Querying the oracle point then the decoded argmax always finds max f.
  for (int f = 0; f < aug.num_functions(); ++f) {
    const Rational code = aug.reward(f, 3);
    const Rational idx = code * Rational(8) - Rational(1);
    REQUIRE(idx.is_integer());
    const int a = static_cast<int>(idx.to_double());
    CHECK(aug.reward(f, a) == base.function_max(f));
  }
}

TEST_CASE("builders emit values in [0,1] with distinct rows") {
  for (const ExplicitClass& cls :
       {banditlab::make_informative_chain(8), banditlab::make_informative_k(8),
        banditlab::make_tree_class(3, Rational(1, 2)),
        banditlab::make_info_lock(8, Rational(1, 10), Rational(1, 25))}) {
    std::set<std::vector<Rational>> rows;
    for (int f = 0; f < cls.num_functions(); ++f) {
      std::vector<Rational> row;
      for (int a = 0; a < cls.num_actions(); ++a) {
        const Rational r = cls.reward(f, a);
        CHECK(r >= Rational(0));
        CHECK(r <= Rational(1));
        row.push_back(r);
      }
      rows.insert(row);
    }
    CHECK(static_cast<int>(rows.size()) == cls.num_functions());
  }
}

TEST_CASE("class_from_json builds each kind") {
  using nlohmann::json;
  const ExplicitClass tree =
      banditlab::class_from_json(json{{"kind", "tree"}, {"d", 2},
                                      {"delta", "1/2"}});
  CHECK(tree.num_functions() == 4);
  const ExplicitClass chain = banditlab::class_from_json(
      json{{"kind", "informative_chain"}, {"N", 4}});
  CHECK(chain.num_actions() == 5);
  const ExplicitClass expl = banditlab::class_from_json(
      json{{"kind", "explicit"},
           {"rewards", json::array({json::array({"1/2", "1"}),
                                    json::array({"1/2", "0"})})}});
  CHECK(expl.reward(0, 1) == Rational(1));
  CHECK_THROWS_AS(banditlab::class_from_json(json{{"kind", "nope"}}),
                  DomainError);
  CHECK_THROWS_AS(banditlab::class_from_json(json::array()), DomainError);
}

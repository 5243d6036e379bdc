#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <climits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "banditlab/class_builders.hpp"
#include "banditlab/function_class.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/solver.hpp"
#include "banditlab/types.hpp"

using banditlab::ExplicitClass;
using banditlab::ExtendedReal;
using banditlab::GapResult;
using banditlab::QcResult;
using banditlab::Rational;

namespace {

ExplicitClass from_rows(const std::vector<std::vector<const char*>>& rows) {
  std::vector<std::vector<Rational>> parsed;
  for (const auto& row : rows) {
    std::vector<Rational> r;
    for (const char* v : row) r.push_back(Rational::parse(v));
    parsed.push_back(std::move(r));
  }
  return ExplicitClass(std::move(parsed), "test");
}

// Reference query-complexity recursion: explicit member lists, no memo, no
// bitset tricks; shares nothing with the production solver but the math.
int brute_qc(const ExplicitClass& cls, const std::vector<int>& members,
             const Rational& eps) {
  for (int a = 0; a < cls.num_actions(); ++a) {
    bool all = true;
    for (int f : members) {
      if (!cls.is_eps_optimal(f, a, eps)) {
        all = false;
        break;
      }
    }
    if (all) return 0;
  }
  int best = INT_MAX;
  for (int a = 0; a < cls.num_actions(); ++a) {
    std::map<Rational, std::vector<int>> groups;
    for (int f : members) groups[cls.reward(f, a)].push_back(f);
    if (groups.size() < 2) continue;
    int worst = 0;
    for (const auto& [value, sub] : groups) {
      worst = std::max(worst, brute_qc(cls, sub, eps));
    }
    best = std::min(best, 1 + worst);
  }
  REQUIRE(best < INT_MAX);
  return best;
}

// Reference gap maximin, same style: depth-optimal trees only.
ExtendedReal brute_gap(const ExplicitClass& cls, const std::vector<int>& members,
                       const Rational& eps, int budget) {
  if (brute_qc(cls, members, eps) == 0) return ExtendedReal::infinity();
  ExtendedReal best{Rational(0)};
  for (int a = 0; a < cls.num_actions(); ++a) {
    std::map<Rational, std::vector<int>> groups;
    for (int f : members) groups[cls.reward(f, a)].push_back(f);
    if (groups.size() < 2) continue;
    int worst = 0;
    for (const auto& [value, sub] : groups) {
      worst = std::max(worst, brute_qc(cls, sub, eps));
    }
    if (worst > budget - 1) continue;
    std::vector<Rational> values;
    for (const auto& [value, sub] : groups) values.push_back(value);
    ExtendedReal cand = ExtendedReal::infinity();
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      cand = ExtendedReal::min(
          cand, ExtendedReal(values[i + 1] - values[i]));  // sorted by map
    }
    for (const auto& [value, sub] : groups) {
      cand = ExtendedReal::min(cand, brute_gap(cls, sub, eps, budget - 1));
    }
    best = ExtendedReal::max(best, cand);
  }
  return best;
}

std::vector<int> all_members(const ExplicitClass& cls) {
  std::vector<int> m(cls.num_functions());
  for (int i = 0; i < cls.num_functions(); ++i) m[i] = i;
  return m;
}

ExplicitClass random_class(banditlab::SplitMix64& rng, int max_a, int max_f) {
  const int num_a = 2 + static_cast<int>(rng.next() % (max_a - 1));
  const int num_f = 2 + static_cast<int>(rng.next() % (max_f - 1));
  std::vector<std::vector<Rational>> rows;
  while (static_cast<int>(rows.size()) < num_f) {
    std::vector<Rational> row;
    for (int a = 0; a < num_a; ++a) {
      row.emplace_back(static_cast<long>(rng.next() % 9), 8L);
    }
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) {
      rows.push_back(std::move(row));
    }
  }
  return ExplicitClass(std::move(rows), "random");
}

}  // namespace

TEST_CASE("ExtendedReal ordering and finiteness") {
  const ExtendedReal two{Rational(2)};
  const ExtendedReal three{Rational(3)};
  const ExtendedReal inf = ExtendedReal::infinity();
  CHECK(two < three);
  CHECK(two < inf);
  CHECK_FALSE(inf < inf);
  CHECK(inf == ExtendedReal::infinity());
  CHECK(inf.is_infinite());
  CHECK(two.finite_value() == Rational(2));
  CHECK_THROWS_AS(inf.finite_value(), banditlab::DomainError);
  CHECK(inf.to_string() == "inf");
  CHECK(ExtendedReal{Rational(1, 2)}.to_string() == "1/2^1");
  CHECK(ExtendedReal::min(two, inf) == two);
  CHECK(ExtendedReal::max(two, inf) == inf);
}

TEST_CASE("qc: tree class equals its depth") {
  // expected values from tests/oracles/qc_gap_oracle.py
  for (int d = 1; d <= 4; ++d) {
    const ExplicitClass cls = banditlab::make_tree_class(d, Rational(1, 2));
    const QcResult result = banditlab::exact_qc(cls, Rational(1, 10));
    CHECK(result.qc == d);
    CHECK(banditlab::policy_depth(*result.tree) == d);
  }
}

TEST_CASE("qc: informative classes need exactly one query") {
  // expected values from tests/oracles/qc_gap_oracle.py
  CHECK(banditlab::exact_qc(banditlab::make_informative_chain(4), Rational(0))
            .qc == 1);
  CHECK(banditlab::exact_qc(banditlab::make_informative_chain(8), Rational(0))
            .qc == 1);
  CHECK(banditlab::exact_qc(banditlab::make_informative_k(8), Rational(2, 5))
            .qc == 1);
  CHECK(banditlab::exact_qc(banditlab::make_informative_k(8), Rational(0))
            .qc == 1);
}

TEST_CASE("qc: singleton class needs no queries") {
  const ExplicitClass cls = from_rows({{"1/2", "1"}});
  const QcResult result = banditlab::exact_qc(cls, Rational(0));
  CHECK(result.qc == 0);
  CHECK(result.tree->is_stop);
  CHECK(result.tree->action == 1);
}

TEST_CASE("qc: epsilon large enough collapses the tree class") {
  // With eps >= delta the root action (constant 1 - delta) is eps-optimal
  // for every leaf function, so zero queries suffice.
  const ExplicitClass cls = banditlab::make_tree_class(2, Rational(1, 10));
  CHECK(banditlab::exact_qc(cls, Rational(1, 10)).qc == 0);
  CHECK(banditlab::exact_qc(cls, Rational(1, 20)).qc == 2);
}

TEST_CASE("qc: oracle-augmented classes in at most two queries") {
  banditlab::SplitMix64 rng(2026);
  for (int rep = 0; rep < 10; ++rep) {
    const ExplicitClass base = random_class(rng, 5, 6);
    const ExplicitClass aug = banditlab::augment_with_oracle_point(base);
    CHECK(banditlab::exact_qc(aug, Rational(0)).qc <= 2);
  }
}

TEST_CASE("qc agrees with the memo-free reference on random classes") {
  banditlab::SplitMix64 rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    const ExplicitClass cls = random_class(rng, 6, 6);
    const QcResult result = banditlab::exact_qc(cls, Rational(0));
    CHECK(result.qc == brute_qc(cls, all_members(cls), Rational(0)));
  }
}

TEST_CASE("qc is monotone in epsilon and under member removal") {
  banditlab::SplitMix64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const ExplicitClass cls = random_class(rng, 5, 5);
    int prev = INT_MAX;
    for (const Rational& eps :
         {Rational(0), Rational(1, 8), Rational(1, 4), Rational(1, 2)}) {
      const int qc = banditlab::exact_qc(cls, eps).qc;
      CHECK(qc <= prev);
      prev = qc;
    }
    if (cls.num_functions() > 2) {
      // Dropping the last function can only make identification easier.
      std::vector<std::vector<Rational>> rows;
      for (int f = 0; f + 1 < cls.num_functions(); ++f) {
        rows.push_back(cls.row(f));
      }
      const ExplicitClass sub(std::move(rows), "sub");
      CHECK(banditlab::exact_qc(sub, Rational(0)).qc <=
            banditlab::exact_qc(cls, Rational(0)).qc);
    }
  }
}

TEST_CASE("replay: the optimal tree is sound for every class member") {
  banditlab::SplitMix64 rng(13);
  std::vector<ExplicitClass> classes;
  classes.push_back(banditlab::make_tree_class(3, Rational(1, 2)));
  classes.push_back(banditlab::make_informative_chain(6));
  classes.push_back(banditlab::make_informative_k(6));
  for (int rep = 0; rep < 10; ++rep) classes.push_back(random_class(rng, 5, 6));
  for (const ExplicitClass& cls : classes) {
    const Rational eps(1, 10);
    const QcResult result = banditlab::exact_qc(cls, eps);
    for (int f = 0; f < cls.num_functions(); ++f) {
      const banditlab::ReplayResult replay =
          banditlab::replay_policy(*result.tree, cls, f);
      CHECK(replay.queries <= result.qc);
      CHECK(cls.is_eps_optimal(f, replay.output, eps));
    }
  }
}

TEST_CASE("replay rejects functions outside the tree's branches") {
  const ExplicitClass cls = banditlab::make_informative_chain(4);
  const QcResult result = banditlab::exact_qc(cls, Rational(0));
  const ExplicitClass other = from_rows({{"1/3", "0", "0", "0", "0"}});
  CHECK_THROWS_AS(banditlab::replay_policy(*result.tree, other, 0),
                  banditlab::ProtocolError);
}

TEST_CASE("solver refuses classes beyond the cap") {
  const ExplicitClass cls = banditlab::make_tree_class(3, Rational(1, 2));
  CHECK_THROWS_WITH_AS(banditlab::exact_qc(cls, Rational(0), 4),
                       doctest::Contains("cap"), banditlab::DomainError);
  CHECK_THROWS_AS(banditlab::gap_of_class(cls, Rational(0), 4),
                  banditlab::DomainError);
  CHECK_THROWS_AS(banditlab::exact_qc(cls, Rational(-1, 2)),
                  banditlab::DomainError);
}

TEST_CASE("gap: chain(4) optimal tree spacing is 1/24") {
  // expected values from tests/oracles/qc_gap_oracle.py: the only optimal
  // single query reads action 0 with values {1/2, 1/4, 1/6, 1/8}.
  const ExplicitClass cls = banditlab::make_informative_chain(4);
  const GapResult result = banditlab::gap_of_class(cls, Rational(0));
  CHECK_FALSE(result.partial);
  CHECK(result.gap == ExtendedReal{Rational(1, 24)});

  const QcResult qc = banditlab::exact_qc(cls, Rational(0));
  CHECK(banditlab::gap_of_policy(*qc.tree, cls) ==
        ExtendedReal{Rational(1, 24)});
}

TEST_CASE("gap: tree classes") {
  // expected values from tests/oracles/qc_gap_oracle.py (d=1 additionally
  // confirmed by full enumeration of all depth-optimal trees there).
  const GapResult d1 = banditlab::gap_of_class(
      banditlab::make_tree_class(1, Rational(1, 2)), Rational(1, 10));
  CHECK(d1.gap == ExtendedReal{Rational(1)});
  const GapResult d2 = banditlab::gap_of_class(
      banditlab::make_tree_class(2, Rational(1, 2)), Rational(1, 10));
  CHECK(d2.gap == ExtendedReal{Rational(1, 2)});
  CHECK_FALSE(d2.partial);
}

TEST_CASE("gap: informative_k(4) is 1/16") {
  // expected values from tests/oracles/qc_gap_oracle.py
  const GapResult result =
      banditlab::gap_of_class(banditlab::make_informative_k(4), Rational(0));
  CHECK(result.gap == ExtendedReal{Rational(1, 16)});
}

TEST_CASE("gap: singleton class is infinite") {
  const ExplicitClass cls = from_rows({{"1/2", "1"}});
  const GapResult result = banditlab::gap_of_class(cls, Rational(0));
  CHECK(result.gap.is_infinite());
  CHECK_FALSE(result.partial);
}

TEST_CASE("gap agrees with the reference maximin on random classes") {
  banditlab::SplitMix64 rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const ExplicitClass cls = random_class(rng, 5, 6);
    const GapResult got = banditlab::gap_of_class(cls, Rational(0));
    const int budget = brute_qc(cls, all_members(cls), Rational(0));
    CHECK_FALSE(got.partial);
    CHECK(got.gap == brute_gap(cls, all_members(cls), Rational(0), budget));
  }
}

TEST_CASE("gap search under a tiny node budget degrades to a lower bound") {
  const ExplicitClass cls = banditlab::make_tree_class(3, Rational(1, 2));
  const GapResult full = banditlab::gap_of_class(cls, Rational(1, 10));
  const GapResult cut =
      banditlab::gap_of_class(cls, Rational(1, 10), 20, /*node_budget=*/1);
  CHECK(cut.partial);
  CHECK_FALSE(full.partial);
  // The partial result never overstates the certified gap.
  CHECK_FALSE(full.gap < cut.gap);
}

TEST_CASE("gap_of_policy rejects trees with wrong branch structure") {
  const ExplicitClass cls = banditlab::make_informative_chain(4);
  const QcResult qc = banditlab::exact_qc(cls, Rational(0));
  nlohmann::json j = banditlab::policy_to_json(*qc.tree);
  // Corrupt one branch key to a value action 0 cannot produce.
  nlohmann::json corrupted;
  corrupted["query"] = j["query"];
  for (auto& [key, sub] : j["branches"].items()) {
    corrupted["branches"][key == "1/2^1" ? "1/3" : key] = sub;
  }
  const banditlab::PolicyTreePtr bad = banditlab::policy_from_json(corrupted);
  CHECK_THROWS_AS(banditlab::gap_of_policy(*bad, cls),
                  banditlab::ProtocolError);
}

TEST_CASE("policy JSON round trip preserves behavior") {
  banditlab::SplitMix64 rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    const ExplicitClass cls = random_class(rng, 5, 6);
    const QcResult qc = banditlab::exact_qc(cls, Rational(0));
    const banditlab::PolicyTreePtr copy =
        banditlab::policy_from_json(banditlab::policy_to_json(*qc.tree));
    CHECK(banditlab::policy_depth(*copy) == qc.qc);
    for (int f = 0; f < cls.num_functions(); ++f) {
      const auto a = banditlab::replay_policy(*qc.tree, cls, f);
      const auto b = banditlab::replay_policy(*copy, cls, f);
      CHECK(a.output == b.output);
      CHECK(a.queries == b.queries);
    }
    CHECK(banditlab::gap_of_policy(*copy, cls) ==
          banditlab::gap_of_policy(*qc.tree, cls));
  }
}

TEST_CASE("frozen random cases match the independent oracle") {
  // expected values from tests/oracles/qc_gap_oracle.py (random cases)
  struct Case {
    std::vector<std::vector<const char*>> rows;
    int qc;
    const char* gap;
  };
  const std::vector<Case> cases = {
      {{{"1/4", "1/4"}, {"0", "1/2"}, {"5/8", "3/8"}}, 1, "1/4"},
      {{{"1", "0"}, {"5/8", "3/4"}, {"0", "1/4"}, {"5/8", "1/8"}, {"1/2", "1"}},
       1,
       "1/8"},
      {{{"0", "5/8"}, {"0", "1/4"}, {"3/8", "5/8"}, {"1", "1/2"}, {"1/4", "5/8"}},
       1,
       "1/8"},
      {{{"1/2", "5/8", "1/2", "1/2"},
        {"1/8", "5/8", "7/8", "1"},
        {"3/4", "1/2", "0", "0"},
        {"1", "0", "1/4", "3/4"},
        {"1/2", "3/4", "5/8", "3/8"}},
       1,
       "1/4"},
      {{{"3/8", "7/8"}, {"1", "1/8"}, {"1/2", "7/8"}, {"1/4", "7/8"}}, 1, "3/4"},
  };
  for (const Case& c : cases) {
    const ExplicitClass cls = from_rows(c.rows);
    CHECK(banditlab::exact_qc(cls, Rational(0)).qc == c.qc);
    CHECK(banditlab::gap_of_class(cls, Rational(0)).gap ==
          ExtendedReal{Rational::parse(c.gap)});
  }
}

#include "banditlab/class_builders.hpp"

#include <algorithm>
#include <cmath>

namespace banditlab {

namespace {

std::string label_of(const std::string& stem, int i) {
  return stem + std::to_string(i);
}

}  // namespace

ExplicitClass make_informative_chain(int N) {
  if (N < 1) throw DomainError("informative_chain: N must be >= 1");
  std::vector<std::vector<Rational>> rows;
  rows.reserve(N);
  std::vector<std::string> labels;
  for (int a = 0; a <= N; ++a) labels.push_back(label_of("a", a));
  for (int i = 1; i <= N; ++i) {
    std::vector<Rational> row(N + 1, Rational(0));
    row[0] = Rational(1, 2L * i);
    row[i] = Rational(1);
    rows.push_back(std::move(row));
  }
  return ExplicitClass(std::move(rows),
                       "informative_chain(N=" + std::to_string(N) + ")",
                       std::move(labels));
}

ExplicitClass make_informative_k(int K) {
  if (K < 2) throw DomainError("informative_k: K must be >= 2");
  std::vector<std::vector<Rational>> rows;
  rows.reserve(K);
  std::vector<std::string> labels;
  for (int a = 0; a <= K; ++a) labels.push_back(label_of("a", a));
  for (int i = 1; i <= K; ++i) {
    std::vector<Rational> row(K + 1, Rational(1, 2));
    row[0] = Rational(i, 4L * K);
    row[i] = Rational(1);
    rows.push_back(std::move(row));
  }
  return ExplicitClass(std::move(rows),
                       "informative_k(K=" + std::to_string(K) + ")",
                       std::move(labels));
}

int tree_num_actions(int d) { return (1 << (d + 1)) - 1; }

ActionId tree_action_index(int level, int pos) {
  return (1 << (level - 1)) - 1 + (pos - 1);
}

ExplicitClass make_tree_class(int d, const Rational& delta) {
  if (d < 1) throw DomainError("tree: d must be >= 1");
  if (delta <= Rational(0) || delta >= Rational(1)) {
    throw DomainError("tree: Delta must be in (0,1)");
  }
  const int num_actions = tree_num_actions(d);
  const int num_leaves = 1 << d;
  const Rational off_path = Rational(1) - delta;
  std::vector<std::string> labels;
  labels.reserve(num_actions);
  for (int level = 1; level <= d + 1; ++level) {
    for (int pos = 1; pos <= (1 << (level - 1)); ++pos) {
      labels.push_back("a[" + std::to_string(level) + "," +
                       std::to_string(pos) + "]");
    }
  }
  std::vector<std::vector<Rational>> rows;
  rows.reserve(num_leaves);
  for (int leaf = 1; leaf <= num_leaves; ++leaf) {
    std::vector<Rational> row(num_actions, off_path);
    for (int level = 2; level <= d; ++level) {
      // Position of the path node at this level: the leaf's ancestor.
      const int pos = ((leaf - 1) >> (d + 1 - level)) + 1;
      row[tree_action_index(level, pos)] = Rational(0);
    }
    for (int pos = 1; pos <= num_leaves; ++pos) {
      row[tree_action_index(d + 1, pos)] =
          pos == leaf ? Rational(1) : Rational(0);
    }
    rows.push_back(std::move(row));
  }
  return ExplicitClass(std::move(rows),
                       "tree(d=" + std::to_string(d) +
                           ",delta=" + delta.to_string() + ")",
                       std::move(labels));
}

int info_lock_a1_count(int K) {
  int m = 0;
  while ((1 << m) < K) ++m;
  return std::max(m, 1);
}

ExplicitClass make_info_lock(int K, const Rational& eps1,
                             const Rational& eps2) {
  if (K < 2) throw DomainError("info_lock: K must be >= 2");
  if (eps1 <= Rational(0) || eps1 > Rational(1, 4)) {
    throw DomainError("info_lock: eps1 must be in (0, 1/4]");
  }
  if (eps2 <= Rational(0) || eps2 > eps1) {
    throw DomainError("info_lock: eps2 must be in (0, eps1]");
  }
  const int m = info_lock_a1_count(K);
  const Rational half(1, 2);
  const Rational lo = half - eps1;
  const Rational hi = half + eps1;
  const Rational near_one = Rational(1) - eps2;
  std::vector<std::string> labels;
  for (int j = 1; j <= m; ++j) labels.push_back("a1[" + std::to_string(j) + "]");
  for (int k = 1; k <= K; ++k) labels.push_back("a2[" + std::to_string(k) + "]");
  std::vector<std::vector<Rational>> rows;
  rows.reserve(K);
  for (int k = 1; k <= K; ++k) {
    std::vector<Rational> row;
    row.reserve(m + K);
    // Code block: bits of k-1, zero-padded to m bits, MSB first.
    for (int j = 1; j <= m; ++j) {
      const int bit = ((k - 1) >> (m - j)) & 1;
      row.push_back(bit ? hi : lo);
    }
    for (int kp = 1; kp <= K; ++kp) {
      row.push_back(kp == k ? Rational(1) : near_one);
    }
    rows.push_back(std::move(row));
  }
  return ExplicitClass(std::move(rows),
                       "info_lock(K=" + std::to_string(K) +
                           ",eps1=" + eps1.to_string() +
                           ",eps2=" + eps2.to_string() + ")",
                       std::move(labels));
}

ExplicitClass augment_with_oracle_point(const ExplicitClass& base,
                                        long encoding_scale) {
  const int n = base.num_actions();
  const long denom = encoding_scale == 0 ? 2L * n + 2 : encoding_scale;
  if (denom <= n) {
    throw DomainError("oracle augmentation: encoding scale " +
                      std::to_string(denom) + " cannot fit " +
                      std::to_string(n) + " action indices in [0,1]");
  }
  std::vector<std::vector<Rational>> rows;
  rows.reserve(base.num_functions());
  for (int f = 0; f < base.num_functions(); ++f) {
    std::vector<Rational> row = base.row(f);
    const Rational encoded(1 + base.argmax(f), denom);
    row.push_back(encoded);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> labels;
  labels.reserve(n + 1);
  for (int a = 0; a < n; ++a) labels.push_back(base.action_label(a));
  labels.push_back("x0");
  return ExplicitClass(std::move(rows), "oracle_augmented(" + base.name() + ")",
                       std::move(labels));
}

ExplicitClass project_actions(const ExplicitClass& cls,
                              const std::vector<ActionId>& actions,
                              const std::string& name) {
  if (actions.empty()) throw DomainError("projection: empty action set");
  std::vector<std::vector<Rational>> rows;
  rows.reserve(cls.num_functions());
  std::vector<std::string> labels;
  for (ActionId a : actions) labels.push_back(cls.action_label(a));
  for (int f = 0; f < cls.num_functions(); ++f) {
    std::vector<Rational> row;
    row.reserve(actions.size());
    for (ActionId a : actions) row.push_back(cls.reward(f, a));
    rows.push_back(std::move(row));
  }
  return ExplicitClass(std::move(rows), name, std::move(labels));
}

Rational rational_from_json(const nlohmann::json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number_float()) return Rational::from_double(v.get<double>());
  throw DomainError("expected a number or rational string in JSON spec");
}

ExplicitClass class_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) {
    throw DomainError("class spec must be an object with a \"kind\" field");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "tree") {
      return make_tree_class(spec.at("d").get<int>(),
                             rational_from_json(spec.at("delta")));
    }
    if (kind == "info_lock") {
      return make_info_lock(spec.at("K").get<int>(),
                            rational_from_json(spec.at("eps1")),
                            rational_from_json(spec.at("eps2")));
    }
    if (kind == "informative_k") {
      return make_informative_k(spec.at("K").get<int>());
    }
    if (kind == "informative_chain") {
      return make_informative_chain(spec.at("N").get<int>());
    }
    if (kind == "oracle_augmented") {
      const ExplicitClass base = class_from_json(spec.at("base"));
      const long scale =
          spec.contains("scale") ? spec.at("scale").get<long>() : 0;
      return augment_with_oracle_point(base, scale);
    }
    if (kind == "explicit") {
      std::vector<std::vector<Rational>> rows;
      for (const auto& row_json : spec.at("rewards")) {
        std::vector<Rational> row;
        for (const auto& v : row_json) row.push_back(rational_from_json(v));
        rows.push_back(std::move(row));
      }
      std::vector<std::string> labels;
      if (spec.contains("action_labels")) {
        for (const auto& l : spec.at("action_labels")) {
          labels.push_back(l.get<std::string>());
        }
      }
      return ExplicitClass(std::move(rows), "explicit", std::move(labels));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad class spec: ") + e.what());
  }
  throw DomainError("unknown class kind \"" + kind + "\"");
}

}  // namespace banditlab
